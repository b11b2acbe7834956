#pragma once

#include <cstddef>
#include <functional>

namespace wsol {

// Thread count from the WSOL_THREADS environment variable, or 1.
int default_thread_count();

// Calls fn(i) for every i in [0, n) on up to `threads` workers. Callers write
// results into slot i and reduce afterwards in index order, so output never
// depends on the schedule. If any call throws, the exception from the
// smallest failing index is rethrown after all workers stop.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn);

}  // namespace wsol

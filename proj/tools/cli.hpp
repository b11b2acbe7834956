#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wsol::cli {

// Exit codes. Failures print exactly one line `error:<kind>:<message>` to the
// error stream, where kind is usage, config, io, data or internal.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitIo = 4,
  kExitData = 5,
};

// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wsol::cli

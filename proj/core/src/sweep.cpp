#include "wsol/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "wsol/error.hpp"
#include "wsol/parallel.hpp"

namespace wsol {
namespace {

double parse_number(std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw_invalid_argument(fmt::format("'{}' is not a number", text));
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

void validate_grid(std::span<const double> grid) {
  if (grid.empty()) throw_invalid_argument("percentile grid is empty");
  for (size_t i = 0; i < grid.size(); ++i) {
    (void)Percentile(grid[i]);
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw_invalid_argument("percentile grid must be strictly increasing");
    }
  }
}

bool all_degenerate(const std::vector<BoxSample>& samples) {
  return std::all_of(samples.begin(), samples.end(),
                     [](const BoxSample& s) { return s.map.degenerate; });
}

bool all_degenerate(const std::vector<MaskSample>& samples) {
  return std::all_of(samples.begin(), samples.end(),
                     [](const MaskSample& s) { return s.map.degenerate; });
}

}  // namespace

std::string_view to_string(SweepMetric metric) {
  return metric == SweepMetric::kMaxBoxAccV2 ? "boxaccv2" : "pxap";
}

SweepMetric parse_sweep_metric(std::string_view name) {
  if (name == "boxaccv2") return SweepMetric::kMaxBoxAccV2;
  if (name == "pxap") return SweepMetric::kPxap;
  throw_invalid_argument(fmt::format("unknown sweep metric '{}'", name));
}

std::vector<double> default_percentile_grid() {
  std::vector<double> grid;
  for (int p = 0; p <= 90; p += 5) grid.push_back(p);
  return grid;
}

std::vector<double> parse_percentile_grid(std::string_view text) {
  std::vector<double> grid;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw_invalid_argument(fmt::format("bad grid '{}'", text));
    const double start = parse_number(parts[0]);
    const double stop = parse_number(parts[1]);
    const double step = parse_number(parts[2]);
    if (!(step > 0.0)) throw_invalid_argument("grid step must be positive");
    // Index-based so that 0:90:5 lands exactly on 90.
    const double span = (stop - start) / step;
    for (long k = 0; k <= static_cast<long>(std::floor(span + 1e-9)); ++k) {
      grid.push_back(start + k * step);
    }
  } else {
    for (std::string_view part : split(text, ',')) grid.push_back(parse_number(part));
  }
  validate_grid(grid);
  return grid;
}

std::vector<BoxSample> normalize_box_dataset(const RawDataset& dataset, NormMethod method,
                                             double percentile, int threads) {
  if (dataset.boxes.size() != dataset.maps.size()) {
    throw_invalid_data(fmt::format("{} maps but {} ground-truth entries", dataset.maps.size(),
                                   dataset.boxes.size()));
  }
  std::vector<BoxSample> out(dataset.maps.size());
  parallel_for(out.size(), threads, [&](size_t i) {
    out[i].map = normalize(dataset.maps[i], method, percentile);
    out[i].truth = dataset.boxes[i];
  });
  return out;
}

std::vector<MaskSample> normalize_mask_dataset(const RawDataset& dataset, NormMethod method,
                                               double percentile, int threads) {
  if (dataset.masks.size() != dataset.maps.size()) {
    throw_invalid_data(
        fmt::format("{} maps but {} masks", dataset.maps.size(), dataset.masks.size()));
  }
  std::vector<MaskSample> out(dataset.maps.size());
  parallel_for(out.size(), threads, [&](size_t i) {
    out[i].map = normalize(dataset.maps[i], method, percentile);
    out[i].mask = dataset.masks[i];
  });
  return out;
}

double evaluate(const RawDataset& dataset, NormMethod method, double percentile,
                SweepMetric metric, const SweepConfig& config) {
  if (metric == SweepMetric::kMaxBoxAccV2) {
    const auto samples =
        normalize_box_dataset(dataset, method, percentile, config.box.threads);
    return max_box_acc_v2(samples, config.box).max_box_acc_v2;
  }
  const auto samples = normalize_mask_dataset(dataset, method, percentile, config.pxap.threads);
  return pxap(samples, config.pxap);
}

SweepResult sweep_percentile(const RawDataset& dataset, NormMethod method,
                             std::span<const double> grid, SweepMetric metric,
                             const SweepConfig& config) {
  if (method != NormMethod::kPaS && method != NormMethod::kIvr) {
    throw_invalid_argument("percentile sweep needs method pas or ivr");
  }
  if (dataset.maps.empty()) throw_invalid_argument("percentile sweep on an empty dataset");
  validate_grid(grid);

  SweepResult result;
  result.method = method;
  result.metric = metric;
  result.tag = config.tag;
  result.grid.assign(grid.begin(), grid.end());

  for (double p : grid) {
    std::optional<double> score;
    if (metric == SweepMetric::kMaxBoxAccV2) {
      const auto samples = normalize_box_dataset(dataset, method, p, config.box.threads);
      if (!all_degenerate(samples)) score = max_box_acc_v2(samples, config.box).max_box_acc_v2;
    } else {
      const auto samples = normalize_mask_dataset(dataset, method, p, config.pxap.threads);
      if (!all_degenerate(samples)) score = pxap(samples, config.pxap);
    }
    result.scores.push_back(score);
  }

  bool found = false;
  for (size_t i = 0; i < grid.size(); ++i) {
    if (result.scores[i] && (!found || *result.scores[i] > result.best_score)) {
      found = true;
      result.best_p = grid[i];
      result.best_score = *result.scores[i];
    }
  }
  if (!found) throw_invalid_data("every map is degenerate at every percentile");
  return result;
}

std::string format_sweep_csv(const SweepResult& result) {
  std::string out = "p,score\n";
  for (size_t i = 0; i < result.grid.size(); ++i) {
    if (result.scores[i]) {
      out += fmt::format("{:.6f},{:.6f}\n", result.grid[i], *result.scores[i]);
    } else {
      out += fmt::format("{:.6f},\n", result.grid[i]);
    }
  }
  return out;
}

}  // namespace wsol

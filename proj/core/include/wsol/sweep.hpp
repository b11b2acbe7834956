#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wsol/metrics.hpp"
#include "wsol/normalize.hpp"

namespace wsol {

enum class SweepMetric { kMaxBoxAccV2, kPxap };

std::string_view to_string(SweepMetric metric);
// Accepts "boxaccv2" and "pxap".
SweepMetric parse_sweep_metric(std::string_view name);

// Raw (unnormalized) maps with whichever ground truth the metric needs.
// `boxes` and `masks` are parallel to `maps` when present.
struct RawDataset {
  std::vector<ScoreMap> maps;
  std::vector<ImageBoxes> boxes;
  std::vector<PixelMask> masks;
};

struct SweepConfig {
  BoxEvalConfig box;
  PxapConfig pxap;
  std::string tag;
};

struct SweepResult {
  NormMethod method = NormMethod::kIvr;
  SweepMetric metric = SweepMetric::kMaxBoxAccV2;
  std::string tag;
  std::vector<double> grid;
  // Missing where every map in the dataset was degenerate at that percentile.
  std::vector<std::optional<double>> scores;
  double best_p = 0.0;  // ties -> smallest p
  double best_score = 0.0;
};

// {0, 5, ..., 90}.
std::vector<double> default_percentile_grid();

// "start:stop:step" (inclusive stop) or a comma list. The result must be
// strictly increasing inside [0, 100]; throws Error(kInvalidArgument).
std::vector<double> parse_percentile_grid(std::string_view text);

std::vector<BoxSample> normalize_box_dataset(const RawDataset& dataset, NormMethod method,
                                             double percentile, int threads = 1);
std::vector<MaskSample> normalize_mask_dataset(const RawDataset& dataset, NormMethod method,
                                               double percentile, int threads = 1);

// Normalizes with (method, percentile) and scores the chosen metric.
double evaluate(const RawDataset& dataset, NormMethod method, double percentile,
                SweepMetric metric, const SweepConfig& config);

// Grid search of the PaS / IVR percentile on a validation split.
SweepResult sweep_percentile(const RawDataset& dataset, NormMethod method,
                             std::span<const double> grid, SweepMetric metric,
                             const SweepConfig& config);

// p,score with an empty score for missing entries.
std::string format_sweep_csv(const SweepResult& result);

// Best IVR percentiles reported for trained CAM models on validation splits.
// Documentation targets only; they need the original networks to reproduce.
namespace reported {
inline constexpr double kCubIvrBestVgg = 45.0;
inline constexpr double kCubIvrBestResNet = 60.0;
inline constexpr double kCubIvrBestInception = 60.0;
inline constexpr double kImageNetIvrBestVgg = 25.0;
inline constexpr double kImageNetIvrBestResNet = 30.0;
inline constexpr double kImageNetIvrBestInception = 35.0;
inline constexpr double kOpenImagesIvrPercentile = 5.0;
}  // namespace reported

}  // namespace wsol

#pragma once

#include <span>
#include <string>
#include <vector>

#include "wsol/localize.hpp"
#include "wsol/metrics.hpp"
#include "wsol/normalize.hpp"

namespace wsol {

// Raw-map extremes of one image and whether it was localized after
// normalization.
struct ExtremaRecord {
  std::string image_id;
  double min_value = 0.0;
  double max_value = 0.0;
  bool hit = false;
};

struct RatioStat {
  double std_max = 0.0;
  double std_min = 0.0;
  double ratio = 0.0;     // +inf when std_min == 0
  bool infinite = false;
};

// min/max come from the raw maps; the hit flag is evaluated after
// normalize(method, percentile) at (tau, delta). `truth` is parallel to `maps`.
std::vector<ExtremaRecord> extrema_scatter(std::span<const ScoreMap> maps,
                                           std::span<const ImageBoxes> truth,
                                           NormMethod method, double percentile, double tau,
                                           double delta,
                                           Connectivity connectivity = Connectivity::kEight,
                                           int threads = 1);

// Population standard deviation of the maxima over that of the minima.
// Throws Error(kInvalidArgument) for fewer than two records.
RatioStat std_ratio(std::span<const ExtremaRecord> records);
RatioStat std_ratio(std::span<const double> minima, std::span<const double> maxima);

inline constexpr double kDefaultRatioCutoff = 15.0;

// kMax when the ratio reaches the cutoff (or is infinite), otherwise kIvr.
// The cutoff is a tool heuristic separating the regime where maxima vary far
// more than minima.
NormMethod recommend_norm(const RatioStat& stat, double cutoff = kDefaultRatioCutoff);

enum class VarianceKind { kPopulation, kSample };

// Variance of a list of scores (typically one method's drop-from-top across
// datasets). Throws Error(kInvalidArgument) for fewer than two values.
double cross_config_variance(std::span<const double> scores,
                             VarianceKind kind = VarianceKind::kPopulation);

// scores[method][dataset] -> score minus the best method's score on that
// dataset (so the winner gets 0, everything else is negative).
std::vector<std::vector<double>> drops_from_top(
    const std::vector<std::vector<double>>& scores);

// image_id,min,max,hit
std::string format_scatter_csv(std::span<const ExtremaRecord> records);

// Max/min standard-deviation ratios reported for trained CAM models.
namespace reported {
inline constexpr double kCubVggStdRatio = 11.0;
inline constexpr double kImageNetVggStdRatio = 12.04;
inline constexpr double kOpenImagesVggStdRatio = 18.36;
inline constexpr double kResNetPeakStdRatio = 31.79;  // largest value seen across datasets
inline constexpr double kInceptionStdRatio = 8.19;
}  // namespace reported

}  // namespace wsol

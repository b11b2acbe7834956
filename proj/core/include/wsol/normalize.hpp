#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wsol/cam.hpp"

namespace wsol {

enum class NormMethod { kMinMax, kMax, kPaS, kIvr };

std::string_view to_string(NormMethod method);
// Accepts "minmax", "max", "pas", "ivr". Throws Error(kInvalidArgument).
NormMethod parse_norm_method(std::string_view name);

inline constexpr double kDefaultPasPercentile = 90.0;
// Percentile used for IVR on pixel-mask datasets when no validation sweep is run.
inline constexpr double kDefaultIvrMaskPercentile = 5.0;

// A percentile rank in [0, 100].
class Percentile {
 public:
  // Throws Error(kInvalidArgument) outside [0, 100] or for NaN.
  explicit Percentile(double p);
  double value() const { return p_; }

 private:
  double p_;
};

// Score map after normalization. Every value lies in [0, 1].
struct NormalizedMap {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<float> data;
  NormMethod method = NormMethod::kMinMax;
  double percentile = 0.0;  // meaningful for PaS and IVR only
  // Set when the normalizer's denominator vanished and the map was zeroed.
  bool degenerate = false;

  size_t size() const { return data.size(); }
  float at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
};

// Linear interpolation between closest ranks at r = (p/100)(n-1) over the
// ascending order of `values`. Throws Error(kInvalidArgument) for empty input.
double pct(std::span<const double> values, Percentile p);
double pct(std::span<const float> values, Percentile p);

NormalizedMap normalize_minmax(const ScoreMap& map);
NormalizedMap normalize_max(const ScoreMap& map);
NormalizedMap normalize_pas(const ScoreMap& map,
                            Percentile p = Percentile(kDefaultPasPercentile));
NormalizedMap normalize_ivr(const ScoreMap& map, Percentile p);

// Dispatch on method; `percentile` is ignored by min-max and max.
NormalizedMap normalize(const ScoreMap& map, NormMethod method, double percentile);

}  // namespace wsol

#include "wsol/normalize.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "wsol/error.hpp"

namespace wsol {
namespace {

// Largest float below one. Values that are strictly below the normalizer's
// reference point must not round up to 1 when stored.
constexpr float kBelowOne = 0x1.fffffep-1f;

float to_unit(double v) {
  if (!(v > 0.0)) return 0.0f;
  if (v >= 1.0) return 1.0f;
  return std::min(static_cast<float>(v), kBelowOne);
}

NormalizedMap blank_like(const ScoreMap& map, NormMethod method, double percentile) {
  NormalizedMap out;
  out.image_id = map.image_id;
  out.width = map.width;
  out.height = map.height;
  out.data.assign(map.data.size(), 0.0f);
  out.method = method;
  out.percentile = percentile;
  return out;
}

// out = clamp((F - shift) / scale, 0, 1), or all zeros when scale <= 0.
NormalizedMap affine_normalize(const ScoreMap& map, double shift, double scale,
                               NormMethod method, double percentile) {
  NormalizedMap out = blank_like(map, method, percentile);
  if (!(scale > 0.0)) {
    out.degenerate = true;
    return out;
  }
  for (size_t i = 0; i < map.data.size(); ++i) {
    out.data[i] = to_unit((static_cast<double>(map.data[i]) - shift) / scale);
  }
  return out;
}

std::pair<double, double> min_max(const ScoreMap& map) {
  const auto [lo, hi] = std::minmax_element(map.data.begin(), map.data.end());
  return {*lo, *hi};
}

template <typename T>
double pct_impl(std::span<const T> values, Percentile p) {
  if (values.empty()) throw_invalid_argument("percentile of an empty collection");
  std::vector<double> sorted(values.begin(), values.end());
  const double rank = p.value() / 100.0 * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(rank));
  const size_t hi = static_cast<size_t>(std::ceil(rank));
  std::nth_element(sorted.begin(), sorted.begin() + lo, sorted.end());
  const double lo_value = sorted[lo];
  if (hi == lo) return lo_value;
  // Everything past `lo` is >= sorted[lo]; the next order statistic is their min.
  const double hi_value = *std::min_element(sorted.begin() + lo + 1, sorted.end());
  return lo_value + (rank - static_cast<double>(lo)) * (hi_value - lo_value);
}

}  // namespace

std::string_view to_string(NormMethod method) {
  switch (method) {
    case NormMethod::kMinMax: return "minmax";
    case NormMethod::kMax: return "max";
    case NormMethod::kPaS: return "pas";
    case NormMethod::kIvr: return "ivr";
  }
  return "unknown";
}

NormMethod parse_norm_method(std::string_view name) {
  if (name == "minmax") return NormMethod::kMinMax;
  if (name == "max") return NormMethod::kMax;
  if (name == "pas") return NormMethod::kPaS;
  if (name == "ivr") return NormMethod::kIvr;
  throw_invalid_argument(fmt::format("unknown normalization method '{}'", name));
}

Percentile::Percentile(double p) : p_(p) {
  if (!(p >= 0.0 && p <= 100.0)) {
    throw_invalid_argument(fmt::format("percentile {} outside [0, 100]", p));
  }
}

double pct(std::span<const double> values, Percentile p) { return pct_impl(values, p); }
double pct(std::span<const float> values, Percentile p) { return pct_impl(values, p); }

NormalizedMap normalize_minmax(const ScoreMap& map) {
  validate(map);
  const auto [lo, hi] = min_max(map);
  return affine_normalize(map, lo, hi - lo, NormMethod::kMinMax, 0.0);
}

NormalizedMap normalize_max(const ScoreMap& map) {
  validate(map);
  const auto [lo, hi] = min_max(map);
  (void)lo;
  return affine_normalize(map, 0.0, hi, NormMethod::kMax, 0.0);
}

NormalizedMap normalize_pas(const ScoreMap& map, Percentile p) {
  validate(map);
  const auto [lo, hi] = min_max(map);
  (void)hi;
  std::vector<double> shifted(map.data.size());
  for (size_t i = 0; i < map.data.size(); ++i) {
    shifted[i] = static_cast<double>(map.data[i]) - lo;
  }
  const double scale = pct(std::span<const double>(shifted), p);
  NormalizedMap out = blank_like(map, NormMethod::kPaS, p.value());
  if (!(scale > 0.0)) {
    out.degenerate = true;
    return out;
  }
  for (size_t i = 0; i < shifted.size(); ++i) out.data[i] = to_unit(shifted[i] / scale);
  return out;
}

NormalizedMap normalize_ivr(const ScoreMap& map, Percentile p) {
  validate(map);
  const double floor_value = pct(std::span<const double>(map.data), p);
  const auto [lo, hi] = min_max(map);
  (void)lo;
  return affine_normalize(map, floor_value, hi - floor_value, NormMethod::kIvr, p.value());
}

NormalizedMap normalize(const ScoreMap& map, NormMethod method, double percentile) {
  switch (method) {
    case NormMethod::kMinMax: return normalize_minmax(map);
    case NormMethod::kMax: return normalize_max(map);
    case NormMethod::kPaS: return normalize_pas(map, Percentile(percentile));
    case NormMethod::kIvr: return normalize_ivr(map, Percentile(percentile));
  }
  throw_invalid_argument("unknown normalization method");
}

}  // namespace wsol

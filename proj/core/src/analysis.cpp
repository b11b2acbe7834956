#include "wsol/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "wsol/error.hpp"
#include "wsol/parallel.hpp"

namespace wsol {
namespace {

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_std(std::span<const double> v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

std::vector<ExtremaRecord> extrema_scatter(std::span<const ScoreMap> maps,
                                           std::span<const ImageBoxes> truth,
                                           NormMethod method, double percentile, double tau,
                                           double delta, Connectivity connectivity,
                                           int threads) {
  if (maps.empty()) throw_invalid_argument("extrema scatter of an empty dataset");
  if (maps.size() != truth.size()) {
    throw_invalid_data(fmt::format("{} maps but {} ground-truth entries", maps.size(),
                                   truth.size()));
  }
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw_invalid_argument(fmt::format("threshold {} outside [0, 1]", tau));
  }

  std::vector<BoxSample> samples(maps.size());
  std::vector<ExtremaRecord> records(maps.size());
  parallel_for(maps.size(), threads, [&](size_t i) {
    validate(maps[i]);
    const auto [lo, hi] = std::minmax_element(maps[i].data.begin(), maps[i].data.end());
    records[i].image_id = maps[i].image_id;
    records[i].min_value = *lo;
    records[i].max_value = *hi;
    samples[i].map = normalize(maps[i], method, percentile);
    samples[i].truth = truth[i];
  });
  const std::vector<bool> hits = box_hits(samples, tau, delta, connectivity, threads);
  for (size_t i = 0; i < records.size(); ++i) records[i].hit = hits[i];
  return records;
}

RatioStat std_ratio(std::span<const double> minima, std::span<const double> maxima) {
  if (minima.size() < 2 || minima.size() != maxima.size()) {
    throw_invalid_argument("std ratio needs at least two paired extrema");
  }
  RatioStat stat;
  stat.std_min = population_std(minima);
  stat.std_max = population_std(maxima);
  if (stat.std_min == 0.0) {
    stat.infinite = true;
    stat.ratio = std::numeric_limits<double>::infinity();
  } else {
    stat.ratio = stat.std_max / stat.std_min;
  }
  return stat;
}

RatioStat std_ratio(std::span<const ExtremaRecord> records) {
  std::vector<double> minima, maxima;
  minima.reserve(records.size());
  maxima.reserve(records.size());
  for (const auto& r : records) {
    minima.push_back(r.min_value);
    maxima.push_back(r.max_value);
  }
  return std_ratio(minima, maxima);
}

NormMethod recommend_norm(const RatioStat& stat, double cutoff) {
  if (stat.infinite || stat.ratio >= cutoff) return NormMethod::kMax;
  return NormMethod::kIvr;
}

double cross_config_variance(std::span<const double> scores, VarianceKind kind) {
  if (scores.size() < 2) throw_invalid_argument("variance needs at least two scores");
  const double m = mean(scores);
  double ss = 0.0;
  for (double x : scores) ss += (x - m) * (x - m);
  const double dof = kind == VarianceKind::kPopulation
                         ? static_cast<double>(scores.size())
                         : static_cast<double>(scores.size() - 1);
  return ss / dof;
}

std::vector<std::vector<double>> drops_from_top(
    const std::vector<std::vector<double>>& scores) {
  if (scores.empty()) return {};
  const size_t n_data = scores.front().size();
  for (const auto& row : scores) {
    if (row.size() != n_data) throw_invalid_argument("ragged score table");
  }
  auto out = scores;
  for (size_t d = 0; d < n_data; ++d) {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& row : scores) top = std::max(top, row[d]);
    for (auto& row : out) row[d] -= top;
  }
  return out;
}

std::string format_scatter_csv(std::span<const ExtremaRecord> records) {
  std::string out = "image_id,min,max,hit\n";
  for (const auto& r : records) {
    out += fmt::format("{},{:.9g},{:.9g},{}\n", r.image_id, r.min_value, r.max_value,
                       r.hit ? 1 : 0);
  }
  return out;
}

}  // namespace wsol

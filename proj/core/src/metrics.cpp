#include "wsol/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "wsol/error.hpp"
#include "wsol/parallel.hpp"

namespace wsol {
namespace {

void validate_deltas(const std::vector<double>& deltas) {
  if (deltas.empty()) throw_invalid_argument("at least one IoU threshold is required");
  for (double d : deltas) {
    if (!(d > 0.0 && d <= 1.0)) {
      throw_invalid_argument(fmt::format("IoU threshold {} outside (0, 1]", d));
    }
  }
}

void validate_normalized(const NormalizedMap& map) {
  if (map.width < 1 || map.height < 1 ||
      map.data.size() != static_cast<size_t>(map.width) * map.height) {
    throw_invalid_data(fmt::format("normalized map '{}' has inconsistent size", map.image_id));
  }
  for (size_t i = 0; i < map.data.size(); ++i) {
    const float v = map.data[i];
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw_invalid_data(fmt::format("normalized map '{}' value {} at {} outside [0, 1]",
                                     map.image_id, v, i));
    }
  }
}

// Best IoU per grid threshold for one image.
std::vector<double> best_iou_curve(const NormalizedMap& map, const BoxSet& truth,
                                   const std::vector<double>& thresholds,
                                   Connectivity connectivity) {
  std::vector<float> sorted = map.data;
  std::sort(sorted.begin(), sorted.end());
  BoxExtractor extractor;
  std::vector<double> out(thresholds.size(), 0.0);
  size_t previous_count = sorted.size() + 1;
  double previous_best = 0.0;
  for (size_t l = 0; l < thresholds.size(); ++l) {
    const double tau = thresholds[l];
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), tau,
                                        [](float v, double t) { return v < t; });
    const size_t count = static_cast<size_t>(sorted.end() - first);
    // Masks are nested in tau, so an unchanged pixel count means the same mask.
    if (count != previous_count) {
      double best = 0.0;
      if (count > 0) {
        for (const Box& est : extractor.extract(map, tau, connectivity)) {
          for (const Box& gt : truth) best = std::max(best, iou(est, gt));
        }
      }
      previous_best = best;
      previous_count = count;
    }
    out[l] = previous_best;
  }
  return out;
}

}  // namespace

ThresholdGrid::ThresholdGrid(int count) : count_(count) {
  if (count < 2) throw_invalid_argument(fmt::format("threshold grid needs >= 2 points, got {}", count));
}

std::vector<double> ThresholdGrid::thresholds() const {
  std::vector<double> out(count_);
  for (int l = 0; l < count_; ++l) out[l] = tau(l);
  return out;
}

void validate_box_dataset(std::span<const BoxSample> dataset) {
  for (const BoxSample& s : dataset) {
    validate_normalized(s.map);
    const ImageBoxes& t = s.truth;
    if (t.width < 1 || t.height < 1) {
      throw_invalid_data(fmt::format("image '{}' has invalid size {}x{}", t.image_id,
                                     t.width, t.height));
    }
    if (t.boxes.empty()) {
      throw_invalid_data(fmt::format("image '{}' has no ground-truth box", t.image_id));
    }
    for (const Box& b : t.boxes) {
      if (!b.valid() || b.x0 < 0 || b.y0 < 0 || b.x1 > t.width || b.y1 > t.height) {
        throw_invalid_data(fmt::format("image '{}' box ({}, {}, {}, {}) invalid for {}x{}",
                                       t.image_id, b.x0, b.y0, b.x1, b.y1, t.width,
                                       t.height));
      }
    }
  }
}

NormalizedMap at_resolution(const NormalizedMap& map, int width, int height) {
  if (map.width == width && map.height == height) return map;
  return resize_bilinear(map, width, height);
}

double best_iou(const NormalizedMap& map, const BoxSet& truth, double tau,
                Connectivity connectivity) {
  double best = 0.0;
  for (const Box& est : boxes_from_mask(threshold_mask(map, tau), connectivity)) {
    for (const Box& gt : truth) best = std::max(best, iou(est, gt));
  }
  return best;
}

std::vector<bool> box_hits(std::span<const BoxSample> dataset, double tau, double delta,
                           Connectivity connectivity, int threads) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw_invalid_argument(fmt::format("threshold {} outside [0, 1]", tau));
  }
  validate_deltas({delta});
  validate_box_dataset(dataset);
  std::vector<uint8_t> hit(dataset.size(), 0);
  parallel_for(dataset.size(), threads, [&](size_t i) {
    const BoxSample& s = dataset[i];
    const NormalizedMap map = at_resolution(s.map, s.truth.width, s.truth.height);
    hit[i] = best_iou(map, s.truth.boxes, tau, connectivity) >= delta ? 1 : 0;
  });
  return {hit.begin(), hit.end()};
}

double box_acc(std::span<const BoxSample> dataset, double tau, double delta,
               Connectivity connectivity, int threads) {
  if (dataset.empty()) throw_invalid_argument("box accuracy of an empty dataset");
  const std::vector<bool> hits = box_hits(dataset, tau, delta, connectivity, threads);
  const int64_t count = std::count(hits.begin(), hits.end(), true);
  return static_cast<double>(count) / static_cast<double>(hits.size());
}

EvalReport max_box_acc_v2(std::span<const BoxSample> dataset, const BoxEvalConfig& config) {
  if (dataset.empty()) throw_invalid_argument("MaxBoxAccV2 of an empty dataset");
  validate_deltas(config.deltas);
  validate_box_dataset(dataset);

  const std::vector<double> thresholds = config.grid.thresholds();
  const size_t n_delta = config.deltas.size();
  const size_t n_tau = thresholds.size();

  // hit[i][d * n_tau + l]
  std::vector<std::vector<uint8_t>> hit(dataset.size());
  parallel_for(dataset.size(), config.threads, [&](size_t i) {
    const BoxSample& s = dataset[i];
    const NormalizedMap map = at_resolution(s.map, s.truth.width, s.truth.height);
    const std::vector<double> best =
        best_iou_curve(map, s.truth.boxes, thresholds, config.connectivity);
    std::vector<uint8_t>& row = hit[i];
    row.assign(n_delta * n_tau, 0);
    for (size_t d = 0; d < n_delta; ++d) {
      for (size_t l = 0; l < n_tau; ++l) {
        row[d * n_tau + l] = best[l] >= config.deltas[d] ? 1 : 0;
      }
    }
  });

  EvalReport report;
  report.images = static_cast<int64_t>(dataset.size());
  report.thresholds = thresholds;
  report.connectivity = config.connectivity;
  report.grid_count = config.grid.count();
  report.method = std::string(to_string(dataset.front().map.method));
  const NormMethod m = dataset.front().map.method;
  if (m == NormMethod::kPaS || m == NormMethod::kIvr) {
    report.percentile = dataset.front().map.percentile;
  }
  for (const BoxSample& s : dataset) report.degenerate_maps += s.map.degenerate ? 1 : 0;

  double sum = 0.0;
  for (size_t d = 0; d < n_delta; ++d) {
    DeltaCurve curve;
    curve.delta = config.deltas[d];
    curve.hits.assign(n_tau, 0);
    for (const auto& row : hit) {
      for (size_t l = 0; l < n_tau; ++l) curve.hits[l] += row[d * n_tau + l];
    }
    const auto best = std::max_element(curve.hits.begin(), curve.hits.end());
    curve.best_index = static_cast<int>(best - curve.hits.begin());
    curve.best_tau = thresholds[curve.best_index];
    curve.best_accuracy = static_cast<double>(*best) / static_cast<double>(report.images);
    sum += curve.best_accuracy;
    report.curves.push_back(std::move(curve));
  }
  report.max_box_acc_v2 = sum / static_cast<double>(n_delta);
  return report;
}

double PrCurve::precision(size_t l) const {
  const int64_t predicted = true_positives[l] + false_positives[l];
  if (predicted == 0) return 1.0;
  return static_cast<double>(true_positives[l]) / static_cast<double>(predicted);
}

double PrCurve::recall(size_t l) const {
  return static_cast<double>(true_positives[l]) / static_cast<double>(foreground);
}

double PrCurve::average_precision() const {
  double ap = 0.0;
  for (size_t l = 0; l < thresholds.size(); ++l) {
    const double next = l + 1 < thresholds.size() ? recall(l + 1) : 0.0;
    ap += precision(l) * (recall(l) - next);
  }
  return ap;
}

PrCurve pr_curve(std::span<const MaskSample> dataset, const PxapConfig& config) {
  if (dataset.empty()) throw_invalid_argument("PxAP of an empty dataset");

  std::vector<NormalizedMap> maps(dataset.size());
  for (size_t i = 0; i < dataset.size(); ++i) {
    const MaskSample& s = dataset[i];
    validate_normalized(s.map);
    const PixelMask& m = s.mask;
    if (m.width < 1 || m.height < 1 ||
        m.labels.size() != static_cast<size_t>(m.width) * m.height) {
      throw_invalid_data(fmt::format("mask '{}' has inconsistent size", m.image_id));
    }
    for (size_t p = 0; p < m.labels.size(); ++p) {
      const uint8_t v = m.labels[p];
      if (v != kMaskBackground && v != kMaskForeground && v != kMaskIgnore) {
        throw_invalid_data(fmt::format("mask '{}' has illegal label {} at {}", m.image_id,
                                       static_cast<int>(v), p));
      }
    }
  }
  parallel_for(dataset.size(), config.threads, [&](size_t i) {
    maps[i] = at_resolution(dataset[i].map, dataset[i].mask.width, dataset[i].mask.height);
  });

  PrCurve curve;
  if (config.mode == PxapMode::kGrid) {
    curve.thresholds = config.grid.thresholds();
  } else {
    for (size_t i = 0; i < dataset.size(); ++i) {
      const auto& labels = dataset[i].mask.labels;
      for (size_t p = 0; p < labels.size(); ++p) {
        if (labels[p] != kMaskIgnore) curve.thresholds.push_back(maps[i].data[p]);
      }
    }
    std::sort(curve.thresholds.begin(), curve.thresholds.end());
    curve.thresholds.erase(std::unique(curve.thresholds.begin(), curve.thresholds.end()),
                           curve.thresholds.end());
  }
  const size_t n_tau = curve.thresholds.size();

  // Per-image histograms over "largest threshold <= score".
  std::vector<std::vector<int64_t>> fg(dataset.size()), bg(dataset.size());
  parallel_for(dataset.size(), config.threads, [&](size_t i) {
    fg[i].assign(n_tau, 0);
    bg[i].assign(n_tau, 0);
    const auto& labels = dataset[i].mask.labels;
    const auto& values = maps[i].data;
    for (size_t p = 0; p < labels.size(); ++p) {
      if (labels[p] == kMaskIgnore) continue;
      const double s = values[p];
      // Scores are >= 0 = tau_0 in grid mode and are themselves thresholds in
      // exact mode, so the bin always exists.
      const auto it = std::upper_bound(curve.thresholds.begin(), curve.thresholds.end(), s);
      const size_t bin = static_cast<size_t>(it - curve.thresholds.begin()) - 1;
      (labels[p] == kMaskForeground ? fg[i] : bg[i])[bin] += 1;
    }
  });

  std::vector<int64_t> fg_total(n_tau, 0), bg_total(n_tau, 0);
  for (size_t i = 0; i < dataset.size(); ++i) {
    for (size_t l = 0; l < n_tau; ++l) {
      fg_total[l] += fg[i][l];
      bg_total[l] += bg[i][l];
    }
  }
  curve.true_positives.assign(n_tau, 0);
  curve.false_positives.assign(n_tau, 0);
  int64_t tp = 0, fp = 0;
  for (size_t l = n_tau; l-- > 0;) {
    tp += fg_total[l];
    fp += bg_total[l];
    curve.true_positives[l] = tp;
    curve.false_positives[l] = fp;
  }
  curve.foreground = tp;
  if (curve.foreground == 0) throw_invalid_data("no foreground pixel in any mask");
  return curve;
}

double pxap(std::span<const MaskSample> dataset, const PxapConfig& config) {
  return pr_curve(dataset, config).average_precision();
}

std::string format_report_text(const EvalReport& report) {
  std::string out;
  out += fmt::format("method,{}\n", report.method);
  out += report.percentile ? fmt::format("percentile,{:.6f}\n", *report.percentile)
                           : std::string("percentile,-\n");
  out += fmt::format("connectivity,{}\n", static_cast<int>(report.connectivity));
  out += fmt::format("grid,{}\n", report.grid_count);
  out += fmt::format("images,{}\n", report.images);
  out += fmt::format("degenerate_maps,{}\n", report.degenerate_maps);
  for (const DeltaCurve& c : report.curves) {
    out += fmt::format("tau_star,{:.2f},{:.6f}\n", c.delta, c.best_tau);
    out += fmt::format("box_acc,{:.2f},{:.6f}\n", c.delta, c.best_accuracy);
  }
  out += fmt::format("MaxBoxAccV2,{:.6f}\n", report.max_box_acc_v2);
  if (report.pxap) out += fmt::format("PxAP,{:.6f}\n", *report.pxap);
  return out;
}

std::string format_report_csv(const EvalReport& report) {
  std::string out = "delta,tau,hits,images,box_acc\n";
  for (size_t d = 0; d < report.curves.size(); ++d) {
    const DeltaCurve& c = report.curves[d];
    for (size_t l = 0; l < c.hits.size(); ++l) {
      out += fmt::format("{:.2f},{:.6f},{},{},{:.6f}\n", c.delta, report.thresholds[l],
                         c.hits[l], report.images, report.accuracy(d, l));
    }
  }
  return out;
}

std::string format_pr_curve_csv(const PrCurve& curve) {
  std::string out = "threshold,true_positives,false_positives,precision,recall\n";
  for (size_t l = 0; l < curve.thresholds.size(); ++l) {
    out += fmt::format("{:.9g},{},{},{:.9f},{:.9f}\n", curve.thresholds[l],
                       curve.true_positives[l], curve.false_positives[l],
                       curve.precision(l), curve.recall(l));
  }
  return out;
}

}  // namespace wsol

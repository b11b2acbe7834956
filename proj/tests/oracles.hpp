#pragma once

// Slow, independent reference implementations used by the unit and
// acceptance tests. None of these call into the library's algorithms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "wsol/cam.hpp"
#include "wsol/localize.hpp"
#include "wsol/metrics.hpp"
#include "wsol/normalize.hpp"

namespace wsol::testing {

inline ScoreMap random_map(std::mt19937_64& rng, int w, int h, double lo = -1.0,
                           double hi = 1.0, std::string id = "img") {
  std::uniform_real_distribution<double> u(lo, hi);
  ScoreMap m;
  m.image_id = std::move(id);
  m.width = w;
  m.height = h;
  m.data.resize(static_cast<size_t>(w) * h);
  for (double& v : m.data) v = u(rng);
  return m;
}

inline NormalizedMap unit_map(int w, int h, std::vector<float> data, std::string id = "img") {
  NormalizedMap m;
  m.image_id = std::move(id);
  m.width = w;
  m.height = h;
  m.data = std::move(data);
  return m;
}

// out[x,y] = sum_i w_i f_i[x,y] / K, straight loops.
inline std::vector<double> cam_oracle(const FeatureTensor& f, const ClassWeights& w) {
  std::vector<double> out(static_cast<size_t>(f.width) * f.height, 0.0);
  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) {
      double s = 0.0;
      for (int i = 0; i < f.channels; ++i) s += w.weights[i] * static_cast<double>(f.at(i, x, y));
      out[static_cast<size_t>(y) * f.width + x] = s / f.channels;
    }
  }
  return out;
}

// Full sort then interpolate at rank (p/100)(n-1).
inline double pct_oracle(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double rank = p / 100.0 * static_cast<double>(v.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(rank));
  const size_t hi = static_cast<size_t>(std::ceil(rank));
  return v[lo] + (rank - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline std::vector<double> minmax_oracle(const ScoreMap& m) {
  double lo = m.data[0], hi = m.data[0];
  for (float v : m.data) lo = std::min<double>(lo, v);
  for (float v : m.data) hi = std::max<double>(hi, v);
  std::vector<double> out;
  for (float v : m.data) out.push_back(hi > lo ? (v - lo) / (hi - lo) : 0.0);
  return out;
}

// Union-find labelling of {value >= tau}; returns one tight box per region,
// sorted by (y0, x0, y1, x1) so results compare as sets.
inline BoxSet components_oracle(const std::vector<uint8_t>& bits, int w, int h, int conn) {
  std::vector<int> parent(bits.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  auto on = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < w && y < h && bits[static_cast<size_t>(y) * w + x];
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!on(x, y)) continue;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (conn == 4 && dx != 0 && dy != 0) continue;
          if (on(x + dx, y + dy)) parent[find(y * w + x)] = find((y + dy) * w + x + dx);
        }
      }
    }
  }
  std::vector<Box> by_root(bits.size(), Box{w, h, -1, -1});
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!on(x, y)) continue;
      Box& b = by_root[find(y * w + x)];
      b.x0 = std::min(b.x0, x);
      b.y0 = std::min(b.y0, y);
      b.x1 = std::max(b.x1, x + 1);
      b.y1 = std::max(b.y1, y + 1);
    }
  }
  BoxSet out;
  for (const Box& b : by_root) {
    if (b.x1 >= 0) out.push_back(b);
  }
  std::sort(out.begin(), out.end(), [](const Box& a, const Box& b) {
    return std::tie(a.y0, a.x0, a.y1, a.x1) < std::tie(b.y0, b.x0, b.y1, b.x1);
  });
  return out;
}

// IoU by counting pixels.
inline double iou_oracle(const Box& a, const Box& b) {
  const int x0 = std::min(a.x0, b.x0), x1 = std::max(a.x1, b.x1);
  const int y0 = std::min(a.y0, b.y0), y1 = std::max(a.y1, b.y1);
  int64_t inter = 0, uni = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const bool in_a = x >= a.x0 && x < a.x1 && y >= a.y0 && y < a.y1;
      const bool in_b = x >= b.x0 && x < b.x1 && y >= b.y0 && y < b.y1;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

inline double best_iou_oracle(const NormalizedMap& m, const BoxSet& truth, double tau, int conn) {
  std::vector<uint8_t> bits(m.data.size());
  for (size_t i = 0; i < bits.size(); ++i) bits[i] = static_cast<double>(m.data[i]) >= tau;
  double best = 0.0;
  for (const Box& est : components_oracle(bits, m.width, m.height, conn)) {
    for (const Box& gt : truth) best = std::max(best, iou_oracle(est, gt));
  }
  return best;
}

struct BoxAccOracle {
  std::vector<double> best_tau;
  std::vector<double> best_accuracy;
  double score = 0.0;
};

// Re-evaluates every grid threshold independently. Maps must already be at
// ground-truth resolution.
inline BoxAccOracle max_box_acc_v2_oracle(const std::vector<BoxSample>& data, int grid,
                                          const std::vector<double>& deltas, int conn) {
  std::vector<int64_t> best_hits(deltas.size(), -1);
  std::vector<double> best_tau(deltas.size(), 0.0);
  for (int l = 0; l < grid; ++l) {
    const double tau = static_cast<double>(l) / grid;
    std::vector<double> ious;
    for (const BoxSample& s : data) ious.push_back(best_iou_oracle(s.map, s.truth.boxes, tau, conn));
    for (size_t d = 0; d < deltas.size(); ++d) {
      int64_t hits = 0;
      for (double v : ious) hits += v >= deltas[d];
      if (hits > best_hits[d]) {
        best_hits[d] = hits;
        best_tau[d] = tau;
      }
    }
  }
  BoxAccOracle out;
  double sum = 0.0;
  for (size_t d = 0; d < deltas.size(); ++d) {
    const double acc = static_cast<double>(best_hits[d]) / static_cast<double>(data.size());
    out.best_tau.push_back(best_tau[d]);
    out.best_accuracy.push_back(acc);
    sum += acc;
  }
  out.score = sum / static_cast<double>(deltas.size());
  return out;
}

// Average precision by sorting pooled (score, label) pairs in descending
// score order and stepping through each group of tied scores.
inline double ap_oracle(const std::vector<MaskSample>& data) {
  std::vector<std::pair<double, bool>> px;
  for (const MaskSample& s : data) {
    for (size_t p = 0; p < s.mask.labels.size(); ++p) {
      if (s.mask.labels[p] == kMaskIgnore) continue;
      px.push_back({s.map.data[p], s.mask.labels[p] == kMaskForeground});
    }
  }
  std::sort(px.begin(), px.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  int64_t positives = 0;
  for (const auto& q : px) positives += q.second;
  double ap = 0.0, prev_recall = 0.0;
  int64_t tp = 0, fp = 0;
  for (size_t i = 0; i < px.size();) {
    size_t j = i;
    while (j < px.size() && px[j].first == px[i].first) {
      (px[j].second ? tp : fp) += 1;
      ++j;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    ap += static_cast<double>(tp) / static_cast<double>(tp + fp) * (recall - prev_recall);
    prev_recall = recall;
    i = j;
  }
  return ap;
}

}  // namespace wsol::testing

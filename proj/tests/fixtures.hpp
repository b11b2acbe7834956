#pragma once

// Seeded random datasets shared by the unit and acceptance tests.

#include <random>
#include <string>
#include <vector>

#include "wsol/metrics.hpp"
#include "wsol/normalize.hpp"

namespace wsol::testing {

inline Box random_box(std::mt19937_64& rng, int w, int h) {
  std::uniform_int_distribution<int> ux(0, w - 1), uy(0, h - 1);
  int x0 = ux(rng), x1 = ux(rng), y0 = uy(rng), y1 = uy(rng);
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  return Box{x0, y0, x1 + 1, y1 + 1};
}

// A few raised rectangles over noise, min-max normalized so the map covers
// [0, 1] and thresholds cut out blobs of several shapes.
inline ScoreMap blob_map(std::mt19937_64& rng, int w, int h, const std::string& id) {
  std::uniform_real_distribution<double> noise(0.0, 0.3), height(0.3, 1.0);
  std::uniform_int_distribution<int> blobs(1, 3);
  std::vector<double> v(static_cast<size_t>(w) * h);
  for (double& x : v) x = noise(rng);
  for (int b = blobs(rng); b > 0; --b) {
    const Box box = random_box(rng, w, h);
    const double lift = height(rng);
    for (int y = box.y0; y < box.y1; ++y) {
      for (int x = box.x0; x < box.x1; ++x) v[static_cast<size_t>(y) * w + x] += lift;
    }
  }
  ScoreMap m{id, w, h, v};
  return m;
}

inline std::vector<BoxSample> tiny_box_dataset(std::mt19937_64& rng, int images, int w, int h) {
  std::uniform_int_distribution<int> gts(1, 2);
  std::vector<BoxSample> out;
  for (int i = 0; i < images; ++i) {
    const std::string id = "img" + std::to_string(i);
    BoxSample s;
    s.map = normalize_minmax(blob_map(rng, w, h, id));
    s.truth = ImageBoxes{id, w, h, {}};
    for (int g = gts(rng); g > 0; --g) s.truth.boxes.push_back(random_box(rng, w, h));
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<MaskSample> tiny_mask_dataset(std::mt19937_64& rng, int images, int w, int h) {
  std::uniform_int_distribution<int> label(0, 9);
  std::uniform_real_distribution<double> jitter(-0.4, 0.4);
  std::vector<MaskSample> out;
  for (int i = 0; i < images; ++i) {
    const std::string id = "img" + std::to_string(i);
    MaskSample s;
    s.map = normalize_minmax(blob_map(rng, w, h, id));
    s.mask = PixelMask{id, w, h, std::vector<uint8_t>(static_cast<size_t>(w) * h)};
    for (size_t p = 0; p < s.mask.labels.size(); ++p) {
      // Foreground mostly where the map is high, with label noise and some
      // ignore pixels.
      const int r = label(rng);
      if (r == 0) {
        s.mask.labels[p] = kMaskIgnore;
      } else {
        s.mask.labels[p] = s.map.data[p] + jitter(rng) > 0.5 ? kMaskForeground : kMaskBackground;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

// Indicator of `box` scaled to `value`.
inline NormalizedMap indicator(const std::string& id, int w, int h, const Box& box,
                               float value = 1.0f) {
  NormalizedMap m;
  m.image_id = id;
  m.width = w;
  m.height = h;
  m.data.assign(static_cast<size_t>(w) * h, 0.0f);
  for (int y = box.y0; y < box.y1; ++y) {
    for (int x = box.x0; x < box.x1; ++x) m.data[static_cast<size_t>(y) * w + x] = value;
  }
  return m;
}

}  // namespace wsol::testing

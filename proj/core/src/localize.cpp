#include "wsol/localize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "wsol/error.hpp"

namespace wsol {
namespace {

constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

int neighbour_count(Connectivity connectivity) {
  return connectivity == Connectivity::kFour ? 4 : 8;
}

bool bounds_before(const Box& a, const Box& b) {
  if (a.y0 != b.y0) return a.y0 < b.y0;
  return a.x0 < b.x0;
}

// Flood fill from every unlabeled set pixel in raster order. `on_pixel` gets
// (component index, x, y). Returns the bounds of each component in discovery
// order.
template <typename IsSet, typename OnPixel>
BoxSet label_components(int width, int height, Connectivity connectivity,
                        IsSet&& is_set, OnPixel&& on_pixel,
                        std::vector<int32_t>& label, std::vector<int32_t>& stack) {
  const size_t n = static_cast<size_t>(width) * height;
  label.assign(n, -1);
  stack.clear();
  const int neighbours = neighbour_count(connectivity);
  BoxSet bounds;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const size_t seed = static_cast<size_t>(y) * width + x;
      if (label[seed] >= 0 || !is_set(seed)) continue;
      const int32_t id = static_cast<int32_t>(bounds.size());
      Box box{x, y, x + 1, y + 1};
      label[seed] = id;
      stack.push_back(static_cast<int32_t>(seed));
      while (!stack.empty()) {
        const int32_t p = stack.back();
        stack.pop_back();
        const int px = p % width;
        const int py = p / width;
        on_pixel(id, px, py);
        box.x0 = std::min(box.x0, px);
        box.y0 = std::min(box.y0, py);
        box.x1 = std::max(box.x1, px + 1);
        box.y1 = std::max(box.y1, py + 1);
        for (int k = 0; k < neighbours; ++k) {
          const int nx = px + kDx[k];
          const int ny = py + kDy[k];
          if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
          const size_t q = static_cast<size_t>(ny) * width + nx;
          if (label[q] >= 0 || !is_set(q)) continue;
          label[q] = id;
          stack.push_back(static_cast<int32_t>(q));
        }
      }
      bounds.push_back(box);
    }
  }
  return bounds;
}

// Discovery order is already raster order of first pixels; a stable sort on
// (y0, x0) gives the documented ordering.
std::vector<size_t> component_order(const BoxSet& bounds) {
  std::vector<size_t> order(bounds.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return bounds_before(bounds[a], bounds[b]);
  });
  return order;
}

}  // namespace

Connectivity connectivity_from_int(int n) {
  if (n == 4) return Connectivity::kFour;
  if (n == 8) return Connectivity::kEight;
  throw_invalid_argument(fmt::format("connectivity must be 4 or 8, got {}", n));
}

NormalizedMap resize_bilinear(const NormalizedMap& map, int target_width,
                              int target_height) {
  if (target_width < 1 || target_height < 1) {
    throw_invalid_argument(
        fmt::format("resize target {}x{} is empty", target_width, target_height));
  }
  if (target_width == map.width && target_height == map.height) return map;

  NormalizedMap out = map;
  out.width = target_width;
  out.height = target_height;
  out.data.assign(static_cast<size_t>(target_width) * target_height, 0.0f);

  const double sx = target_width > 1
                        ? static_cast<double>(map.width - 1) / (target_width - 1)
                        : 0.0;
  const double sy = target_height > 1
                        ? static_cast<double>(map.height - 1) / (target_height - 1)
                        : 0.0;
  for (int j = 0; j < target_height; ++j) {
    const double fy = j * sy;
    const int y0 = std::min(static_cast<int>(std::floor(fy)), map.height - 1);
    const int y1 = std::min(y0 + 1, map.height - 1);
    const double wy = fy - y0;
    for (int i = 0; i < target_width; ++i) {
      const double fx = i * sx;
      const int x0 = std::min(static_cast<int>(std::floor(fx)), map.width - 1);
      const int x1 = std::min(x0 + 1, map.width - 1);
      const double wx = fx - x0;
      const double top = (1.0 - wx) * map.at(x0, y0) + wx * map.at(x1, y0);
      const double bottom = (1.0 - wx) * map.at(x0, y1) + wx * map.at(x1, y1);
      const double v = (1.0 - wy) * top + wy * bottom;
      out.data[static_cast<size_t>(j) * target_width + i] =
          static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return out;
}

BinaryMask threshold_mask(const NormalizedMap& map, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw_invalid_argument(fmt::format("threshold {} outside [0, 1]", tau));
  }
  BinaryMask mask;
  mask.width = map.width;
  mask.height = map.height;
  mask.bits.resize(map.data.size());
  for (size_t i = 0; i < map.data.size(); ++i) {
    mask.bits[i] = static_cast<double>(map.data[i]) >= tau ? 1 : 0;
  }
  return mask;
}

std::vector<Component> connected_components(const BinaryMask& mask,
                                            Connectivity connectivity) {
  std::vector<int32_t> label;
  std::vector<int32_t> stack;
  std::vector<std::vector<Pixel>> pixels;
  const BoxSet bounds = label_components(
      mask.width, mask.height, connectivity,
      [&](size_t i) { return mask.bits[i] != 0; },
      [&](int32_t id, int x, int y) {
        if (static_cast<size_t>(id) >= pixels.size()) pixels.resize(id + 1);
        pixels[id].push_back({x, y});
      },
      label, stack);

  std::vector<Component> out;
  out.reserve(bounds.size());
  for (size_t idx : component_order(bounds)) {
    Component c;
    c.pixels = std::move(pixels[idx]);
    std::sort(c.pixels.begin(), c.pixels.end(), [](const Pixel& a, const Pixel& b) {
      return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    c.bounds = bounds[idx];
    out.push_back(std::move(c));
  }
  return out;
}

BoxSet boxes_from_mask(const BinaryMask& mask, Connectivity connectivity) {
  std::vector<int32_t> label;
  std::vector<int32_t> stack;
  const BoxSet bounds = label_components(
      mask.width, mask.height, connectivity,
      [&](size_t i) { return mask.bits[i] != 0; }, [](int32_t, int, int) {}, label,
      stack);
  BoxSet out;
  out.reserve(bounds.size());
  for (size_t idx : component_order(bounds)) out.push_back(bounds[idx]);
  return out;
}

double iou(const Box& a, const Box& b) {
  const int64_t iw = std::max(0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const int64_t ih = std::max(0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const int64_t inter = iw * ih;
  const int64_t uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

const BoxSet& BoxExtractor::extract(const NormalizedMap& map, double tau,
                                    Connectivity connectivity) {
  const float* values = map.data.data();
  const BoxSet bounds = label_components(
      map.width, map.height, connectivity,
      [&](size_t i) { return static_cast<double>(values[i]) >= tau; },
      [](int32_t, int, int) {}, label_, stack_);
  boxes_.clear();
  for (size_t idx : component_order(bounds)) boxes_.push_back(bounds[idx]);
  return boxes_;
}

}  // namespace wsol

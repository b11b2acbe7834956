#pragma once

#include <cstdint>
#include <vector>

#include "wsol/normalize.hpp"

namespace wsol {

// Half-open pixel box [x0, x1) x [y0, y1).
struct Box {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  int64_t area() const { return static_cast<int64_t>(width()) * height(); }
  bool valid() const { return x0 < x1 && y0 < y1; }

  friend bool operator==(const Box&, const Box&) = default;
};

using BoxSet = std::vector<Box>;

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> bits;  // 0 or 1, row-major

  bool at(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
};

enum class Connectivity { kFour = 4, kEight = 8 };

// Throws Error(kInvalidArgument) unless n is 4 or 8.
Connectivity connectivity_from_int(int n);

struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

struct Component {
  std::vector<Pixel> pixels;  // raster order
  Box bounds;
};

// Bilinear resampling with corner-aligned sampling: target pixel (i, j) reads
// the source at (i * (sw - 1) / (tw - 1), j * (sh - 1) / (th - 1)).
NormalizedMap resize_bilinear(const NormalizedMap& map, int target_width,
                              int target_height);

// bit = value >= tau.
BinaryMask threshold_mask(const NormalizedMap& map, double tau);

// Maximal connected regions of set bits, ordered by (min y, min x) of their
// bounds and then by first pixel in raster order.
std::vector<Component> connected_components(const BinaryMask& mask,
                                            Connectivity connectivity);

// One tight box per component, in component order.
BoxSet boxes_from_mask(const BinaryMask& mask, Connectivity connectivity);

double iou(const Box& a, const Box& b);

// Reusable scratch for repeated box extraction on the same image size. Only
// computes bounds, not pixel lists.
class BoxExtractor {
 public:
  BoxExtractor() = default;

  // Boxes of the components of {value >= tau}, same order as boxes_from_mask.
  const BoxSet& extract(const NormalizedMap& map, double tau, Connectivity connectivity);

 private:
  std::vector<int32_t> label_;
  std::vector<int32_t> stack_;
  BoxSet boxes_;
};

}  // namespace wsol

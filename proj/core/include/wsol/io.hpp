#pragma once

// File formats
//
// Raster (.f32): width*height*channels little-endian IEEE-754 binary32
//   values, no header. Channel-major outermost, then rows, then columns:
//   offset(c, y, x) = 4 * ((c * height + y) * width + x).
//   Example: a 2x1x1 raster [1.0, -0.5] is the 8 bytes
//   00 00 80 3f 00 00 00 bf.
//
// Bundle index (.tsv): one line per record,
//   image_id \t width \t height \t channels \t relative_path
//   where relative_path is resolved against the index file's directory.
//
// Boxes (.tsv): one line per box, several lines per image allowed,
//   image_id \t x0 \t y0 \t x1 \t y1      (half-open pixel box)
//   Fields may be separated by any run of spaces or tabs.
//
// Image sizes (.tsv): image_id \t width \t height
//
// Mask (.u8): width*height bytes, row-major, each 0 (background),
//   1 (foreground) or 255 (ignore).
//
// Blank lines and lines starting with '#' are skipped in text files.

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wsol/cam.hpp"
#include "wsol/metrics.hpp"
#include "wsol/normalize.hpp"

namespace wsol::io {

namespace fs = std::filesystem;

// Throws Error(kIo) when unreadable, Error(kInvalidData) on a length mismatch
// or a non-finite value (the message names its index and byte offset).
std::vector<float> load_raster(const fs::path& path, int width, int height, int channels);
void store_raster(const fs::path& path, std::span<const float> values);

FeatureTensor load_feature_tensor(const fs::path& path, int width, int height, int channels);
ScoreMap load_score_map(const fs::path& path, int width, int height, std::string image_id);
// K weights stored as a 1x1xK raster.
ClassWeights load_class_weights(const fs::path& path, int channels, int class_id);

struct BundleEntry {
  std::string image_id;
  int width = 0;
  int height = 0;
  int channels = 1;
  std::string relative_path;
};

struct Bundle {
  fs::path root;  // directory of the index file
  std::vector<BundleEntry> entries;

  fs::path resolve(const BundleEntry& e) const { return root / e.relative_path; }
};

Bundle load_bundle(const fs::path& index_path);
void store_bundle_index(const fs::path& index_path, std::span<const BundleEntry> entries);

// Single-channel rasters of a bundle as score maps.
std::vector<ScoreMap> load_score_maps(const Bundle& bundle);
// Normalized rasters; values must lie in [0, 1]. A map with no non-zero value
// is flagged degenerate, which is the only way a normalizer produces it.
std::vector<NormalizedMap> load_normalized_maps(const Bundle& bundle);
std::vector<FeatureTensor> load_feature_tensors(const Bundle& bundle);

// Writes <dir>/<index_name> plus one raster per map under <dir>/<subdir>/.
void store_score_maps(const fs::path& dir, const std::string& index_name,
                      const std::string& subdir, std::span<const ScoreMap> maps);
void store_normalized_maps(const fs::path& dir, const std::string& index_name,
                           const std::string& subdir, std::span<const NormalizedMap> maps);

// Widths and heights are left 0; attach them with attach_sizes.
GroundTruthBoxes load_boxes(const fs::path& path);
GroundTruthBoxes parse_boxes(const std::string& text);
std::string format_boxes(const GroundTruthBoxes& boxes);
void store_boxes(const fs::path& path, const GroundTruthBoxes& boxes);

using ImageSizes = std::map<std::string, std::pair<int, int>>;
ImageSizes load_image_sizes(const fs::path& path);
void store_image_sizes(const fs::path& path, const ImageSizes& sizes);

// Fills width/height of every GT entry from `sizes`; an id missing from
// `sizes` is an Error(kInvalidData).
void attach_sizes(GroundTruthBoxes& boxes, const ImageSizes& sizes);

// Throws Error(kInvalidData) on an illegal label byte (message names the offset).
PixelMask load_mask(const fs::path& path, int width, int height, std::string image_id = {});
void store_mask(const fs::path& path, const PixelMask& mask);
std::vector<PixelMask> load_masks(const Bundle& bundle);
void store_masks(const fs::path& dir, const std::string& index_name,
                 const std::string& subdir, std::span<const PixelMask> masks);

// Binary 8-bit PGM (P5) with values round(255 * v).
void store_pgm(const fs::path& path, const NormalizedMap& map);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace wsol::io

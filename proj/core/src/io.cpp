#include "wsol/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>

#include "wsol/error.hpp"

namespace wsol::io {
namespace {

std::vector<char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io(fmt::format("cannot open '{}'", path.string()));
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw_io(fmt::format("error reading '{}'", path.string()));
  return bytes;
}

void write_bytes(const fs::path& path, const char* data, size_t size) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io(fmt::format("cannot create '{}'", path.string()));
  out.write(data, static_cast<std::streamsize>(size));
  if (!out) throw_io(fmt::format("error writing '{}'", path.string()));
}

// Lines with their 1-based numbers, skipping blanks and '#' comments.
std::vector<std::pair<int, std::string>> content_lines(const std::string& text) {
  std::vector<std::pair<int, std::string>> lines;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    lines.emplace_back(number, line);
  }
  return lines;
}

std::vector<std::string> split_whitespace(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string f;
  while (in >> f) fields.push_back(f);
  return fields;
}

std::vector<std::string> split_tabs(const std::string& line, size_t max_fields) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (fields.size() + 1 < max_fields) {
    const size_t pos = line.find('\t', start);
    if (pos == std::string::npos) break;
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  fields.push_back(line.substr(start));
  return fields;
}

int parse_int(const std::string& field, const std::string& what, const fs::path& source,
              int line) {
  int value = 0;
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw_invalid_data(fmt::format("{}:{}: {} '{}' is not an integer", source.string(), line,
                                   what, field));
  }
  return value;
}

void put_le32(char* out, uint32_t v) {
  out[0] = static_cast<char>(v & 0xff);
  out[1] = static_cast<char>((v >> 8) & 0xff);
  out[2] = static_cast<char>((v >> 16) & 0xff);
  out[3] = static_cast<char>((v >> 24) & 0xff);
}

uint32_t get_le32(const char* in) {
  const auto* b = reinterpret_cast<const unsigned char*>(in);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

std::string raster_name(size_t index, const std::string& extension) {
  return fmt::format("{:06d}{}", index, extension);
}

}  // namespace

std::vector<float> load_raster(const fs::path& path, int width, int height, int channels) {
  if (width < 1 || height < 1 || channels < 1) {
    throw_invalid_argument(fmt::format("raster '{}' has invalid shape {}x{}x{}", path.string(),
                                       width, height, channels));
  }
  const std::vector<char> bytes = read_bytes(path);
  const size_t count = static_cast<size_t>(width) * height * channels;
  if (bytes.size() != 4 * count) {
    throw_invalid_data(fmt::format("raster '{}' has {} bytes, expected {} for {}x{}x{}",
                                   path.string(), bytes.size(), 4 * count, width, height,
                                   channels));
  }
  std::vector<float> values(count);
  for (size_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<float>(get_le32(bytes.data() + 4 * i));
    if (!std::isfinite(values[i])) {
      throw_invalid_data(fmt::format("raster '{}' value {} (byte offset {}) is not finite",
                                     path.string(), i, 4 * i));
    }
  }
  return values;
}

void store_raster(const fs::path& path, std::span<const float> values) {
  std::vector<char> bytes(4 * values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    put_le32(bytes.data() + 4 * i, std::bit_cast<uint32_t>(values[i]));
  }
  write_bytes(path, bytes.data(), bytes.size());
}

FeatureTensor load_feature_tensor(const fs::path& path, int width, int height, int channels) {
  FeatureTensor t;
  t.width = width;
  t.height = height;
  t.channels = channels;
  t.data = load_raster(path, width, height, channels);
  return t;
}

ScoreMap load_score_map(const fs::path& path, int width, int height, std::string image_id) {
  ScoreMap m;
  m.image_id = std::move(image_id);
  m.width = width;
  m.height = height;
  const std::vector<float> raw = load_raster(path, width, height, 1);
  m.data.assign(raw.begin(), raw.end());
  return m;
}

ClassWeights load_class_weights(const fs::path& path, int channels, int class_id) {
  const std::vector<float> raw = load_raster(path, 1, 1, channels);
  ClassWeights w;
  w.class_id = class_id;
  w.weights.assign(raw.begin(), raw.end());
  return w;
}

Bundle load_bundle(const fs::path& index_path) {
  Bundle bundle;
  bundle.root = index_path.parent_path();
  for (const auto& [line_no, line] : content_lines(read_text(index_path))) {
    const auto f = split_tabs(line, 5);
    if (f.size() != 5 || f[4].empty()) {
      throw_invalid_data(fmt::format("{}:{}: expected 5 tab-separated fields",
                                     index_path.string(), line_no));
    }
    BundleEntry e;
    e.image_id = f[0];
    e.width = parse_int(f[1], "width", index_path, line_no);
    e.height = parse_int(f[2], "height", index_path, line_no);
    e.channels = parse_int(f[3], "channels", index_path, line_no);
    e.relative_path = f[4];
    if (e.width < 1 || e.height < 1 || e.channels < 1) {
      throw_invalid_data(fmt::format("{}:{}: dimensions must be >= 1", index_path.string(),
                                     line_no));
    }
    bundle.entries.push_back(std::move(e));
  }
  return bundle;
}

void store_bundle_index(const fs::path& index_path, std::span<const BundleEntry> entries) {
  std::string text;
  for (const BundleEntry& e : entries) {
    text += fmt::format("{}\t{}\t{}\t{}\t{}\n", e.image_id, e.width, e.height, e.channels,
                        e.relative_path);
  }
  write_text(index_path, text);
}

std::vector<ScoreMap> load_score_maps(const Bundle& bundle) {
  std::vector<ScoreMap> maps;
  for (const BundleEntry& e : bundle.entries) {
    if (e.channels != 1) {
      throw_invalid_data(fmt::format("score map '{}' must have 1 channel, has {}", e.image_id,
                                     e.channels));
    }
    maps.push_back(load_score_map(bundle.resolve(e), e.width, e.height, e.image_id));
  }
  return maps;
}

std::vector<NormalizedMap> load_normalized_maps(const Bundle& bundle) {
  std::vector<NormalizedMap> out;
  for (ScoreMap& m : load_score_maps(bundle)) {
    NormalizedMap n;
    n.image_id = m.image_id;
    n.width = m.width;
    n.height = m.height;
    bool any_positive = false;
    for (size_t i = 0; i < m.data.size(); ++i) {
      const float v = m.data[i];
      if (!(v >= 0.0f && v <= 1.0f)) {
        throw_invalid_data(fmt::format("normalized map '{}' value {} at {} outside [0, 1]",
                                       m.image_id, v, i));
      }
      any_positive = any_positive || v > 0.0f;
    }
    n.data.assign(m.data.begin(), m.data.end());
    n.degenerate = !any_positive;
    out.push_back(std::move(n));
  }
  return out;
}

std::vector<FeatureTensor> load_feature_tensors(const Bundle& bundle) {
  std::vector<FeatureTensor> out;
  for (const BundleEntry& e : bundle.entries) {
    out.push_back(load_feature_tensor(bundle.resolve(e), e.width, e.height, e.channels));
  }
  return out;
}

void store_score_maps(const fs::path& dir, const std::string& index_name,
                      const std::string& subdir, std::span<const ScoreMap> maps) {
  std::vector<BundleEntry> entries;
  for (size_t i = 0; i < maps.size(); ++i) {
    const std::string rel = (fs::path(subdir) / raster_name(i, ".f32")).generic_string();
    const std::vector<float> narrow(maps[i].data.begin(), maps[i].data.end());
    store_raster(dir / rel, narrow);
    entries.push_back({maps[i].image_id, maps[i].width, maps[i].height, 1, rel});
  }
  store_bundle_index(dir / index_name, entries);
}

void store_normalized_maps(const fs::path& dir, const std::string& index_name,
                           const std::string& subdir, std::span<const NormalizedMap> maps) {
  std::vector<BundleEntry> entries;
  for (size_t i = 0; i < maps.size(); ++i) {
    const std::string rel = (fs::path(subdir) / raster_name(i, ".f32")).generic_string();
    const std::vector<float> narrow(maps[i].data.begin(), maps[i].data.end());
    store_raster(dir / rel, narrow);
    entries.push_back({maps[i].image_id, maps[i].width, maps[i].height, 1, rel});
  }
  store_bundle_index(dir / index_name, entries);
}

static GroundTruthBoxes parse_boxes_from(const std::string& text, const fs::path& source) {
  GroundTruthBoxes out;
  for (const auto& [line_no, line] : content_lines(text)) {
    const auto f = split_whitespace(line);
    if (f.size() != 5) {
      throw_invalid_data(fmt::format("{}:{}: expected 'image_id x0 y0 x1 y1'", source.string(),
                                     line_no));
    }
    Box b;
    b.x0 = parse_int(f[1], "x0", source, line_no);
    b.y0 = parse_int(f[2], "y0", source, line_no);
    b.x1 = parse_int(f[3], "x1", source, line_no);
    b.y1 = parse_int(f[4], "y1", source, line_no);
    if (!b.valid() || b.x0 < 0 || b.y0 < 0) {
      throw_invalid_data(fmt::format("{}:{}: degenerate box ({}, {}, {}, {})", source.string(),
                                     line_no, b.x0, b.y0, b.x1, b.y1));
    }
    ImageBoxes& entry = out[f[0]];
    entry.image_id = f[0];
    entry.boxes.push_back(b);
  }
  return out;
}

GroundTruthBoxes parse_boxes(const std::string& text) { return parse_boxes_from(text, "<boxes>"); }

GroundTruthBoxes load_boxes(const fs::path& path) {
  return parse_boxes_from(read_text(path), path);
}

std::string format_boxes(const GroundTruthBoxes& boxes) {
  std::string text;
  for (const auto& [id, entry] : boxes) {
    for (const Box& b : entry.boxes) {
      text += fmt::format("{}\t{}\t{}\t{}\t{}\n", id, b.x0, b.y0, b.x1, b.y1);
    }
  }
  return text;
}

void store_boxes(const fs::path& path, const GroundTruthBoxes& boxes) {
  write_text(path, format_boxes(boxes));
}

ImageSizes load_image_sizes(const fs::path& path) {
  ImageSizes sizes;
  for (const auto& [line_no, line] : content_lines(read_text(path))) {
    const auto f = split_whitespace(line);
    if (f.size() != 3) {
      throw_invalid_data(fmt::format("{}:{}: expected 'image_id width height'", path.string(),
                                     line_no));
    }
    const int w = parse_int(f[1], "width", path, line_no);
    const int h = parse_int(f[2], "height", path, line_no);
    if (w < 1 || h < 1) {
      throw_invalid_data(fmt::format("{}:{}: size must be >= 1", path.string(), line_no));
    }
    sizes[f[0]] = {w, h};
  }
  return sizes;
}

void store_image_sizes(const fs::path& path, const ImageSizes& sizes) {
  std::string text;
  for (const auto& [id, wh] : sizes) text += fmt::format("{}\t{}\t{}\n", id, wh.first, wh.second);
  write_text(path, text);
}

void attach_sizes(GroundTruthBoxes& boxes, const ImageSizes& sizes) {
  for (auto& [id, entry] : boxes) {
    const auto it = sizes.find(id);
    if (it == sizes.end()) throw_invalid_data(fmt::format("no image size for '{}'", id));
    entry.width = it->second.first;
    entry.height = it->second.second;
  }
}

PixelMask load_mask(const fs::path& path, int width, int height, std::string image_id) {
  if (width < 1 || height < 1) {
    throw_invalid_argument(fmt::format("mask '{}' has invalid size {}x{}", path.string(), width,
                                       height));
  }
  const std::vector<char> bytes = read_bytes(path);
  const size_t count = static_cast<size_t>(width) * height;
  if (bytes.size() != count) {
    throw_invalid_data(fmt::format("mask '{}' has {} bytes, expected {}", path.string(),
                                   bytes.size(), count));
  }
  PixelMask mask;
  mask.image_id = std::move(image_id);
  mask.width = width;
  mask.height = height;
  mask.labels.resize(count);
  for (size_t i = 0; i < count; ++i) {
    const auto v = static_cast<uint8_t>(bytes[i]);
    if (v != kMaskBackground && v != kMaskForeground && v != kMaskIgnore) {
      throw_invalid_data(fmt::format("mask '{}' has illegal label {} at byte offset {}",
                                     path.string(), static_cast<int>(v), i));
    }
    mask.labels[i] = v;
  }
  return mask;
}

void store_mask(const fs::path& path, const PixelMask& mask) {
  write_bytes(path, reinterpret_cast<const char*>(mask.labels.data()), mask.labels.size());
}

std::vector<PixelMask> load_masks(const Bundle& bundle) {
  std::vector<PixelMask> out;
  for (const BundleEntry& e : bundle.entries) {
    if (e.channels != 1) {
      throw_invalid_data(fmt::format("mask '{}' must have 1 channel", e.image_id));
    }
    out.push_back(load_mask(bundle.resolve(e), e.width, e.height, e.image_id));
  }
  return out;
}

void store_masks(const fs::path& dir, const std::string& index_name,
                 const std::string& subdir, std::span<const PixelMask> masks) {
  std::vector<BundleEntry> entries;
  for (size_t i = 0; i < masks.size(); ++i) {
    const std::string rel = (fs::path(subdir) / raster_name(i, ".u8")).generic_string();
    store_mask(dir / rel, masks[i]);
    entries.push_back({masks[i].image_id, masks[i].width, masks[i].height, 1, rel});
  }
  store_bundle_index(dir / index_name, entries);
}

void store_pgm(const fs::path& path, const NormalizedMap& map) {
  std::string bytes = fmt::format("P5\n{} {}\n255\n", map.width, map.height);
  for (float v : map.data) {
    const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
    bytes.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * c))));
  }
  write_bytes(path, bytes.data(), bytes.size());
}

std::string read_text(const fs::path& path) {
  const std::vector<char> bytes = read_bytes(path);
  return {bytes.begin(), bytes.end()};
}

void write_text(const fs::path& path, const std::string& text) {
  write_bytes(path, text.data(), text.size());
}

}  // namespace wsol::io

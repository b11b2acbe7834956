#include "wsol/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "wsol/error.hpp"
#include "wsol/parallel.hpp"

namespace wsol {
namespace {

// Fixed-formula draws so results do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  Rng(uint64_t seed, uint64_t index) : engine_(mix(seed) ^ mix(index + 0x9e3779b97f4a7c15ULL)) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {
    const int v = lo + static_cast<int>(std::floor(uniform() * (hi - lo + 1)));
    return std::min(v, hi);
  }

 private:
  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

int side_length(Rng& rng, int extent, double lo_frac, double hi_frac) {
  const int lo = std::max(1, static_cast<int>(std::ceil(lo_frac * extent)));
  const int hi = std::max(lo, static_cast<int>(std::floor(hi_frac * extent)));
  return rng.uniform_int(lo, std::min(hi, extent));
}

// Sum of a few low-frequency plane waves, rescaled to [0, amplitude].
std::vector<double> smooth_field(Rng& rng, int width, int height, double amplitude) {
  constexpr int kWaves = 3;
  double fx[kWaves], fy[kWaves], phase[kWaves], weight[kWaves];
  for (int k = 0; k < kWaves; ++k) {
    fx[k] = rng.uniform(-1.5, 1.5);
    fy[k] = rng.uniform(-1.5, 1.5);
    phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    weight[k] = rng.uniform(0.5, 1.0);
  }
  std::vector<double> field(static_cast<size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double v = 0.0;
      for (int k = 0; k < kWaves; ++k) {
        v += weight[k] * std::cos(2.0 * std::numbers::pi *
                                      (fx[k] * x / width + fy[k] * y / height) +
                                  phase[k]);
      }
      field[static_cast<size_t>(y) * width + x] = v;
    }
  }
  const auto [lo, hi] = std::minmax_element(field.begin(), field.end());
  const double lo_v = *lo;
  const double range = *hi - *lo;
  for (double& v : field) v = range > 0.0 ? amplitude * (v - lo_v) / range : 0.0;
  return field;
}

bool inside(const Box& b, int x, int y) {
  return x >= b.x0 && x < b.x1 && y >= b.y0 && y < b.y1;
}

SynthImage generate_one(const SynthSpec& spec, size_t index) {
  Rng rng(spec.seed, index);
  const int w = spec.width;
  const int h = spec.height;

  const int bw = side_length(rng, w, spec.box_min_fraction, spec.box_max_fraction);
  const int bh = side_length(rng, h, spec.box_min_fraction, spec.box_max_fraction);
  const int bx = rng.uniform_int(0, w - bw);
  const int by = rng.uniform_int(0, h - bh);
  const Box box{bx, by, bx + bw, by + bh};

  const double peak = rng.uniform(spec.peak_min, spec.peak_max);
  std::vector<double> values = smooth_field(rng, w, h, spec.noise_level * peak);
  for (int y = box.y0; y < box.y1; ++y) {
    for (int x = box.x0; x < box.x1; ++x) values[static_cast<size_t>(y) * w + x] += peak;
  }

  SynthImage img;
  const bool wants_sinkhole = rng.uniform() < spec.sinkhole_probability;
  const double depth = rng.uniform(spec.sinkhole_depth_min, spec.sinkhole_depth_max);
  if (wants_sinkhole) {
    const int r = spec.sinkhole_radius;
    constexpr int kAttempts = 256;
    for (int attempt = 0; attempt < kAttempts && !img.has_sinkhole; ++attempt) {
      const int cx = rng.uniform_int(0, w - 1);
      const int cy = rng.uniform_int(0, h - 1);
      std::vector<size_t> disk;
      bool touches_box = false;
      for (int y = std::max(0, cy - r); y <= std::min(h - 1, cy + r); ++y) {
        for (int x = std::max(0, cx - r); x <= std::min(w - 1, cx + r); ++x) {
          if ((x - cx) * (x - cx) + (y - cy) * (y - cy) > r * r) continue;
          if (inside(box, x, y)) touches_box = true;
          disk.push_back(static_cast<size_t>(y) * w + x);
        }
      }
      if (touches_box) continue;
      for (size_t p : disk) {
        const int x = static_cast<int>(p % w);
        const int y = static_cast<int>(p / w);
        const double d = std::sqrt(static_cast<double>((x - cx) * (x - cx) + (y - cy) * (y - cy)));
        values[p] = depth * (1.0 - 0.5 * (r > 0 ? d / r : 0.0));
      }
      img.has_sinkhole = true;
      img.sinkhole_pixels = std::move(disk);
    }
  }

  const std::string id = fmt::format("synth_{:05d}", index);
  img.map.image_id = id;
  img.map.width = w;
  img.map.height = h;
  // Rounded to float so a dataset written to disk loads back unchanged.
  img.map.data.resize(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    img.map.data[i] = static_cast<float>(values[i]);
  }

  img.truth = ImageBoxes{id, w, h, {box}};

  img.mask.image_id = id;
  img.mask.width = w;
  img.mask.height = h;
  img.mask.labels.assign(values.size(), kMaskBackground);
  for (int y = box.y0; y < box.y1; ++y) {
    for (int x = box.x0; x < box.x1; ++x) {
      img.mask.labels[static_cast<size_t>(y) * w + x] = kMaskForeground;
    }
  }
  return img;
}

double rate(int64_t hits, int64_t images) {
  return images > 0 ? static_cast<double>(hits) / static_cast<double>(images) : 0.0;
}

}  // namespace

void validate(const SynthSpec& spec) {
  if (spec.count < 0) throw_invalid_argument("synthetic image count must be >= 0");
  if (spec.width < 1 || spec.height < 1) throw_invalid_argument("synthetic map is empty");
  if (!(spec.box_min_fraction > 0.0 && spec.box_min_fraction <= spec.box_max_fraction)) {
    throw_invalid_argument("box fractions must satisfy 0 < min <= max");
  }
  if (spec.box_max_fraction > 1.0) throw_invalid_argument("box larger than the map");
  if (!(spec.peak_min > 0.0 && spec.peak_min <= spec.peak_max)) {
    throw_invalid_argument("peak range must satisfy 0 < min <= max");
  }
  if (!(spec.noise_level >= 0.0)) throw_invalid_argument("noise level must be >= 0");
  if (!(spec.sinkhole_probability >= 0.0 && spec.sinkhole_probability <= 1.0)) {
    throw_invalid_argument("sinkhole probability outside [0, 1]");
  }
  if (!(spec.sinkhole_depth_min <= spec.sinkhole_depth_max && spec.sinkhole_depth_max < 0.0)) {
    throw_invalid_argument("sinkhole depth range must lie strictly below the background");
  }
  if (spec.sinkhole_radius < 0) throw_invalid_argument("sinkhole radius must be >= 0");
}

std::vector<SynthImage> generate(const SynthSpec& spec, int threads) {
  validate(spec);
  std::vector<SynthImage> images(static_cast<size_t>(spec.count));
  parallel_for(images.size(), threads, [&](size_t i) { images[i] = generate_one(spec, i); });
  return images;
}

RawDataset to_raw_dataset(std::span<const SynthImage> images) {
  RawDataset out;
  for (const SynthImage& img : images) {
    out.maps.push_back(img.map);
    out.boxes.push_back(img.truth);
    out.masks.push_back(img.mask);
  }
  return out;
}

double SubsetHitRate::sinkhole_rate() const { return rate(sinkhole_hits, sinkhole_images); }
double SubsetHitRate::clean_rate() const { return rate(clean_hits, clean_images); }

SinkholeExperiment sinkhole_experiment(std::span<const SynthImage> images,
                                       std::span<const MethodChoice> methods,
                                       const BoxEvalConfig& config) {
  if (images.empty()) throw_invalid_argument("sinkhole experiment on an empty dataset");
  const RawDataset raw = to_raw_dataset(images);

  SinkholeExperiment out;
  out.images = static_cast<int64_t>(images.size());
  for (const SynthImage& img : images) out.sinkhole_images += img.has_sinkhole ? 1 : 0;

  for (const MethodChoice& choice : methods) {
    const auto samples =
        normalize_box_dataset(raw, choice.method, choice.percentile, config.threads);
    MethodOutcome outcome;
    outcome.choice = choice;
    outcome.report = max_box_acc_v2(samples, config);
    for (const DeltaCurve& curve : outcome.report.curves) {
      const std::vector<bool> hits =
          box_hits(samples, curve.best_tau, curve.delta, config.connectivity, config.threads);
      SubsetHitRate subset;
      subset.delta = curve.delta;
      subset.tau = curve.best_tau;
      for (size_t i = 0; i < images.size(); ++i) {
        if (images[i].has_sinkhole) {
          ++subset.sinkhole_images;
          subset.sinkhole_hits += hits[i] ? 1 : 0;
        } else {
          ++subset.clean_images;
          subset.clean_hits += hits[i] ? 1 : 0;
        }
      }
      outcome.subsets.push_back(subset);
    }
    out.outcomes.push_back(std::move(outcome));
  }
  return out;
}

SinkholeExperiment sinkhole_experiment(const SynthSpec& spec,
                                       std::span<const MethodChoice> methods,
                                       const BoxEvalConfig& config) {
  if (!(spec.sinkhole_probability > 0.0)) {
    throw_invalid_argument("sinkhole experiment needs sinkhole probability > 0");
  }
  const std::vector<SynthImage> images = generate(spec, config.threads);
  return sinkhole_experiment(images, methods, config);
}

std::string format_experiment_csv(const SinkholeExperiment& experiment) {
  std::string out =
      "method,percentile,MaxBoxAccV2,delta,tau_star,box_acc,sinkhole_rate,clean_rate\n";
  for (const MethodOutcome& o : experiment.outcomes) {
    for (size_t d = 0; d < o.subsets.size(); ++d) {
      const SubsetHitRate& s = o.subsets[d];
      out += fmt::format("{},{:.6f},{:.6f},{:.2f},{:.6f},{:.6f},{:.6f},{:.6f}\n",
                         to_string(o.choice.method), o.choice.percentile,
                         o.report.max_box_acc_v2, s.delta, s.tau,
                         o.report.curves[d].best_accuracy, s.sinkhole_rate(), s.clean_rate());
    }
  }
  return out;
}

}  // namespace wsol

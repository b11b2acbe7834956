#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wsol/metrics.hpp"
#include "wsol/normalize.hpp"
#include "wsol/sweep.hpp"

namespace wsol {

// Synthetic score maps: a smooth non-negative background, a raised plateau on
// one ground-truth box, and with probability `sinkhole_probability` a small
// disk of strongly negative values placed outside the box.
struct SynthSpec {
  int count = 200;
  int width = 64;
  int height = 64;
  // Box side lengths as fractions of the map side.
  double box_min_fraction = 0.2;
  double box_max_fraction = 0.5;
  // Plateau height, drawn per image.
  double peak_min = 0.5;
  double peak_max = 2.0;
  // Background lives in [0, noise_level * peak].
  double noise_level = 0.2;
  double sinkhole_probability = 0.0;
  // Value at the sinkhole centre, drawn per image; the rim holds half of it.
  double sinkhole_depth_min = -40.0;
  double sinkhole_depth_max = -10.0;
  int sinkhole_radius = 3;
  uint64_t seed = 0;
};

struct SynthImage {
  ScoreMap map;
  ImageBoxes truth;
  PixelMask mask;
  bool has_sinkhole = false;
  std::vector<size_t> sinkhole_pixels;  // row-major indices, ascending
};

// Throws Error(kInvalidArgument) for inconsistent specs (box larger than the
// map, probability outside [0, 1], sinkhole depth not below the background).
void validate(const SynthSpec& spec);

// Image i draws only from a generator seeded by (seed, i), so the dataset is
// bit-identical across runs and thread counts.
std::vector<SynthImage> generate(const SynthSpec& spec, int threads = 1);

RawDataset to_raw_dataset(std::span<const SynthImage> images);

struct MethodChoice {
  NormMethod method = NormMethod::kMinMax;
  double percentile = 0.0;
};

struct SubsetHitRate {
  double delta = 0.0;
  double tau = 0.0;
  int64_t sinkhole_images = 0;
  int64_t sinkhole_hits = 0;
  int64_t clean_images = 0;
  int64_t clean_hits = 0;

  double sinkhole_rate() const;
  double clean_rate() const;
};

struct MethodOutcome {
  MethodChoice choice;
  EvalReport report;
  std::vector<SubsetHitRate> subsets;  // one per delta, at that delta's tau*
};

struct SinkholeExperiment {
  int64_t images = 0;
  int64_t sinkhole_images = 0;
  std::vector<MethodOutcome> outcomes;  // in request order
};

// MaxBoxAccV2 of every method on one dataset, plus hit rates split by
// sinkhole / clean images at each tau*.
SinkholeExperiment sinkhole_experiment(std::span<const SynthImage> images,
                                       std::span<const MethodChoice> methods,
                                       const BoxEvalConfig& config);
// Generates the dataset first; requires sinkhole_probability > 0.
SinkholeExperiment sinkhole_experiment(const SynthSpec& spec,
                                       std::span<const MethodChoice> methods,
                                       const BoxEvalConfig& config);

// method,percentile,MaxBoxAccV2,delta,tau_star,box_acc,sinkhole_rate,clean_rate
std::string format_experiment_csv(const SinkholeExperiment& experiment);

}  // namespace wsol

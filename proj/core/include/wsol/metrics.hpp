#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsol/localize.hpp"
#include "wsol/normalize.hpp"

namespace wsol {

// Ground-truth boxes of one image, at the image's own resolution.
struct ImageBoxes {
  std::string image_id;
  int width = 0;
  int height = 0;
  BoxSet boxes;
};

// Keyed by image id.
using GroundTruthBoxes = std::map<std::string, ImageBoxes>;

inline constexpr uint8_t kMaskBackground = 0;
inline constexpr uint8_t kMaskForeground = 1;
inline constexpr uint8_t kMaskIgnore = 255;

struct PixelMask {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<uint8_t> labels;  // row-major, each one of the kMask* values
};

// tau_l = l / count for l = 0 .. count-1.
class ThresholdGrid {
 public:
  // Throws Error(kInvalidArgument) for count < 2.
  explicit ThresholdGrid(int count = 1000);

  int count() const { return count_; }
  double tau(int l) const { return static_cast<double>(l) / count_; }
  std::vector<double> thresholds() const;

 private:
  int count_;
};

inline const std::vector<double> kDefaultDeltas = {0.3, 0.5, 0.7};

struct BoxSample {
  NormalizedMap map;
  ImageBoxes truth;
};

struct MaskSample {
  NormalizedMap map;
  PixelMask mask;
};

struct BoxEvalConfig {
  ThresholdGrid grid{1000};
  std::vector<double> deltas = kDefaultDeltas;
  Connectivity connectivity = Connectivity::kEight;
  int threads = 1;
};

struct DeltaCurve {
  double delta = 0.0;
  std::vector<int64_t> hits;  // per grid threshold
  int best_index = 0;         // smallest index attaining the maximum
  double best_tau = 0.0;
  double best_accuracy = 0.0;
};

struct EvalReport {
  int64_t images = 0;
  int64_t degenerate_maps = 0;
  std::vector<double> thresholds;
  std::vector<DeltaCurve> curves;  // one per delta, in request order
  double max_box_acc_v2 = 0.0;     // mean of best_accuracy over deltas
  std::optional<double> pxap;

  // Configuration echo.
  std::string method;
  std::optional<double> percentile;
  Connectivity connectivity = Connectivity::kEight;
  int grid_count = 0;

  double accuracy(size_t curve, size_t l) const {
    return static_cast<double>(curves[curve].hits[l]) / static_cast<double>(images);
  }
};

// Checks every sample has at least one box, every box fits its image, and
// every map passes the [0, 1] range check. Throws Error(kInvalidData).
void validate_box_dataset(std::span<const BoxSample> dataset);

// Brings a map to the resolution of its ground truth (no-op when equal).
NormalizedMap at_resolution(const NormalizedMap& map, int width, int height);

// Best IoU between any estimated box at `tau` and any GT box; 0 when no
// pixel reaches tau. The map must already be at GT resolution.
double best_iou(const NormalizedMap& map, const BoxSet& truth, double tau,
                Connectivity connectivity);

// Fraction of images whose best IoU at tau reaches delta.
double box_acc(std::span<const BoxSample> dataset, double tau, double delta,
               Connectivity connectivity, int threads = 1);

// Per-image hit flags at (tau, delta), in dataset order.
std::vector<bool> box_hits(std::span<const BoxSample> dataset, double tau, double delta,
                           Connectivity connectivity, int threads = 1);

// Full threshold sweep; per delta picks tau* (ties -> smallest tau).
// Throws Error(kInvalidArgument) for an empty dataset or delta outside (0, 1].
EvalReport max_box_acc_v2(std::span<const BoxSample> dataset, const BoxEvalConfig& config);

enum class PxapMode { kGrid, kExact };

struct PxapConfig {
  PxapMode mode = PxapMode::kGrid;
  ThresholdGrid grid{1000};
  int threads = 1;
};

// Pooled precision/recall over all non-ignore pixels, thresholds ascending.
struct PrCurve {
  std::vector<double> thresholds;
  std::vector<int64_t> true_positives;
  std::vector<int64_t> false_positives;
  int64_t foreground = 0;

  double precision(size_t l) const;
  double recall(size_t l) const;
  // sum_l precision(l) * (recall(l) - recall(l + 1)), recall past the end = 0.
  double average_precision() const;
};

// Throws Error(kInvalidData) when no foreground pixel exists dataset-wide or a
// mask label is illegal.
PrCurve pr_curve(std::span<const MaskSample> dataset, const PxapConfig& config);
double pxap(std::span<const MaskSample> dataset, const PxapConfig& config);

// Human-readable summary, one `key,value` fact per line.
std::string format_report_text(const EvalReport& report);
// delta,tau,hits,images,box_acc with one row per (delta, tau).
std::string format_report_csv(const EvalReport& report);
// threshold,true_positives,false_positives,precision,recall
std::string format_pr_curve_csv(const PrCurve& curve);

}  // namespace wsol

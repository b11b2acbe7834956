#pragma once

#include <string>
#include <vector>

namespace wsol {

// Backbone feature map for one image. Channel-major storage:
// data[(c * height + y) * width + x].
struct FeatureTensor {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> data;

  float at(int channel, int x, int y) const {
    return data[(static_cast<size_t>(channel) * height + y) * width + x];
  }
};

struct ClassWeights {
  int class_id = 0;
  std::vector<double> weights;
};

// Raw class activation map for one image, row-major. Held in double; files
// store it as float32.
struct ScoreMap {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<double> data;

  size_t size() const { return data.size(); }
  double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
};

// Throws Error(kInvalidArgument) when dimensions or payload are inconsistent
// or any value is non-finite.
void validate(const FeatureTensor& features);
void validate(const ScoreMap& map);

// Channel average of the weighted feature planes:
//   out[x,y] = (1/K) * sum_i w_i * f_i[x,y]
// Channels are summed in order 0..K-1 in double precision, so the result does
// not depend on how callers schedule images across threads.
ScoreMap compute_cam(const FeatureTensor& features, const ClassWeights& weights,
                     std::string image_id = {});

// The channel mean alone, without the map metadata.
std::vector<double> cam_accumulate(const FeatureTensor& features,
                                   const ClassWeights& weights);

// Negative weight clamping: w_i -> max(w_i, 0).
ClassWeights clamp_negative_weights(const ClassWeights& weights);

}  // namespace wsol

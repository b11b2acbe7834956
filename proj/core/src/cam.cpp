#include "wsol/cam.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "wsol/error.hpp"

namespace wsol {

void validate(const FeatureTensor& features) {
  if (features.width < 1 || features.height < 1 || features.channels < 1) {
    throw_invalid_argument(fmt::format("feature tensor has invalid shape {}x{}x{}",
                                       features.width, features.height,
                                       features.channels));
  }
  const size_t expected = static_cast<size_t>(features.width) * features.height *
                          features.channels;
  if (features.data.size() != expected) {
    throw_invalid_argument(fmt::format(
        "feature tensor holds {} values, shape requires {}", features.data.size(),
        expected));
  }
  for (size_t i = 0; i < features.data.size(); ++i) {
    if (!std::isfinite(features.data[i])) {
      throw_invalid_argument(fmt::format("feature tensor value {} is not finite", i));
    }
  }
}

void validate(const ScoreMap& map) {
  if (map.width < 1 || map.height < 1) {
    throw_invalid_argument(
        fmt::format("score map '{}' has invalid size {}x{}", map.image_id, map.width,
                    map.height));
  }
  if (map.data.size() != static_cast<size_t>(map.width) * map.height) {
    throw_invalid_argument(fmt::format("score map '{}' holds {} values, expected {}",
                                       map.image_id, map.data.size(),
                                       static_cast<size_t>(map.width) * map.height));
  }
  for (size_t i = 0; i < map.data.size(); ++i) {
    if (!std::isfinite(map.data[i])) {
      throw_invalid_argument(
          fmt::format("score map '{}' value {} is not finite", map.image_id, i));
    }
  }
}

std::vector<double> cam_accumulate(const FeatureTensor& features,
                                   const ClassWeights& weights) {
  validate(features);
  if (weights.weights.size() != static_cast<size_t>(features.channels)) {
    throw_invalid_argument(fmt::format("class {} has {} weights but features have {} channels",
                                       weights.class_id, weights.weights.size(),
                                       features.channels));
  }
  for (double w : weights.weights) {
    if (!std::isfinite(w)) {
      throw_invalid_argument(fmt::format("class {} has a non-finite weight", weights.class_id));
    }
  }

  const size_t plane = static_cast<size_t>(features.width) * features.height;
  std::vector<double> acc(plane, 0.0);
  for (int c = 0; c < features.channels; ++c) {
    const double w = weights.weights[c];
    const float* src = features.data.data() + c * plane;
    for (size_t p = 0; p < plane; ++p) acc[p] += w * static_cast<double>(src[p]);
  }
  const double inv_k = 1.0 / features.channels;
  for (double& v : acc) v *= inv_k;
  return acc;
}

ScoreMap compute_cam(const FeatureTensor& features, const ClassWeights& weights,
                     std::string image_id) {
  ScoreMap out;
  out.image_id = std::move(image_id);
  out.width = features.width;
  out.height = features.height;
  out.data = cam_accumulate(features, weights);
  return out;
}

ClassWeights clamp_negative_weights(const ClassWeights& weights) {
  ClassWeights out = weights;
  for (double& w : out.weights) w = std::max(w, 0.0);
  return out;
}

}  // namespace wsol

#include "wsol/synth.hpp"

#include <algorithm>

#include <gtest/gtest.h>

#include "wsol/error.hpp"

namespace wsol {
namespace {

SynthSpec spec_with(double q, uint64_t seed, int count = 40) {
  SynthSpec s;
  s.count = count;
  s.sinkhole_probability = q;
  s.seed = seed;
  return s;
}

double min_of(const ScoreMap& m) { return *std::min_element(m.data.begin(), m.data.end()); }

TEST(SynthSpecTest, RejectsInconsistentSpecs) {
  SynthSpec s;
  s.box_max_fraction = 1.5;
  EXPECT_THROW(validate(s), Error);
  s = SynthSpec{};
  s.sinkhole_probability = 1.2;
  EXPECT_THROW(validate(s), Error);
  s = SynthSpec{};
  s.sinkhole_depth_max = 0.5;
  EXPECT_THROW(validate(s), Error);
  s = SynthSpec{};
  s.width = 0;
  EXPECT_THROW(validate(s), Error);
  s = SynthSpec{};
  s.peak_min = 3.0;
  EXPECT_THROW(validate(s), Error);
  EXPECT_THROW(generate(s), Error);
  EXPECT_NO_THROW(validate(SynthSpec{}));
}

TEST(SynthGenerateTest, NoSinkholesStayAboveBackgroundFloor) {
  for (const SynthImage& img : generate(spec_with(0.0, 1))) {
    EXPECT_FALSE(img.has_sinkhole);
    EXPECT_GE(min_of(img.map), 0.0);
  }
}

TEST(SynthGenerateTest, CertainSinkholesAreDeep) {
  SynthSpec s = spec_with(1.0, 2);
  const double noise_floor = s.noise_level * s.peak_max;
  s.sinkhole_depth_min = -20.0 * noise_floor;
  s.sinkhole_depth_max = -10.0 * noise_floor;
  for (const SynthImage& img : generate(s)) {
    EXPECT_TRUE(img.has_sinkhole);
    EXPECT_LE(min_of(img.map), -10.0 * noise_floor);
  }
}

TEST(SynthGenerateTest, SameSeedIsBitIdentical) {
  const auto a = generate(spec_with(0.3, 7));
  const auto b = generate(spec_with(0.3, 7), 4);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].map.image_id, b[i].map.image_id);
    EXPECT_EQ(a[i].map.data, b[i].map.data);
    EXPECT_EQ(a[i].truth.boxes, b[i].truth.boxes);
    EXPECT_EQ(a[i].mask.labels, b[i].mask.labels);
    EXPECT_EQ(a[i].sinkhole_pixels, b[i].sinkhole_pixels);
  }
  const auto c = generate(spec_with(0.3, 8));
  EXPECT_NE(a[0].map.data, c[0].map.data);
}

TEST(SynthGenerateTest, TruthAndMaskAgree) {
  const SynthSpec s = spec_with(0.5, 3);
  for (const SynthImage& img : generate(s)) {
    ASSERT_EQ(img.truth.boxes.size(), 1u);
    const Box& b = img.truth.boxes[0];
    EXPECT_TRUE(b.valid());
    EXPECT_GE(b.width(), static_cast<int>(s.box_min_fraction * s.width) - 1);
    EXPECT_LE(b.width(), static_cast<int>(s.box_max_fraction * s.width) + 1);
    EXPECT_EQ(img.truth.width, s.width);
    EXPECT_EQ(img.mask.image_id, img.map.image_id);
    for (int y = 0; y < s.height; ++y) {
      for (int x = 0; x < s.width; ++x) {
        const bool in = x >= b.x0 && x < b.x1 && y >= b.y0 && y < b.y1;
        EXPECT_EQ(img.mask.labels[static_cast<size_t>(y) * s.width + x],
                  in ? kMaskForeground : kMaskBackground);
      }
    }
    for (size_t p : img.sinkhole_pixels) {
      const int x = static_cast<int>(p % s.width), y = static_cast<int>(p / s.width);
      EXPECT_FALSE(x >= b.x0 && x < b.x1 && y >= b.y0 && y < b.y1);
      EXPECT_LT(img.map.data[p], 0.0);
    }
  }
}

TEST(SynthGenerateTest, PlateauIsTheMaximumRegion) {
  for (const SynthImage& img : generate(spec_with(0.0, 4))) {
    const Box& b = img.truth.boxes[0];
    double inside_min = 1e9, outside_max = -1e9;
    for (int y = 0; y < img.map.height; ++y) {
      for (int x = 0; x < img.map.width; ++x) {
        const double v = img.map.at(x, y);
        if (x >= b.x0 && x < b.x1 && y >= b.y0 && y < b.y1) {
          inside_min = std::min(inside_min, v);
        } else {
          outside_max = std::max(outside_max, v);
        }
      }
    }
    EXPECT_GT(inside_min, outside_max);
  }
}

// With a very deep sinkhole every non-sinkhole pixel is squeezed near 1, so
// any threshold below that keeps the whole frame.
TEST(SinkholePropertyTest, MinMaxFlattensUnderDeepSinkholes) {
  SynthSpec s = spec_with(1.0, 5, 20);
  s.sinkhole_depth_min = -1e5;
  s.sinkhole_depth_max = -5e4;
  for (const SynthImage& img : generate(s)) {
    const NormalizedMap m = normalize_minmax(img.map);
    for (size_t p = 0; p < m.data.size(); ++p) {
      if (!std::binary_search(img.sinkhole_pixels.begin(), img.sinkhole_pixels.end(), p)) {
        EXPECT_GT(m.data[p], 0.99f);
      }
    }
    for (double tau : {0.3, 0.5, 0.7, 0.9}) {
      const double best = best_iou(m, img.truth.boxes, tau, Connectivity::kEight);
      for (double delta : kDefaultDeltas) EXPECT_LT(best, delta);
    }
  }
}

// The sinkhole sits below the cut-off, so removing it changes nothing.
TEST(SinkholePropertyTest, MaxAndIvrIgnoreSinkhole) {
  for (const SynthImage& img : generate(spec_with(1.0, 6, 30))) {
    ASSERT_TRUE(img.has_sinkhole);
    double rest_min = 1e9;
    for (size_t p = 0; p < img.map.size(); ++p) {
      if (!std::binary_search(img.sinkhole_pixels.begin(), img.sinkhole_pixels.end(), p)) {
        rest_min = std::min(rest_min, img.map.data[p]);
      }
    }
    // Max clamps everything <= 0 to 0.
    ScoreMap zeroed = img.map;
    for (size_t p : img.sinkhole_pixels) zeroed.data[p] = 0.0;
    EXPECT_EQ(normalize_max(img.map).data, normalize_max(zeroed).data);
    // IVR only looks at order statistics above the sinkhole's share of pixels.
    ScoreMap filled = img.map;
    for (size_t p : img.sinkhole_pixels) filled.data[p] = rest_min;
    for (double p : {5.0, 10.0, 30.0}) {
      EXPECT_EQ(normalize_ivr(img.map, Percentile(p)).data,
                normalize_ivr(filled, Percentile(p)).data);
    }
  }
}

TEST(SinkholeExperimentTest, NoSinkholesMakesMinMaxAndIvrAgree) {
  const auto images = generate(spec_with(0.0, 9, 60));
  const std::vector<MethodChoice> methods = {{NormMethod::kMinMax, 0}, {NormMethod::kIvr, 1}};
  BoxEvalConfig c;
  c.grid = ThresholdGrid(200);
  const SinkholeExperiment e = sinkhole_experiment(images, methods, c);
  ASSERT_EQ(e.outcomes.size(), 2u);
  EXPECT_EQ(e.sinkhole_images, 0);
  EXPECT_NEAR(e.outcomes[0].report.max_box_acc_v2, e.outcomes[1].report.max_box_acc_v2,
              1.0 / 60 + 1e-12);
}

TEST(SinkholeExperimentTest, DirectionalOutcome) {
  SynthSpec s = spec_with(0.3, 11, 100);
  const std::vector<MethodChoice> methods = {
      {NormMethod::kMinMax, 0}, {NormMethod::kMax, 0}, {NormMethod::kIvr, 10}};
  BoxEvalConfig c;
  c.grid = ThresholdGrid(200);
  const SinkholeExperiment e = sinkhole_experiment(s, methods, c);
  EXPECT_GT(e.sinkhole_images, 0);
  const double minmax = e.outcomes[0].report.max_box_acc_v2;
  EXPECT_LT(minmax, e.outcomes[1].report.max_box_acc_v2);
  EXPECT_LT(minmax, e.outcomes[2].report.max_box_acc_v2);
  const SubsetHitRate& at07 = e.outcomes[0].subsets.back();
  EXPECT_EQ(at07.delta, 0.7);
  EXPECT_EQ(at07.tau, e.outcomes[0].report.curves.back().best_tau);
  EXPECT_EQ(at07.sinkhole_images + at07.clean_images, 100);
  EXPECT_LT(at07.sinkhole_rate(), at07.clean_rate());
}

TEST(SinkholeExperimentTest, RequiresSinkholes) {
  const std::vector<MethodChoice> methods = {{NormMethod::kMinMax, 0}};
  EXPECT_THROW(sinkhole_experiment(spec_with(0.0, 1), methods, BoxEvalConfig{}), Error);
}

TEST(SinkholeExperimentTest, CsvHasOneRowPerMethodAndDelta) {
  const std::vector<MethodChoice> methods = {{NormMethod::kMinMax, 0}, {NormMethod::kMax, 0}};
  BoxEvalConfig c;
  c.grid = ThresholdGrid(20);
  const std::string csv = format_experiment_csv(sinkhole_experiment(spec_with(0.5, 2, 10), methods, c));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 3);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "method,percentile,MaxBoxAccV2,delta,tau_star,box_acc,sinkhole_rate,clean_rate");
}

}  // namespace
}  // namespace wsol

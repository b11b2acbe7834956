#include "wsol/normalize.hpp"

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wsol/error.hpp"

namespace wsol {
namespace {

ScoreMap map2x2(float a, float b, float c, float d) {
  return ScoreMap{"m", 2, 2, {a, b, c, d}};
}

// The running example: values spanning [-0.1, 0.4].
ScoreMap example_map() { return map2x2(-0.1f, 0.0f, 0.2f, 0.4f); }

void expect_near(const NormalizedMap& m, std::vector<double> expected, double tol) {
  ASSERT_EQ(m.data.size(), expected.size());
  for (size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(m.data[i], expected[i], tol) << i;
}

double max_abs_diff(const NormalizedMap& a, const NormalizedMap& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    d = std::max(d, std::abs(static_cast<double>(a.data[i]) - b.data[i]));
  }
  return d;
}

std::vector<NormalizedMap> all_methods(const ScoreMap& m, double p) {
  return {normalize_minmax(m), normalize_max(m), normalize_pas(m, Percentile(p)),
          normalize_ivr(m, Percentile(p))};
}

TEST(PercentileTest, RejectsOutOfRange) {
  EXPECT_THROW(Percentile(-0.5), Error);
  EXPECT_THROW(Percentile(100.5), Error);
  EXPECT_THROW(Percentile(std::nan("")), Error);
  EXPECT_EQ(Percentile(0).value(), 0.0);
  EXPECT_EQ(Percentile(100).value(), 100.0);
}

TEST(PctTest, Singleton) {
  const std::vector<double> v = {3.0};
  EXPECT_EQ(pct(v, Percentile(50)), 3.0);
}

TEST(PctTest, ExtremesAreMinAndMax) {
  const std::vector<double> v = {0.2, -0.1, 0.4, 0.0};
  EXPECT_EQ(pct(v, Percentile(0)), -0.1);
  EXPECT_EQ(pct(v, Percentile(100)), 0.4);
}

TEST(PctTest, InterpolatesBetweenRanks) {
  const std::vector<double> v = {-0.1, 0.0, 0.2, 0.4};
  EXPECT_DOUBLE_EQ(pct(v, Percentile(50)), testing::pct_oracle(v, 50));
  EXPECT_DOUBLE_EQ(pct(v, Percentile(50)), 0.1);
}

TEST(PctTest, EmptyIsRejected) {
  EXPECT_THROW(pct(std::vector<double>{}, Percentile(10)), Error);
}

TEST(PctTest, MatchesSortOracleExactly) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> size(1, 200);
  std::uniform_real_distribution<double> value(-5.0, 5.0), rank(0.0, 100.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> v(size(rng));
    for (double& x : v) x = value(rng);
    // Duplicates exercise the next-order-statistic lookup.
    if (trial % 3 == 0) v.insert(v.end(), v.begin(), v.begin() + v.size() / 2);
    const double p = trial % 10 == 0 ? 100.0 * (trial % 20 == 0) : rank(rng);
    EXPECT_EQ(pct(v, Percentile(p)), testing::pct_oracle(v, p));
    std::vector<float> f(v.begin(), v.end());
    EXPECT_EQ(pct(f, Percentile(p)), testing::pct_oracle({f.begin(), f.end()}, p));
  }
}

TEST(NormalizeMinMaxTest, Example) {
  const NormalizedMap m = normalize_minmax(example_map());
  expect_near(m, {0.0, 0.2, 0.6, 1.0}, 1e-6);
  EXPECT_EQ(m.method, NormMethod::kMinMax);
  EXPECT_FALSE(m.degenerate);
}

TEST(NormalizeMinMaxTest, ConstantMapIsDegenerate) {
  const NormalizedMap m = normalize_minmax(map2x2(5, 5, 5, 5));
  expect_near(m, {0, 0, 0, 0}, 0.0);
  EXPECT_TRUE(m.degenerate);
}

TEST(NormalizeMinMaxTest, MatchesTwoPassOracle) {
  std::mt19937_64 rng(8);
  const ScoreMap f = testing::random_map(rng, 8, 8, -3.0, 2.0);
  expect_near(normalize_minmax(f), testing::minmax_oracle(f), 1e-7);
}

TEST(NormalizeMaxTest, Example) {
  expect_near(normalize_max(example_map()), {0.0, 0.0, 0.5, 1.0}, 1e-6);
}

TEST(NormalizeMaxTest, ScaleInvariant) {
  ScoreMap scaled = example_map();
  for (double& v : scaled.data) v *= 3.7;
  EXPECT_LE(max_abs_diff(normalize_max(scaled), normalize_max(example_map())), 1e-6);
}

TEST(NormalizeMaxTest, AllNegativeIsZero) {
  const NormalizedMap m = normalize_max(map2x2(-1, -2, -3, -4));
  expect_near(m, {0, 0, 0, 0}, 0.0);
  EXPECT_TRUE(m.degenerate);
}

TEST(NormalizePasTest, Example) {
  const NormalizedMap m = normalize_pas(example_map(), Percentile(90));
  expect_near(m, {0.0, 0.1 / 0.44, 0.3 / 0.44, 1.0}, 1e-6);
  expect_near(m, {0.0, 0.2273, 0.6818, 1.0}, 5e-5);
}

TEST(NormalizePasTest, DefaultPercentileIsNinety) {
  EXPECT_EQ(kDefaultPasPercentile, 90.0);
  const NormalizedMap a = normalize_pas(example_map());
  const NormalizedMap b = normalize_pas(example_map(), Percentile(90));
  EXPECT_EQ(a.data, b.data);
  EXPECT_EQ(a.percentile, 90.0);
}

TEST(NormalizePasTest, FullPercentileIsMinMax) {
  std::mt19937_64 rng(4);
  const ScoreMap f = testing::random_map(rng, 9, 7);
  EXPECT_LE(max_abs_diff(normalize_pas(f, Percentile(100)), normalize_minmax(f)), 1e-6);
}

TEST(NormalizePasTest, ZeroPercentileIsDegenerate) {
  EXPECT_TRUE(normalize_pas(example_map(), Percentile(0)).degenerate);
}

TEST(NormalizeIvrTest, Example) {
  expect_near(normalize_ivr(example_map(), Percentile(50)), {0.0, 0.0, 0.1 / 0.3, 1.0}, 1e-6);
  expect_near(normalize_ivr(example_map(), Percentile(50)), {0.0, 0.0, 0.3333, 1.0}, 5e-5);
}

TEST(NormalizeIvrTest, ZeroPercentileIsMinMax) {
  std::mt19937_64 rng(6);
  const ScoreMap f = testing::random_map(rng, 9, 7);
  EXPECT_LE(max_abs_diff(normalize_ivr(f, Percentile(0)), normalize_minmax(f)), 1e-6);
}

TEST(NormalizeIvrTest, MaskDatasetDefaultIsFifthPercentile) {
  EXPECT_EQ(kDefaultIvrMaskPercentile, 5.0);
}

TEST(NormalizeIvrTest, FullPercentileIsDegenerate) {
  EXPECT_TRUE(normalize_ivr(example_map(), Percentile(100)).degenerate);
}

TEST(NormalizeTest, DispatchAndParse) {
  const ScoreMap f = example_map();
  EXPECT_EQ(normalize(f, NormMethod::kIvr, 50).data, normalize_ivr(f, Percentile(50)).data);
  EXPECT_EQ(normalize(f, NormMethod::kMax, 50).data, normalize_max(f).data);
  for (auto m : {NormMethod::kMinMax, NormMethod::kMax, NormMethod::kPaS, NormMethod::kIvr}) {
    EXPECT_EQ(parse_norm_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_norm_method("softmax"), Error);
  EXPECT_THROW(normalize(f, NormMethod::kPaS, 120), Error);
}

TEST(NormalizeTest, RejectsNonFiniteMap) {
  EXPECT_THROW(normalize_minmax(map2x2(0, 1, INFINITY, 2)), Error);
  EXPECT_THROW(normalize_ivr(map2x2(0, 1, std::nanf(""), 2), Percentile(5)), Error);
}

TEST(NormalizePropertyTest, OutputInUnitRange) {
  std::mt19937_64 rng(30);
  std::uniform_real_distribution<double> p(0.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double scale = std::pow(10.0, trial % 7 - 3);
    const ScoreMap f = testing::random_map(rng, 6, 5, -scale, scale * 0.7);
    for (const NormalizedMap& m : all_methods(f, p(rng))) {
      for (float v : m.data) {
        EXPECT_GE(v, 0.0f);
        EXPECT_LE(v, 1.0f);
      }
      EXPECT_EQ(m.width, f.width);
      EXPECT_EQ(m.height, f.height);
    }
  }
}

TEST(NormalizePropertyTest, MinMaxAffineInvariance) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const ScoreMap f = testing::random_map(rng, 8, 8);
    const NormalizedMap base = normalize_minmax(f);
    for (double a : {0.5, 3.7}) {
      for (double b : {-2.0, 10.0}) {
        ScoreMap g = f;
        for (double& v : g.data) v = a * v + b;
        EXPECT_LE(max_abs_diff(normalize_minmax(g), base), 1e-6);
      }
    }
  }
}

TEST(NormalizePropertyTest, MonotoneOrder) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    const ScoreMap f = testing::random_map(rng, 6, 6);
    for (const NormalizedMap& m : all_methods(f, 10.0 + trial * 2)) {
      for (size_t a = 0; a < f.size(); ++a) {
        for (size_t b = 0; b < f.size(); ++b) {
          if (f.data[a] <= f.data[b]) EXPECT_LE(m.data[a], m.data[b]);
        }
      }
    }
  }
}

TEST(NormalizePropertyTest, ArgmaxPreserved) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    ScoreMap f = testing::random_map(rng, 5, 5, -1.0, 1.0);
    // Tie the maximum at several pixels, and make it positive for max norm.
    const float top = 1.5f;
    f.data[trial % 25] = top;
    f.data[(trial * 7 + 3) % 25] = top;
    const std::vector<NormalizedMap> out = all_methods(f, 40.0);
    for (size_t i = 0; i < f.size(); ++i) {
      const bool is_max = f.data[i] == top;
      EXPECT_EQ(is_max, out[0].data[i] == 1.0f) << "minmax " << i;
      EXPECT_EQ(is_max, out[1].data[i] == 1.0f) << "max " << i;
      if (is_max) EXPECT_EQ(out[2].data[i], 1.0f) << "pas " << i;
      EXPECT_EQ(is_max, out[3].data[i] == 1.0f) << "ivr " << i;
    }
  }
}

}  // namespace
}  // namespace wsol

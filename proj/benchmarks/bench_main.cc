#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "wsol/localize.hpp"
#include "wsol/metrics.hpp"
#include "wsol/normalize.hpp"
#include "wsol/synth.hpp"

namespace {

using namespace wsol;

ScoreMap noise_map(int side) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 4.0);
  ScoreMap m{"bench", side, side, std::vector<double>(static_cast<size_t>(side) * side)};
  for (double& v : m.data) v = u(rng);
  return m;
}

void BM_NormalizeMinMax(benchmark::State& state) {
  const ScoreMap m = noise_map(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(normalize_minmax(m));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(m.data.size()));
}
BENCHMARK(BM_NormalizeMinMax)->Arg(64)->Arg(224);

void BM_NormalizeIvr(benchmark::State& state) {
  const ScoreMap m = noise_map(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(normalize_ivr(m, Percentile(10)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(m.data.size()));
}
BENCHMARK(BM_NormalizeIvr)->Arg(64)->Arg(224);

void BM_ConnectedComponents(benchmark::State& state) {
  const NormalizedMap n = normalize_minmax(noise_map(static_cast<int>(state.range(0))));
  const BinaryMask mask = threshold_mask(n, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(boxes_from_mask(mask, Connectivity::kEight));
}
BENCHMARK(BM_ConnectedComponents)->Arg(64)->Arg(224);

void BM_MaxBoxAccV2(benchmark::State& state) {
  SynthSpec spec;
  spec.count = static_cast<int>(state.range(0));
  spec.sinkhole_probability = 0.3;
  std::vector<BoxSample> samples;
  for (const SynthImage& img : generate(spec)) {
    samples.push_back({normalize_minmax(img.map), img.truth});
  }
  BoxEvalConfig config;
  config.grid = ThresholdGrid(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(max_box_acc_v2(samples, config));
}
BENCHMARK(BM_MaxBoxAccV2)->Args({50, 100})->Args({50, 1000})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "honest_forest/bootstrap.hpp"
#include "honest_forest/data.hpp"
#include "honest_forest/estimators.hpp"
#include "honest_forest/experiments.hpp"
#include "honest_forest/splitters.hpp"

using namespace honest_forest;

namespace {

Dataset bench_dataset(std::size_t n, std::size_t d) {
  TruthDescriptor truth;
  truth.regression_kind = RegressionKind::SinusoidLinear;
  truth.freqs = {1.0, 0.0};
  truth.coeffs = {0.0, 1.0};
  truth.noise_kind = NoiseKind::Gaussian;
  truth.noise_sigma = 0.5;
  if (d != 2) {
    truth.freqs.assign(d, 0.0);
    truth.coeffs.assign(d, 1.0);
    truth.freqs[0] = 1.0;
  }
  return generate_dataset(truth, n, d, 7);
}

void BM_GenerateDataset(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bench_dataset(n, 2).responses.data());
    ++seed;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_GenerateDataset)->Arg(1 << 10)->Arg(1 << 14);

void BM_GrowCentered(benchmark::State& state) {
  const long depth = state.range(0);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grow_centered(2, {0.5, 0.5}, depth, seed++).leaf_count());
  }
}
BENCHMARK(BM_GrowCentered)->Arg(6)->Arg(10)->Arg(12);

void BM_GrowUniform(benchmark::State& state) {
  const long depth = state.range(0);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grow_uniform(2, depth, seed++).leaf_count());
  }
}
BENCHMARK(BM_GrowUniform)->Arg(6)->Arg(10);

void BM_GrowRegularAdaptive(benchmark::State& state) {
  const std::size_t n_j = static_cast<std::size_t>(state.range(0));
  const Dataset data = bench_dataset(n_j, 2);
  const std::vector<double> ones(n_j, 1.0);
  RegularAdaptiveConfig cfg;
  cfg.alpha = 0.3;
  cfg.feature_floor = {0.5, 0.5};
  const long k_n = evaluate_schedule({ScheduleKind::PolyNodeSize, 2.0 / 3.0}, n_j);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        grow_regular_adaptive(data.features, ones, cfg, k_n, n_j, seed++).tree.leaf_count());
  }
}
BENCHMARK(BM_GrowRegularAdaptive)->Arg(1 << 12)->Arg(1 << 14);

void BM_TreePredict(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Dataset data = bench_dataset(n, 2);
  const Tree tree = grow_centered(2, {0.5, 0.5}, 6, 3);
  PredictionSample sample;
  sample.features = &data.features;
  sample.responses = &data.responses;
  const std::vector<double> x{0.371, 0.802};
  for (auto _ : state) {
    benchmark::DoNotOptimize(tree_predict(tree, sample, x).stats.n_in_leaf);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_TreePredict)->Arg(1 << 12)->Arg(1 << 16);

void BM_DrawMultinomial(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  WeightScheme scheme;
  scheme.kind = WeightSchemeKind::Multinomial;
  scheme.fixed_m = static_cast<long>(n);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(draw_weights(scheme, n, seed++).w.data());
  }
}
BENCHMARK(BM_DrawMultinomial)->Arg(100)->Arg(10000);

void BM_PointwiseReplication(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::Pointwise;
  cfg.d = 2;
  cfg.truth.regression_kind = RegressionKind::SinusoidLinear;
  cfg.truth.freqs = {1.0, 0.0};
  cfg.truth.coeffs = {0.0, 1.0};
  cfg.truth.noise_kind = NoiseKind::Gaussian;
  cfg.truth.noise_sigma = 0.5;
  cfg.splitter.kind = SplitterKind::Centered;
  cfg.splitter.feature_probs = {0.5, 0.5};
  cfg.splitter.schedule = {ScheduleKind::Log2PowerDepth, 2.0 / 3.0};
  cfg.n_grid = {static_cast<std::size_t>(state.range(0))};
  cfg.replications = 8;
  cfg.query_points = {{0.5, 0.5}};
  cfg.master_seed = 99;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_pointwise(cfg, 1).rows.size());
  }
}
BENCHMARK(BM_PointwiseReplication)->Arg(1 << 12)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

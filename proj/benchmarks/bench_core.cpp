#include "strokelab/preprocess.hpp"
#include "strokelab/segment.hpp"
#include "strokelab/svm.hpp"
#include "strokelab/synth.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace strokelab;

namespace {

// Two Gaussian blobs in 3 dimensions with labels -1/+1.
void make_blobs(std::size_t n, std::uint64_t seed, FeatureMatrix& x, std::vector<int>& y) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  x = FeatureMatrix(n, 3);
  y.assign(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? 1 : -1;
    y[i] = label;
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = g(rng) + 0.8 * label;
  }
}

// Piecewise-constant signal with `segments` equal-length levels plus noise.
FeatureMatrix step_signal(std::size_t n, std::size_t segments, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.2);
  FeatureMatrix s(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    const double level = static_cast<double>((i * segments) / n);
    for (std::size_t j = 0; j < 3; ++j) s(i, j) = level * (j + 1) + g(rng);
  }
  return s;
}

void BM_smo_rbf(benchmark::State& state) {
  FeatureMatrix x;
  std::vector<int> y;
  make_blobs(static_cast<std::size_t>(state.range(0)), 7, x, y);
  svm::KernelSpec k;
  k.gamma = 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(svm::train_binary_smo(x, y, k, {.C = 1.0}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_smo_rbf)->RangeMultiplier(2)->Range(100, 1600)->Unit(benchmark::kMillisecond)->Complexity();

void BM_dynp_five_phases(benchmark::State& state) {
  const auto s = step_signal(static_cast<std::size_t>(state.range(0)), 5, 11);
  for (auto _ : state) benchmark::DoNotOptimize(segment::detect_changepoints_dynp(s, 4, 3));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_dynp_five_phases)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMicrosecond)->Complexity();

void BM_pelt(benchmark::State& state) {
  // One level change every 64 frames, so pruning keeps the candidate set small.
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto s = step_signal(n, n / 64, 13);
  for (auto _ : state) benchmark::DoNotOptimize(segment::detect_changepoints_pelt(s, 1.0, 3));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_pelt)->RangeMultiplier(4)->Range(256, 16384)->Unit(benchmark::kMicrosecond)->Complexity();

void BM_pca_fit(benchmark::State& state) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  FeatureMatrix x(static_cast<std::size_t>(state.range(0)), 12);
  for (double& v : x.values) v = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(preprocess::pca_fit(x, 3));
}
BENCHMARK(BM_pca_fit)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_segment_swing(benchmark::State& state) {
  std::mt19937_64 rng(19);
  const auto profile = synth::default_config().intermediate;
  const auto swing = synth::generate_swing(profile, rng);
  const auto signal = segment::euler_matrix(swing.frames, 0, swing.frames.size());
  for (auto _ : state) benchmark::DoNotOptimize(segment::segment_phases(signal));
}
BENCHMARK(BM_segment_swing)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();

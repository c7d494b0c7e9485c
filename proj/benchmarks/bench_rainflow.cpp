#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rfd/degradation.hpp"
#include "rfd/rainflow.hpp"

namespace {

std::vector<double> random_profile(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(n);
  for (auto& v : s) v = u(rng);
  return s;
}

void BM_CountDepthsOnly(benchmark::State& state) {
  const auto s = random_profile(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto cycles = rfd::rainflow::count_cycles(s, {.assign_intervals = false});
    benchmark::DoNotOptimize(cycles);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CountDepthsOnly)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_CountWithIntervals(benchmark::State& state) {
  const auto s = random_profile(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto cycles = rfd::rainflow::count_cycles(s);
    benchmark::DoNotOptimize(cycles);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CountWithIntervals)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_CycleCost(benchmark::State& state) {
  const auto s = random_profile(1801);
  const auto model = rfd::degradation::StressModel::lithium_ion_default();
  for (auto _ : state) benchmark::DoNotOptimize(rfd::degradation::cycle_cost(s, model));
}
BENCHMARK(BM_CycleCost);

}  // namespace

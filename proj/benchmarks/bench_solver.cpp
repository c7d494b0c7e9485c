#include <benchmark/benchmark.h>

#include "rfd/market.hpp"
#include "rfd/solver.hpp"

namespace {

rfd::solver::DispatchProblem problem(std::size_t horizon) {
  rfd::solver::DispatchProblem p;
  p.signal = rfd::market::generate_signal(1, horizon);
  return p;
}

void BM_Subgradient(benchmark::State& state) {
  const auto p = problem(static_cast<std::size_t>(state.range(0)));
  const auto x = rfd::solver::initial_point(p, {});
  for (auto _ : state) {
    auto g = rfd::solver::subgradient(x.charge, x.discharge, p, 100.0);
    benchmark::DoNotOptimize(g);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Subgradient)->RangeMultiplier(2)->Range(225, 3600)->Complexity();

// One barrier stage of 200 iterations.
void BM_SolveStage(benchmark::State& state) {
  const auto p = problem(static_cast<std::size_t>(state.range(0)));
  rfd::solver::SolverConfig config;
  config.barrier_stages = 1;
  config.inner_iterations = 200;
  for (auto _ : state) {
    auto sol = rfd::solver::solve(p, config);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(BM_SolveStage)->Arg(300)->Arg(1800)->Unit(benchmark::kMillisecond);

}  // namespace

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rfd/market.hpp"
#include "rfd/solver.hpp"

namespace rfd::market {

/// Dispatch from the solver with the linear stress model phi(d) = k1 * d,
/// which makes the cycle cost lambda_r * k1 * sum_t |ds(t)|.
solver::Solution policy_linear_cost(const solver::DispatchProblem& problem,
                                    const solver::SolverConfig& config, double k1);

/// Population standard deviation of a SoC trajectory.
double soc_standard_deviation(std::span<const double> soc);

struct PolicyOutcome {
  std::string name;  // "rainflow", "no_cost" or "linear"
  PowerSchedule schedule;
  std::vector<double> soc;
  EconomicsReport window;  // over the simulated horizon
  EconomicsReport annual;  // scaled to 8760 h
  double soc_std = 0.0;
  std::optional<solver::Solution> solution;  // absent for the follow policy
};

struct BenchmarkResult {
  std::array<PolicyOutcome, 3> policies;  // rainflow, no_cost, linear

  [[nodiscard]] const PolicyOutcome& rainflow() const { return policies[0]; }
  [[nodiscard]] const PolicyOutcome& no_cost() const { return policies[1]; }
  [[nodiscard]] const PolicyOutcome& linear() const { return policies[2]; }
};

/// Runs the three pipelines on the same signal and scores every dispatch with
/// the problem's stress model (posterior assessment). Modeled degradation is
/// what each pipeline believed it spent: the full model for rainflow, zero for
/// signal following, lambda_r * k1 * total variation for linear.
BenchmarkResult run_benchmark(const solver::DispatchProblem& problem,
                              const solver::SolverConfig& config, double linear_k1);

}  // namespace rfd::market

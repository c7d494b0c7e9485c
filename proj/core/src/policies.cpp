#include "rfd/policies.hpp"

#include <cmath>
#include <numeric>

#include "rfd/degradation.hpp"
#include "rfd/error.hpp"

namespace rfd::market {

solver::Solution policy_linear_cost(const solver::DispatchProblem& problem,
                                    const solver::SolverConfig& config, double k1) {
  solver::DispatchProblem linear = problem;
  linear.model = degradation::StressModel::linear(k1);
  return solver::solve(linear, config);
}

double soc_standard_deviation(std::span<const double> soc) {
  if (soc.empty()) throw InputError("soc_standard_deviation: empty trajectory");
  const double n = static_cast<double>(soc.size());
  const double mean = std::accumulate(soc.begin(), soc.end(), 0.0) / n;
  double sq = 0.0;
  for (double s : soc) sq += (s - mean) * (s - mean);
  return std::sqrt(sq / n);
}

namespace {

PolicyOutcome score(std::string name, PowerSchedule schedule, const solver::DispatchProblem& problem,
                    double modeled) {
  PolicyOutcome out;
  out.name = std::move(name);
  out.soc = soc_trajectory(schedule.charge, schedule.discharge, problem.battery);
  out.window = evaluate_economics(schedule.charge, schedule.discharge, problem.market,
                                  problem.signal, problem.battery, problem.model, modeled,
                                  problem.penalty);
  out.annual = annualize(out.window, problem.battery);
  out.soc_std = soc_standard_deviation(out.soc);
  out.schedule = std::move(schedule);
  return out;
}

}  // namespace

BenchmarkResult run_benchmark(const solver::DispatchProblem& problem,
                              const solver::SolverConfig& config, double linear_k1) {
  problem.validate();
  BenchmarkResult result;
  const double lambda_r = problem.battery.replacement_cost();

  auto rf = solver::solve(problem, config);
  result.policies[0] = score("rainflow", {rf.charge, rf.discharge}, problem, rf.degradation_cost);
  result.policies[0].solution = std::move(rf);

  auto follow = policy_follow(problem.signal, problem.battery, problem.market.capacity_mw);
  result.policies[1] = score("no_cost", std::move(follow), problem, 0.0);

  auto lin = policy_linear_cost(problem, config, linear_k1);
  const auto linear_model = degradation::StressModel::linear(linear_k1);
  const double modeled = lambda_r * degradation::cycle_cost(lin.soc, linear_model);
  result.policies[2] = score("linear", {lin.charge, lin.discharge}, problem, modeled);
  result.policies[2].solution = std::move(lin);
  return result;
}

}  // namespace rfd::market

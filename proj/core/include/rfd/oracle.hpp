#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfd/degradation.hpp"
#include "rfd/solver.hpp"

namespace rfd::oracle {

/// A profile written as its first value plus one signed jump per interval.
struct StepDecomposition {
  double initial = 0.0;
  std::vector<double> amplitudes;

  /// s(0) = initial, s(t+1) = s(t) + amplitudes[t].
  [[nodiscard]] std::vector<double> reconstruct() const;
};

StepDecomposition decompose_steps(std::span<const double> profile);

/// Any stress function; lets checks run against deliberately broken models.
using StressFunction = std::function<double(double)>;

StressFunction as_function(const degradation::StressModel& model);

/// Sum of phi over every rainflow half cycle of `profile`.
double rainflow_cost(std::span<const double> profile, const StressFunction& phi);

/// Outcome of one property instance. `excess` is how far the inequality is
/// from holding (<= 0 when it holds); the check fails when excess > tolerance.
struct CheckOutcome {
  double lhs = 0.0;
  double rhs = 0.0;
  double excess = 0.0;
  bool violated = false;
};

/// f(l*s1 + (1-l)*s2) <= l*f(s1) + (1-l)*f(s2).
CheckOutcome check_convexity(std::span<const double> s1, std::span<const double> s2,
                             double lambda, const StressFunction& phi, double tolerance = 1e-8);

/// Merging steps i and i+1 into one never raises the cost.
CheckOutcome check_adjacent_merge(std::span<const double> profile, std::size_t step,
                                  const StressFunction& phi, double tolerance = 1e-10);

/// Profile with samples after `step` shifted by `amplitude`
/// (s + amplitude * U_step).
std::vector<double> add_step(std::span<const double> profile, std::size_t step, double amplitude);

/// Adding amplitude*U_step changes the half-cycle depths by at most |P| in
/// total and per cycle. Depth lists are sorted descending and the shorter
/// one is padded with zeros before pairing.
CheckOutcome check_perturbation_bounds(std::span<const double> profile, std::size_t step,
                                       double amplitude, double tolerance = 1e-10);

/// g(x1 + x2) >= g(x1) + g(x2) for x1, x2 >= 0.
CheckOutcome check_superadditive(const StressFunction& g, double x1, double x2,
                                 double tolerance = 1e-10);
/// g(x1 - x2) <= g(x1) - g(x2) for x1 >= x2 >= 0.
CheckOutcome check_difference_bound(const StressFunction& g, double x1, double x2,
                                    double tolerance = 1e-10);
/// g(x1 + x2 - x3) >= g(x1) + g(x2) - g(x3) for x3 <= min(x1, x2).
CheckOutcome check_three_term(const StressFunction& g, double x1, double x2, double x3,
                              double tolerance = 1e-10);
/// g(sum x) >= sum_{x>=0} g(x) - sum_{x<0} g(|x|) when sum x = D > 0 and
/// every |x_i| <= D.
CheckOutcome check_signed_aggregation(const StressFunction& g, std::span<const double> xs,
                                      double tolerance = 1e-10);

struct FiniteDifference {
  std::vector<double> charge;
  std::vector<double> discharge;
  double step_used = 0.0;
  // Coordinates whose forward and backward quotients disagree: the point sits
  // on a kink (junction or exact signal following) along that axis.
  std::vector<std::size_t> nonsmooth_coordinates;

  [[nodiscard]] bool smooth() const { return nonsmooth_coordinates.empty(); }
};

/// Centered differences of solver::barrier_objective. The step shrinks until
/// every probe stays strictly interior. Coordinates are numbered 0..T-1 for
/// charge and T..2T-1 for discharge.
FiniteDifference finite_difference_subgradient(std::span<const double> charge,
                                               std::span<const double> discharge,
                                               const solver::DispatchProblem& problem,
                                               double barrier_weight, double step = 1e-6);

struct BruteForceResult {
  double best_loss = 0.0;        // min of -R + degradation over the grid
  PowerSchedule schedule;
  std::size_t evaluations = 0;   // grid points visited
  std::size_t feasible = 0;      // of which SoC stayed in bounds
};

/// Exhaustive search over net power b(t) in `levels` evenly spaced values of
/// [-P_max, P_max]; b > 0 discharges, b < 0 charges. Requires T <= 8 and
/// 2 <= levels <= 7 (InputError otherwise) and at least one feasible point
/// (InfeasibleError).
BruteForceResult brute_force_optimum(const solver::DispatchProblem& problem, std::size_t levels);

struct Violation {
  double excess = 0.0;
  std::string reproducer;  // inputs at full precision
};

struct PropertyReport {
  std::string property;
  std::size_t samples = 0;
  std::size_t violations = 0;
  std::size_t skipped = 0;  // instances excluded by the check's contract
  double worst = 0.0;       // largest excess seen, violating or not
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  std::vector<Violation> examples;  // first few violations

  [[nodiscard]] bool passed() const { return violations == 0; }
  void record(const CheckOutcome& outcome, const std::function<std::string()>& reproducer);
};

struct SuiteOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  // Adds a deliberately concave stress function (k5 = 0.5) to the model list;
  // the suites are expected to catch it.
  bool inject_concave = false;
};

std::vector<std::string_view> suite_names();

/// Runs one named suite: convexity, merge, perturbation, gradient,
/// solver-gap, functions, or all (every suite except functions). Throws
/// InputError for an unknown name.
std::vector<PropertyReport> run_suite(std::string_view name, const SuiteOptions& options);

std::vector<PropertyReport> convexity_suite(const SuiteOptions& options);
std::vector<PropertyReport> functions_suite(const SuiteOptions& options);
std::vector<PropertyReport> merge_suite(const SuiteOptions& options);
std::vector<PropertyReport> perturbation_suite(const SuiteOptions& options);
/// Uses min(samples, 50) smooth interior points.
std::vector<PropertyReport> gradient_suite(const SuiteOptions& options);
/// Uses min(samples, 20) instances.
std::vector<PropertyReport> solver_gap_suite(const SuiteOptions& options);

/// Toy dispatch instance used by the solver-gap suite: T = 6, 3-minute
/// intervals, uniform random signal and initial SoC.
solver::DispatchProblem toy_problem(std::uint64_t seed);
/// Solver settings used for toy instances.
solver::SolverConfig toy_solver_config();

}  // namespace rfd::oracle

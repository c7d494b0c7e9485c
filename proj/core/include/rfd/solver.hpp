#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rfd/battery.hpp"
#include "rfd/degradation.hpp"
#include "rfd/market.hpp"

namespace rfd::solver {

using rfd::soc_trajectory;

/// Degradation-aware regulation dispatch: maximize R(c, d) - lambda_r * f(s)
/// over c, d in [0, P_max]^T with s in [s_min, s_max].
struct DispatchProblem {
  BatteryParams battery;
  degradation::StressModel model = degradation::StressModel::lithium_ion_default();
  market::MarketParams market;
  market::RegulationSignal signal{std::vector<double>{}};
  market::PenaltyForm penalty = market::PenaltyForm::signed_mismatch;

  [[nodiscard]] std::size_t horizon() const { return signal.size(); }
  /// Throws InputError (bad parameters) or InfeasibleError.
  void validate() const;
};

/// How the degradation term's subgradient is assembled.
enum class SubgradientRule {
  // Every half cycle contributes sign * lambda_r * phi'(depth) to each
  // interval between the two turning points that define its depth. This is
  // the gradient wherever the cycle structure is locally stable.
  exact,
  // Each interval takes phi' of the half cycle(s) owning it (mean over the
  // owners at junctions); no contribution to the opposite power direction.
  owning_cycle,
};

std::string_view to_string(SubgradientRule rule);
SubgradientRule parse_subgradient_rule(std::string_view name);

struct SolverConfig {
  double step_size = 0.01;         // constant alpha
  double barrier_weight0 = 10.0;   // lambda of the first stage
  double barrier_growth = 10.0;    // lambda multiplier between stages
  std::size_t barrier_stages = 5;
  std::size_t inner_iterations = 2000;
  double interior_margin = 1e-9;   // barrier arguments must stay above this
  std::uint64_t seed = 0;
  SubgradientRule rule = SubgradientRule::exact;
  std::size_t max_halvings = 30;
  std::size_t stall_window = 200;       // early stop when the stage best
  double stall_tolerance = 1e-9;        // improves less than this (relative)

  void validate(const BatteryParams& battery) const;
};

/// Objective of the minimization form, split into its parts.
struct ObjectiveParts {
  double revenue = 0.0;
  double degradation_cost = 0.0;  // lambda_r * sum of phi over half cycles
  double barrier = 0.0;           // -(1/lambda) * sum of the six log terms

  /// -R + degradation: the unbarriered objective.
  [[nodiscard]] double utility_loss() const { return -revenue + degradation_cost; }
  [[nodiscard]] double total() const { return utility_loss() + barrier; }
};

/// True when all 6T barrier arguments exceed `margin`.
bool strictly_interior(std::span<const double> charge, std::span<const double> discharge,
                       const DispatchProblem& problem, double margin = 0.0);

/// Barrier objective
///   -R + lambda_r * [sum phi(d_ch) + sum phi(d_dc)]
///   - (1/lambda) * sum_t [log(s_max - s) + log(s - s_min) + log(P_max - c)
///                         + log(c) + log(P_max - d) + log(d)]
/// where s ranges over the T samples after the fixed initial one.
/// Throws DomainError at a non-interior point.
ObjectiveParts objective_parts(std::span<const double> charge, std::span<const double> discharge,
                               const DispatchProblem& problem, double barrier_weight);
double barrier_objective(std::span<const double> charge, std::span<const double> discharge,
                         const DispatchProblem& problem, double barrier_weight);
/// -R + degradation without barrier terms; defined at any point whose SoC
/// stays in [0, 1].
double utility_loss(std::span<const double> charge, std::span<const double> discharge,
                    const DispatchProblem& problem);

struct Subgradient {
  std::vector<double> charge;
  std::vector<double> discharge;

  [[nodiscard]] double norm() const;
};

/// Subgradient of the barrier objective at a strictly interior point.
Subgradient subgradient(std::span<const double> charge, std::span<const double> discharge,
                        const DispatchProblem& problem, double barrier_weight,
                        SubgradientRule rule = SubgradientRule::exact);

struct StepResult {
  PowerSchedule state;
  double step_taken = 0.0;    // alpha after halving, 0 when rejected
  std::size_t halvings = 0;
  bool accepted = false;
};

/// One subgradient step x - alpha * g. Alpha is halved (whole vector) while
/// any barrier argument of the candidate is <= margin, at most
/// `max_halvings` times; if that is exhausted the state is returned unchanged
/// and `accepted` is false.
StepResult step(const PowerSchedule& state, const Subgradient& direction, double alpha,
                const DispatchProblem& problem, double margin, std::size_t max_halvings = 30);

struct Solution {
  std::vector<double> charge;
  std::vector<double> discharge;
  std::vector<double> soc;
  double best_objective = 0.0;           // min of objective_trace (unbarriered)
  std::vector<double> objective_trace;   // unbarriered objective per iterate
  double revenue = 0.0;
  double degradation_cost = 0.0;
  double barrier_value = 0.0;            // at the final barrier weight
  double final_barrier_weight = 0.0;
  std::size_t iterations = 0;
  std::size_t rejected_steps = 0;
  std::size_t stages_run = 0;
  bool converged = false;                // every stage ended by the stall test
  double max_subgradient_norm = 0.0;     // over the final stage
  double simultaneity = 0.0;             // sum_t min(c, d) * t_s, MWh
};

/// Initial point: d = P_max/2 and c = d / (eta_c * eta_d), which leaves SoC
/// at s0; both are scaled down if c would reach P_max.
PowerSchedule initial_point(const DispatchProblem& problem, const SolverConfig& config);

/// Barrier path following with constant-step subgradient descent inside each
/// stage, keeping the best iterate under the unbarriered objective.
Solution solve(const DispatchProblem& problem, const SolverConfig& config);

/// Asymptotic suboptimality of constant-step subgradient descent:
/// G^2 * alpha / 2.
double convergence_gap(double subgradient_bound, double alpha);

}  // namespace rfd::solver

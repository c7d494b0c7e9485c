#include "rfd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rfd/error.hpp"
#include "rfd/rainflow.hpp"

namespace rfd::solver {

namespace {

void check_sizes(std::span<const double> charge, std::span<const double> discharge,
                 const DispatchProblem& problem) {
  if (charge.size() != problem.horizon() || discharge.size() != problem.horizon()) {
    throw InputError("solver: power vectors must have length T = " +
                     std::to_string(problem.horizon()));
  }
}

// Smallest of the 6T barrier arguments; SoC samples after the initial one.
double min_barrier_argument(std::span<const double> charge, std::span<const double> discharge,
                            std::span<const double> soc, const BatteryParams& battery) {
  double lowest = std::numeric_limits<double>::infinity();
  const double pmax = battery.power_max_mw;
  for (std::size_t t = 0; t < charge.size(); ++t) {
    lowest = std::min({lowest, charge[t], pmax - charge[t], discharge[t], pmax - discharge[t],
                       battery.soc_max - soc[t + 1], soc[t + 1] - battery.soc_min});
  }
  return lowest;
}

double log_barrier_sum(std::span<const double> charge, std::span<const double> discharge,
                       std::span<const double> soc, const BatteryParams& battery) {
  const double pmax = battery.power_max_mw;
  double sum = 0.0;
  for (std::size_t t = 0; t < charge.size(); ++t) {
    const double s = soc[t + 1];
    sum += std::log(battery.soc_max - s) + std::log(s - battery.soc_min) +
           std::log(pmax - charge[t]) + std::log(charge[t]) + std::log(pmax - discharge[t]) +
           std::log(discharge[t]);
  }
  return sum;
}

// One rainflow count feeds the objective value and the subgradient.
class Evaluator {
 public:
  explicit Evaluator(const DispatchProblem& problem)
      : problem_(problem),
        soc_gradient_(problem.horizon()),
        barrier_tail_(problem.horizon()) {}

  ObjectiveParts evaluate(std::span<const double> charge, std::span<const double> discharge,
                          double barrier_weight, SubgradientRule rule, Subgradient* grad) {
    const auto& battery = problem_.battery;
    soc_ = soc_trajectory(charge, discharge, battery);
    if (!(min_barrier_argument(charge, discharge, soc_, battery) > 0.0)) {
      throw DomainError("barrier objective evaluated at a non-interior point");
    }
    const bool need_shares = grad != nullptr && rule == SubgradientRule::owning_cycle;
    const auto cycles = rainflow::count_cycles(soc_, {.assign_intervals = need_shares});

    ObjectiveParts parts;
    parts.revenue = market::revenue(charge, discharge, problem_.market, problem_.signal,
                                    battery.interval_hours, problem_.penalty);
    const double lambda_r = battery.replacement_cost();
    parts.degradation_cost = lambda_r * degradation::cycle_cost(cycles, problem_.model);
    parts.barrier = -log_barrier_sum(charge, discharge, soc_, battery) / barrier_weight;
    if (grad != nullptr) fill_subgradient(charge, discharge, cycles, barrier_weight, rule, *grad);
    return parts;
  }

  [[nodiscard]] const std::vector<double>& soc() const { return soc_; }

 private:
  void fill_subgradient(std::span<const double> charge, std::span<const double> discharge,
                        const rainflow::CycleSet& cycles, double barrier_weight,
                        SubgradientRule rule, Subgradient& grad) {
    const auto& battery = problem_.battery;
    const std::size_t horizon = charge.size();
    grad.charge.assign(horizon, 0.0);
    grad.discharge.assign(horizon, 0.0);
    market::negative_revenue_subgradient(charge, discharge, problem_.market, problem_.signal,
                                         battery.interval_hours, problem_.penalty, grad.charge,
                                         grad.discharge);

    const double kc = battery.charge_gain();
    const double kd = battery.discharge_gain();
    const double lambda_r = battery.replacement_cost();

    if (rule == SubgradientRule::exact) {
      slopes_.resize(cycles.half_cycles.size());
      for (std::size_t i = 0; i < slopes_.size(); ++i) {
        slopes_[i] = lambda_r * problem_.model.derivative(cycles.half_cycles[i].depth);
      }
      rainflow::span_gradient(cycles, slopes_, soc_gradient_);
      for (std::size_t t = 0; t < horizon; ++t) {
        grad.charge[t] += kc * soc_gradient_[t];
        grad.discharge[t] -= kd * soc_gradient_[t];
      }
    } else {
      owner_slope_.assign(horizon, 0.0);
      owner_count_.assign(horizon, 0);
      for (const auto& h : cycles.half_cycles) {
        const double slope = problem_.model.derivative(h.depth);
        for (const auto& share : h.shares) {
          owner_slope_[share.interval] += slope;
          ++owner_count_[share.interval];
        }
      }
      for (std::size_t t = 0; t < horizon; ++t) {
        if (owner_count_[t] == 0) continue;
        const double mean_slope = lambda_r * owner_slope_[t] / owner_count_[t];
        if (soc_[t + 1] > soc_[t]) {
          grad.charge[t] += mean_slope * kc;
        } else {
          grad.discharge[t] += mean_slope * kd;
        }
      }
    }

    // d/d(ds_t) of the SoC log terms: every later sample moves with ds_t.
    const double inv_weight = 1.0 / barrier_weight;
    double tail = 0.0;
    for (std::size_t t = horizon; t-- > 0;) {
      const double s = soc_[t + 1];
      tail += -1.0 / (battery.soc_max - s) + 1.0 / (s - battery.soc_min);
      barrier_tail_[t] = tail;
    }
    const double pmax = battery.power_max_mw;
    for (std::size_t t = 0; t < horizon; ++t) {
      grad.charge[t] -= inv_weight * (kc * barrier_tail_[t] - 1.0 / (pmax - charge[t]) +
                                      1.0 / charge[t]);
      grad.discharge[t] -= inv_weight * (-kd * barrier_tail_[t] - 1.0 / (pmax - discharge[t]) +
                                         1.0 / discharge[t]);
    }
  }

  const DispatchProblem& problem_;
  std::vector<double> soc_;
  std::vector<double> slopes_;
  std::vector<double> soc_gradient_;
  std::vector<double> barrier_tail_;
  std::vector<double> owner_slope_;
  std::vector<unsigned> owner_count_;
};

double simultaneity(const PowerSchedule& x, double interval_hours) {
  double sum = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) sum += std::min(x.charge[t], x.discharge[t]);
  return sum * interval_hours;
}

}  // namespace

void DispatchProblem::validate() const {
  if (!(battery.soc_initial > battery.soc_min && battery.soc_initial < battery.soc_max)) {
    throw InfeasibleError("initial SoC must lie strictly inside [soc_min, soc_max]");
  }
  battery.validate();
  market.validate();
  if (signal.size() == 0) throw InputError("dispatch problem needs a non-empty signal");
}

std::string_view to_string(SubgradientRule rule) {
  return rule == SubgradientRule::exact ? "exact" : "owning_cycle";
}

SubgradientRule parse_subgradient_rule(std::string_view name) {
  if (name == "exact") return SubgradientRule::exact;
  if (name == "owning_cycle") return SubgradientRule::owning_cycle;
  throw InputError("unknown subgradient rule '" + std::string(name) +
                   "' (expected exact|owning_cycle)");
}

void SolverConfig::validate(const BatteryParams& battery) const {
  if (!(step_size > 0.0)) throw InputError("solver: step_size must be > 0");
  if (!(barrier_weight0 > 0.0)) throw InputError("solver: barrier_weight0 must be > 0");
  if (!(barrier_growth > 1.0)) throw InputError("solver: barrier_growth must be > 1");
  if (!(interior_margin > 0.0 && interior_margin < battery.power_max_mw / 2.0)) {
    throw InputError("solver: interior_margin must lie in (0, P_max/2)");
  }
}

bool strictly_interior(std::span<const double> charge, std::span<const double> discharge,
                       const DispatchProblem& problem, double margin) {
  check_sizes(charge, discharge, problem);
  const auto soc = soc_trajectory(charge, discharge, problem.battery);
  return min_barrier_argument(charge, discharge, soc, problem.battery) > margin;
}

ObjectiveParts objective_parts(std::span<const double> charge, std::span<const double> discharge,
                               const DispatchProblem& problem, double barrier_weight) {
  check_sizes(charge, discharge, problem);
  Evaluator evaluator(problem);
  return evaluator.evaluate(charge, discharge, barrier_weight, SubgradientRule::exact, nullptr);
}

double barrier_objective(std::span<const double> charge, std::span<const double> discharge,
                         const DispatchProblem& problem, double barrier_weight) {
  return objective_parts(charge, discharge, problem, barrier_weight).total();
}

double utility_loss(std::span<const double> charge, std::span<const double> discharge,
                    const DispatchProblem& problem) {
  check_sizes(charge, discharge, problem);
  const auto soc = soc_trajectory(charge, discharge, problem.battery);
  const double r = market::revenue(charge, discharge, problem.market, problem.signal,
                                   problem.battery.interval_hours, problem.penalty);
  return -r + degradation::degradation_cost_dollars(soc, problem.model, problem.battery);
}

double Subgradient::norm() const {
  double sum = 0.0;
  for (double g : charge) sum += g * g;
  for (double g : discharge) sum += g * g;
  return std::sqrt(sum);
}

Subgradient subgradient(std::span<const double> charge, std::span<const double> discharge,
                        const DispatchProblem& problem, double barrier_weight,
                        SubgradientRule rule) {
  check_sizes(charge, discharge, problem);
  Evaluator evaluator(problem);
  Subgradient grad;
  evaluator.evaluate(charge, discharge, barrier_weight, rule, &grad);
  return grad;
}

StepResult step(const PowerSchedule& state, const Subgradient& direction, double alpha,
                const DispatchProblem& problem, double margin, std::size_t max_halvings) {
  const std::size_t horizon = state.size();
  StepResult result;
  result.state = state;
  if (direction.charge.size() != horizon || direction.discharge.size() != horizon) {
    throw InputError("step: subgradient length mismatch");
  }
  PowerSchedule candidate = state;
  double a = alpha;
  for (std::size_t halvings = 0; halvings <= max_halvings; ++halvings) {
    for (std::size_t t = 0; t < horizon; ++t) {
      candidate.charge[t] = state.charge[t] - a * direction.charge[t];
      candidate.discharge[t] = state.discharge[t] - a * direction.discharge[t];
    }
    const auto soc = soc_trajectory(candidate.charge, candidate.discharge, problem.battery);
    if (min_barrier_argument(candidate.charge, candidate.discharge, soc, problem.battery) > margin) {
      result.state = std::move(candidate);
      result.step_taken = a;
      result.halvings = halvings;
      result.accepted = true;
      return result;
    }
    a *= 0.5;
  }
  result.halvings = max_halvings;
  return result;
}

PowerSchedule initial_point(const DispatchProblem& problem, const SolverConfig& config) {
  const auto& b = problem.battery;
  const double loss = b.eta_charge * b.eta_discharge;
  double discharge = b.power_max_mw / 2.0;
  double charge = discharge / loss;
  if (charge >= b.power_max_mw - config.interior_margin) {
    charge = b.power_max_mw / 2.0;
    discharge = charge * loss;
  }
  const std::size_t horizon = problem.horizon();
  return {std::vector<double>(horizon, charge), std::vector<double>(horizon, discharge)};
}

Solution solve(const DispatchProblem& problem, const SolverConfig& config) {
  problem.validate();
  config.validate(problem.battery);

  Evaluator evaluator(problem);
  PowerSchedule x = initial_point(problem, config);
  PowerSchedule best = x;
  double best_value = std::numeric_limits<double>::infinity();

  Solution sol;
  double lambda = config.barrier_weight0;
  bool all_stalled = config.barrier_stages > 0;
  Subgradient grad;
  std::vector<double> stage_best_history;

  auto record = [&](const ObjectiveParts& parts, const PowerSchedule& point) {
    const double value = parts.utility_loss();
    sol.objective_trace.push_back(value);
    if (value < best_value) {
      best_value = value;
      best = point;
    }
  };

  for (std::size_t stage = 0; stage < config.barrier_stages && config.inner_iterations > 0;
       ++stage) {
    if (stage > 0) lambda *= config.barrier_growth;
    ++sol.stages_run;
    sol.max_subgradient_norm = 0.0;
    stage_best_history.clear();
    double stage_best = std::numeric_limits<double>::infinity();
    bool stalled = false;
    for (std::size_t k = 0; k < config.inner_iterations; ++k) {
      const auto parts = evaluator.evaluate(x.charge, x.discharge, lambda, config.rule, &grad);
      record(parts, x);
      stage_best = std::min(stage_best, parts.total());
      stage_best_history.push_back(stage_best);
      sol.max_subgradient_norm = std::max(sol.max_subgradient_norm, grad.norm());

      if (k >= config.stall_window) {
        const double earlier = stage_best_history[k - config.stall_window];
        if (earlier - stage_best <= config.stall_tolerance * std::max(1.0, std::abs(stage_best))) {
          stalled = true;
          break;
        }
      }

      auto moved = step(x, grad, config.step_size, problem, config.interior_margin,
                        config.max_halvings);
      if (!moved.accepted) {
        ++sol.rejected_steps;
        break;
      }
      x = std::move(moved.state);
      ++sol.iterations;
    }
    all_stalled = all_stalled && stalled;
  }

  // The last iterate has not been scored yet (or, with no iterations, the
  // initial point).
  const auto last = evaluator.evaluate(x.charge, x.discharge, lambda, config.rule, nullptr);
  record(last, x);

  const auto final_parts = evaluator.evaluate(best.charge, best.discharge, lambda, config.rule,
                                              nullptr);
  sol.soc = evaluator.soc();
  sol.best_objective = best_value;
  sol.revenue = final_parts.revenue;
  sol.degradation_cost = final_parts.degradation_cost;
  sol.barrier_value = final_parts.barrier;
  sol.final_barrier_weight = lambda;
  sol.converged = all_stalled;
  sol.simultaneity = simultaneity(best, problem.battery.interval_hours);
  sol.charge = std::move(best.charge);
  sol.discharge = std::move(best.discharge);
  return sol;
}

double convergence_gap(double subgradient_bound, double alpha) {
  if (!(subgradient_bound > 0.0) || !(alpha > 0.0)) {
    throw InputError("convergence_gap: G and alpha must be positive");
  }
  return subgradient_bound * subgradient_bound * alpha / 2.0;
}

}  // namespace rfd::solver

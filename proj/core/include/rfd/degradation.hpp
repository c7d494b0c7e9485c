#pragma once

#include <array>
#include <span>
#include <string_view>

#include "rfd/battery.hpp"
#include "rfd/rainflow.hpp"

namespace rfd::degradation {

/// Convex depth-of-discharge stress function phi(d): life lost by one half
/// cycle of depth d, as a fraction of total life.
///
///   linear       phi(d) = k1 * d
///   exponential  phi(d) = k2 * d * exp(k3 * d)
///   polynomial   phi(d) = k4 * d^k5        (k5 >= 1)
///
/// Every variant has phi(0) = 0 and is nondecreasing and convex on [0, 1].
class StressModel {
 public:
  enum class Variant { linear, exponential, polynomial };

  /// k1 >= 0; the other variants need positive coefficients.
  static StressModel linear(double k1);
  static StressModel exponential(double k2, double k3);
  static StressModel polynomial(double k4, double k5);
  /// Polynomial k4 = 4.5e-4, k5 = 1.3.
  static StressModel lithium_ion_default() { return polynomial(4.5e-4, 1.3); }

  [[nodiscard]] Variant variant() const { return variant_; }
  /// Two coefficients; the second is unused (0) for the linear variant.
  [[nodiscard]] std::array<double, 2> coefficients() const { return {a_, b_}; }

  /// phi(d). Throws DomainError for d outside [0, 1].
  [[nodiscard]] double operator()(double depth) const;
  /// phi'(d) for d in [0, 1].
  [[nodiscard]] double derivative(double depth) const;

 private:
  StressModel(Variant variant, double a, double b) : variant_(variant), a_(a), b_(b) {}

  Variant variant_;
  double a_;
  double b_;
};

std::string_view to_string(StressModel::Variant variant);
/// Inverse of to_string; throws InputError on an unknown name.
StressModel::Variant parse_variant(std::string_view name);

double stress(const StressModel& model, double depth);
double stress_derivative(const StressModel& model, double depth);

/// Sum of phi over all half cycles (a full cycle contributes twice).
double cycle_cost(std::span<const double> soc, const StressModel& model);
double cycle_cost(const rainflow::SocProfile& profile, const StressModel& model);
double cycle_cost(const rainflow::CycleSet& cycles, const StressModel& model);

/// Both readings of how a full cycle enters the total.
struct CycleCostBreakdown {
  double half_cycle_convention = 0.0;  // full cycles counted as two halves
  double once_per_full_cycle = 0.0;    // full cycles counted once
};
CycleCostBreakdown cycle_cost_breakdown(const rainflow::CycleSet& cycles, const StressModel& model);

/// lambda_r * cycle_cost, in dollars.
double degradation_cost_dollars(std::span<const double> soc, const StressModel& model,
                                const BatteryParams& params);
double degradation_cost_dollars(const rainflow::SocProfile& profile, const StressModel& model,
                                const BatteryParams& params);

/// Months until degradation spending equals one replacement:
/// 12 * lambda_r / annual_cost. Throws InputError unless annual_cost > 0.
double expected_lifetime(double annual_degradation_cost, const BatteryParams& params);

}  // namespace rfd::degradation

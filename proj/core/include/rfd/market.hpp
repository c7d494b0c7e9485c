#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rfd/battery.hpp"
#include "rfd/degradation.hpp"

namespace rfd::market {

/// Frequency-regulation market terms.
struct MarketParams {
  double capacity_price = 50.0;   // $ per MW of standby capacity per hour
  double mismatch_price = 150.0;  // $ per MWh of mismatch
  double capacity_mw = 1.0;       // regulation capacity bid C

  void validate() const;
};

/// How the mismatch penalty compares instruction and response.
enum class PenaltyForm {
  signed_mismatch,  // |C*r(t) - (d(t) - c(t))|
  split_literal,    // |(C*r_c(t) - c(t)) + (C*r_d(t) - d(t))|
};

std::string_view to_string(PenaltyForm form);
PenaltyForm parse_penalty_form(std::string_view name);

/// Per-unit regulation instruction; positive values request discharge.
class RegulationSignal {
 public:
  /// Every value must be finite and within [-1, 1]. Throws InputError.
  explicit RegulationSignal(std::vector<double> values);

  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t t) const { return values_[t]; }
  /// r_c(t) = max(-r(t), 0)
  [[nodiscard]] double charge_part(std::size_t t) const;
  /// r_d(t) = max(r(t), 0)
  [[nodiscard]] double discharge_part(std::size_t t) const;

 private:
  std::vector<double> values_;
};

struct RevenueBreakdown {
  double capacity_payment = 0.0;
  double mismatch_penalty = 0.0;

  [[nodiscard]] double total() const { return capacity_payment - mismatch_penalty; }
};

/// Capacity payment lambda_c * C * T * t_s minus lambda_p * t_s * sum of
/// per-interval mismatch. Throws InputError on length mismatch.
RevenueBreakdown revenue_breakdown(std::span<const double> charge, std::span<const double> discharge,
                                   const MarketParams& market, const RegulationSignal& signal,
                                   double interval_hours,
                                   PenaltyForm form = PenaltyForm::signed_mismatch);

double revenue(std::span<const double> charge, std::span<const double> discharge,
               const MarketParams& market, const RegulationSignal& signal, double interval_hours,
               PenaltyForm form = PenaltyForm::signed_mismatch);

/// A subgradient of -R with respect to c(t) and d(t), written into the two
/// output spans. The kink of the absolute value takes slope 0.
void negative_revenue_subgradient(std::span<const double> charge, std::span<const double> discharge,
                                  const MarketParams& market, const RegulationSignal& signal,
                                  double interval_hours, PenaltyForm form,
                                  std::span<double> grad_charge, std::span<double> grad_discharge);

/// Greedy signal following: each interval requests C*r(t), capped at P_max
/// and at the power that would take SoC to its bound.
PowerSchedule policy_follow(const RegulationSignal& signal, const BatteryParams& params,
                            double capacity_mw);

/// Dollars of degradation of a dispatch under `reference` (rainflow counting
/// on its SoC trajectory), regardless of which model produced it.
double posterior_assessment(std::span<const double> charge, std::span<const double> discharge,
                            const BatteryParams& params,
                            const degradation::StressModel& reference);

/// Dollar economics of one dispatch over a horizon. After `annualize` every
/// dollar field is per year.
struct EconomicsReport {
  double horizon_hours = 0.0;
  double payment = 0.0;           // capacity payment
  double mismatch_penalty = 0.0;
  double modeled_degradation = 0.0;  // cost seen by the model that planned the dispatch
  double actual_degradation = 0.0;   // posterior rainflow assessment
  double utility = 0.0;              // payment - mismatch_penalty - actual_degradation
  std::optional<double> lifetime_months;  // empty when nothing degrades
  double annualization_factor = 1.0;

  /// Net market revenue (payment minus mismatch penalty).
  [[nodiscard]] double regulation_service_payment() const { return payment - mismatch_penalty; }
};

/// Economics over the dispatch horizon (annualization_factor 1).
/// `modeled_degradation` is supplied by the caller since it depends on the
/// planning model.
EconomicsReport evaluate_economics(std::span<const double> charge, std::span<const double> discharge,
                                   const MarketParams& market, const RegulationSignal& signal,
                                   const BatteryParams& params,
                                   const degradation::StressModel& reference,
                                   double modeled_degradation,
                                   PenaltyForm form = PenaltyForm::signed_mismatch);

/// Scales every dollar field by 8760 / horizon_hours and derives the
/// lifetime from the annual actual degradation.
EconomicsReport annualize(const EconomicsReport& report, const BatteryParams& params);

inline constexpr double kHoursPerYear = 8760.0;

/// Synthetic fast-regulation signal: zero-mean AR(1) process clipped to
/// [-1, 1], r(t+1) = rho * r(t) + sqrt(1 - rho^2) * sigma * N(0, 1).
struct SignalSpec {
  double correlation = 0.9;
  double sigma = 0.5;
};

RegulationSignal generate_signal(std::uint64_t seed, std::size_t horizon, const SignalSpec& spec = {});

}  // namespace rfd::market

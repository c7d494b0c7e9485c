#include "rfd/market.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "rfd/error.hpp"

namespace rfd::market {

namespace {

void check_lengths(std::size_t charge, std::size_t discharge, std::size_t signal) {
  if (charge != discharge || charge != signal) {
    throw InputError("market: charge, discharge and signal lengths differ (" +
                     std::to_string(charge) + ", " + std::to_string(discharge) + ", " +
                     std::to_string(signal) + ")");
  }
}

double mismatch(double charge, double discharge, const MarketParams& market,
                const RegulationSignal& signal, std::size_t t, PenaltyForm form) {
  const double cap = market.capacity_mw;
  if (form == PenaltyForm::signed_mismatch) return cap * signal[t] - (discharge - charge);
  return (cap * signal.charge_part(t) - charge) + (cap * signal.discharge_part(t) - discharge);
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Uniform on (0, 1) from the top 53 bits; avoids implementation-defined
// distribution algorithms so traces are identical across standard libraries.
double open_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

void MarketParams::validate() const {
  if (!(capacity_price >= 0.0) || !(mismatch_price >= 0.0) || !(capacity_mw >= 0.0) ||
      !std::isfinite(capacity_price + mismatch_price + capacity_mw)) {
    throw InputError("market: prices and capacity must be finite and >= 0");
  }
}

std::string_view to_string(PenaltyForm form) {
  return form == PenaltyForm::signed_mismatch ? "signed" : "split";
}

PenaltyForm parse_penalty_form(std::string_view name) {
  if (name == "signed") return PenaltyForm::signed_mismatch;
  if (name == "split") return PenaltyForm::split_literal;
  throw InputError("unknown penalty form '" + std::string(name) + "' (expected signed|split)");
}

RegulationSignal::RegulationSignal(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t t = 0; t < values_.size(); ++t) {
    if (!std::isfinite(values_[t]) || values_[t] < -1.0 || values_[t] > 1.0) {
      throw InputError("regulation signal sample " + std::to_string(t) + " outside [-1, 1]");
    }
  }
}

double RegulationSignal::charge_part(std::size_t t) const { return std::max(-values_[t], 0.0); }

double RegulationSignal::discharge_part(std::size_t t) const { return std::max(values_[t], 0.0); }

RevenueBreakdown revenue_breakdown(std::span<const double> charge, std::span<const double> discharge,
                                   const MarketParams& market, const RegulationSignal& signal,
                                   double interval_hours, PenaltyForm form) {
  check_lengths(charge.size(), discharge.size(), signal.size());
  RevenueBreakdown out;
  out.capacity_payment = market.capacity_price * market.capacity_mw *
                         static_cast<double>(charge.size()) * interval_hours;
  double total_mismatch = 0.0;
  for (std::size_t t = 0; t < charge.size(); ++t) {
    total_mismatch += std::abs(mismatch(charge[t], discharge[t], market, signal, t, form));
  }
  out.mismatch_penalty = market.mismatch_price * interval_hours * total_mismatch;
  return out;
}

double revenue(std::span<const double> charge, std::span<const double> discharge,
               const MarketParams& market, const RegulationSignal& signal, double interval_hours,
               PenaltyForm form) {
  return revenue_breakdown(charge, discharge, market, signal, interval_hours, form).total();
}

void negative_revenue_subgradient(std::span<const double> charge, std::span<const double> discharge,
                                  const MarketParams& market, const RegulationSignal& signal,
                                  double interval_hours, PenaltyForm form,
                                  std::span<double> grad_charge, std::span<double> grad_discharge) {
  check_lengths(charge.size(), discharge.size(), signal.size());
  if (grad_charge.size() != charge.size() || grad_discharge.size() != charge.size()) {
    throw InputError("negative_revenue_subgradient: output size mismatch");
  }
  const double rate = market.mismatch_price * interval_hours;
  for (std::size_t t = 0; t < charge.size(); ++t) {
    const double s = sign(mismatch(charge[t], discharge[t], market, signal, t, form));
    // d|m|/dc: signed form has dm/dc = +1, split form dm/dc = -1; dm/dd = -1 in both.
    grad_charge[t] = rate * (form == PenaltyForm::signed_mismatch ? s : -s);
    grad_discharge[t] = -rate * s;
  }
}

PowerSchedule policy_follow(const RegulationSignal& signal, const BatteryParams& params,
                            double capacity_mw) {
  const std::size_t horizon = signal.size();
  PowerSchedule out{std::vector<double>(horizon, 0.0), std::vector<double>(horizon, 0.0)};
  const double kc = params.charge_gain();
  const double kd = params.discharge_gain();
  double soc = params.soc_initial;
  for (std::size_t t = 0; t < horizon; ++t) {
    if (signal[t] > 0.0) {
      const double room = std::max(soc - params.soc_min, 0.0) / kd;
      out.discharge[t] = std::min({capacity_mw * signal[t], params.power_max_mw, room});
      soc -= out.discharge[t] * kd;
    } else if (signal[t] < 0.0) {
      const double room = std::max(params.soc_max - soc, 0.0) / kc;
      out.charge[t] = std::min({-capacity_mw * signal[t], params.power_max_mw, room});
      soc += out.charge[t] * kc;
    }
  }
  return out;
}

double posterior_assessment(std::span<const double> charge, std::span<const double> discharge,
                            const BatteryParams& params,
                            const degradation::StressModel& reference) {
  const auto soc = soc_trajectory(charge, discharge, params);
  return degradation::degradation_cost_dollars(soc, reference, params);
}

EconomicsReport evaluate_economics(std::span<const double> charge, std::span<const double> discharge,
                                   const MarketParams& market, const RegulationSignal& signal,
                                   const BatteryParams& params,
                                   const degradation::StressModel& reference,
                                   double modeled_degradation, PenaltyForm form) {
  const auto rev = revenue_breakdown(charge, discharge, market, signal, params.interval_hours, form);
  EconomicsReport report;
  report.horizon_hours = static_cast<double>(charge.size()) * params.interval_hours;
  report.payment = rev.capacity_payment;
  report.mismatch_penalty = rev.mismatch_penalty;
  report.modeled_degradation = modeled_degradation;
  report.actual_degradation = posterior_assessment(charge, discharge, params, reference);
  report.utility = report.payment - report.mismatch_penalty - report.actual_degradation;
  if (report.actual_degradation > 0.0 && report.horizon_hours > 0.0) {
    report.lifetime_months = degradation::expected_lifetime(
        report.actual_degradation * kHoursPerYear / report.horizon_hours, params);
  }
  return report;
}

EconomicsReport annualize(const EconomicsReport& report, const BatteryParams& params) {
  if (!(report.horizon_hours > 0.0)) throw InputError("annualize: horizon must be positive");
  const double factor = kHoursPerYear / report.horizon_hours;
  EconomicsReport out = report;
  out.annualization_factor = report.annualization_factor * factor;
  out.payment *= factor;
  out.mismatch_penalty *= factor;
  out.modeled_degradation *= factor;
  out.actual_degradation *= factor;
  out.utility = out.payment - out.mismatch_penalty - out.actual_degradation;
  out.lifetime_months.reset();
  if (out.actual_degradation > 0.0) {
    out.lifetime_months = degradation::expected_lifetime(out.actual_degradation, params);
  }
  return out;
}

RegulationSignal generate_signal(std::uint64_t seed, std::size_t horizon, const SignalSpec& spec) {
  if (horizon == 0) throw InputError("generate_signal: horizon must be positive");
  if (!(spec.correlation >= 0.0 && spec.correlation < 1.0) || !(spec.sigma > 0.0)) {
    throw InputError("generate_signal: need 0 <= correlation < 1 and sigma > 0");
  }
  std::mt19937_64 rng(seed);
  const double innovation = std::sqrt(1.0 - spec.correlation * spec.correlation) * spec.sigma;
  std::vector<double> values(horizon);
  // Box-Muller; both normals of a pair are used.
  double spare = 0.0;
  bool have_spare = false;
  auto normal = [&]() {
    if (have_spare) {
      have_spare = false;
      return spare;
    }
    const double u1 = open_unit(rng);
    const double u2 = open_unit(rng);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    spare = radius * std::sin(2.0 * std::numbers::pi * u2);
    have_spare = true;
    return radius * std::cos(2.0 * std::numbers::pi * u2);
  };
  double state = spec.sigma * normal();
  for (std::size_t t = 0; t < horizon; ++t) {
    values[t] = std::clamp(state, -1.0, 1.0);
    state = spec.correlation * state + innovation * normal();
  }
  return RegulationSignal(std::move(values));
}

}  // namespace rfd::market

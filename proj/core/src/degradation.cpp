#include "rfd/degradation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rfd/error.hpp"

namespace rfd::degradation {

namespace {

// Depths computed from clamped SoC can overshoot 1 by a few ulps.
constexpr double kDepthSlack = 1e-12;

double checked_depth(double depth) {
  if (!(depth >= -kDepthSlack && depth <= 1.0 + kDepthSlack)) {
    throw DomainError("stress: depth " + std::to_string(depth) + " outside [0, 1]");
  }
  return std::clamp(depth, 0.0, 1.0);
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InputError(std::string("stress model coefficient ") + name + " must be positive");
  }
}

}  // namespace

StressModel StressModel::linear(double k1) {
  if (!(k1 >= 0.0) || !std::isfinite(k1)) {
    throw InputError("stress model coefficient k1 must be >= 0");
  }
  return {Variant::linear, k1, 0.0};
}

StressModel StressModel::exponential(double k2, double k3) {
  require_positive(k2, "k2");
  require_positive(k3, "k3");
  return {Variant::exponential, k2, k3};
}

StressModel StressModel::polynomial(double k4, double k5) {
  require_positive(k4, "k4");
  if (!(k5 >= 1.0) || !std::isfinite(k5)) {
    throw InputError("stress model coefficient k5 must be >= 1 for a convex stress function");
  }
  return {Variant::polynomial, k4, k5};
}

double StressModel::operator()(double depth) const {
  const double d = checked_depth(depth);
  switch (variant_) {
    case Variant::linear:
      return a_ * d;
    case Variant::exponential:
      return a_ * d * std::exp(b_ * d);
    case Variant::polynomial:
      return d == 0.0 ? 0.0 : a_ * std::pow(d, b_);
  }
  return 0.0;
}

double StressModel::derivative(double depth) const {
  const double d = checked_depth(depth);
  switch (variant_) {
    case Variant::linear:
      return a_;
    case Variant::exponential:
      return a_ * std::exp(b_ * d) * (1.0 + b_ * d);
    case Variant::polynomial:
      if (b_ == 1.0) return a_;
      return d == 0.0 ? 0.0 : a_ * b_ * std::pow(d, b_ - 1.0);
  }
  return 0.0;
}

std::string_view to_string(StressModel::Variant variant) {
  switch (variant) {
    case StressModel::Variant::linear:
      return "linear";
    case StressModel::Variant::exponential:
      return "exponential";
    case StressModel::Variant::polynomial:
      return "polynomial";
  }
  return "unknown";
}

StressModel::Variant parse_variant(std::string_view name) {
  if (name == "linear") return StressModel::Variant::linear;
  if (name == "exponential") return StressModel::Variant::exponential;
  if (name == "polynomial") return StressModel::Variant::polynomial;
  throw InputError("unknown stress model variant '" + std::string(name) + "'");
}

double stress(const StressModel& model, double depth) { return model(depth); }

double stress_derivative(const StressModel& model, double depth) { return model.derivative(depth); }

double cycle_cost(const rainflow::CycleSet& cycles, const StressModel& model) {
  double total = 0.0;
  for (const auto& h : cycles.half_cycles) total += model(h.depth);
  return total;
}

double cycle_cost(std::span<const double> soc, const StressModel& model) {
  return cycle_cost(rainflow::count_cycles(soc, {.assign_intervals = false}), model);
}

double cycle_cost(const rainflow::SocProfile& profile, const StressModel& model) {
  return cycle_cost(profile.values(), model);
}

CycleCostBreakdown cycle_cost_breakdown(const rainflow::CycleSet& cycles, const StressModel& model) {
  CycleCostBreakdown out;
  for (const auto& h : cycles.half_cycles) {
    const double phi = model(h.depth);
    out.half_cycle_convention += phi;
    out.once_per_full_cycle += h.kind == rainflow::CycleKind::full_member ? 0.5 * phi : phi;
  }
  return out;
}

double degradation_cost_dollars(std::span<const double> soc, const StressModel& model,
                                const BatteryParams& params) {
  return params.replacement_cost() * cycle_cost(soc, model);
}

double degradation_cost_dollars(const rainflow::SocProfile& profile, const StressModel& model,
                                const BatteryParams& params) {
  return degradation_cost_dollars(profile.values(), model, params);
}

double expected_lifetime(double annual_degradation_cost, const BatteryParams& params) {
  if (!(annual_degradation_cost > 0.0) || !std::isfinite(annual_degradation_cost)) {
    throw InputError("expected_lifetime: annual degradation cost must be positive");
  }
  return 12.0 * params.replacement_cost() / annual_degradation_cost;
}

}  // namespace rfd::degradation

#pragma once

#include <span>
#include <vector>

namespace rfd {

/// Physical and economic parameters of a battery energy storage unit.
///
/// Units: energy in MWh, power in MW, interval length in hours, cell price in
/// $/MWh. State of charge is a fraction of `energy_mwh`.
struct BatteryParams {
  double energy_mwh = 0.25;
  double power_max_mw = 1.0;
  double eta_charge = 0.95;
  double eta_discharge = 0.95;
  double soc_min = 0.0;
  double soc_max = 1.0;
  double soc_initial = 0.5;
  double interval_hours = 4.0 / 3600.0;
  double cell_price_per_mwh = 600000.0;

  /// Total replacement cost in dollars (unit price times capacity).
  [[nodiscard]] double replacement_cost() const { return cell_price_per_mwh * energy_mwh; }

  /// SoC gained per MW of charging power held for one interval.
  [[nodiscard]] double charge_gain() const { return interval_hours * eta_charge / energy_mwh; }

  /// SoC lost per MW of discharging power held for one interval.
  [[nodiscard]] double discharge_gain() const {
    return interval_hours / (eta_discharge * energy_mwh);
  }

  /// Throws InputError when an invariant is broken.
  void validate() const;

  /// The frequency-regulation case-study battery: 1 MW / 0.25 MWh, 4 s
  /// intervals, 0.95 efficiencies, 0.6 $/Wh cells.
  static BatteryParams regulation_default() { return {}; }
};

/// Charging and discharging power per interval, both nonnegative, in MW.
struct PowerSchedule {
  std::vector<double> charge;
  std::vector<double> discharge;

  [[nodiscard]] std::size_t size() const { return charge.size(); }
};

/// SoC trajectory of T+1 samples induced by T intervals of power:
/// s(0) = s0, s(t+1) = s(t) + c(t)*eta_c*t_s/E - d(t)*t_s/(eta_d*E).
/// Feasibility is not checked.
std::vector<double> soc_trajectory(std::span<const double> charge,
                                   std::span<const double> discharge,
                                   const BatteryParams& params);

}  // namespace rfd

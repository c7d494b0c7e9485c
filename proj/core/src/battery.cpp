#include "rfd/battery.hpp"

#include <cmath>
#include <string>

#include "rfd/error.hpp"

namespace rfd {

namespace {

void require(bool condition, const char* message) {
  if (!condition) throw InputError(std::string("battery: ") + message);
}

}  // namespace

void BatteryParams::validate() const {
  require(std::isfinite(energy_mwh) && energy_mwh > 0.0, "energy_mwh must be > 0");
  require(std::isfinite(power_max_mw) && power_max_mw > 0.0, "power_max_mw must be > 0");
  require(eta_charge > 0.0 && eta_charge <= 1.0, "eta_charge must lie in (0, 1]");
  require(eta_discharge > 0.0 && eta_discharge <= 1.0, "eta_discharge must lie in (0, 1]");
  require(soc_min >= 0.0 && soc_min < soc_max && soc_max <= 1.0,
          "require 0 <= soc_min < soc_max <= 1");
  require(soc_initial > soc_min && soc_initial < soc_max,
          "soc_initial must lie strictly between soc_min and soc_max");
  require(std::isfinite(interval_hours) && interval_hours > 0.0, "interval length must be > 0");
  require(std::isfinite(cell_price_per_mwh) && cell_price_per_mwh > 0.0,
          "cell_price_per_mwh must be > 0");
}

std::vector<double> soc_trajectory(std::span<const double> charge,
                                   std::span<const double> discharge,
                                   const BatteryParams& params) {
  if (charge.size() != discharge.size()) {
    throw InputError("soc_trajectory: charge and discharge lengths differ");
  }
  const double kc = params.charge_gain();
  const double kd = params.discharge_gain();
  std::vector<double> soc(charge.size() + 1);
  soc[0] = params.soc_initial;
  for (std::size_t t = 0; t < charge.size(); ++t) {
    soc[t + 1] = soc[t] + charge[t] * kc - discharge[t] * kd;
  }
  return soc;
}

}  // namespace rfd

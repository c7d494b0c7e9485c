#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "rfd/battery.hpp"
#include "rfd/degradation.hpp"
#include "rfd/market.hpp"
#include "rfd/solver.hpp"

namespace rfd::config {

/// Environment variable naming a config file; used when --config is absent.
inline constexpr const char* kConfigEnvVar = "RFD_CONFIG";

struct SignalSource {
  std::optional<std::filesystem::path> file;  // `t,r` CSV; generator used when empty
  std::size_t horizon = 1800;                 // generator length T
  market::SignalSpec spec;
};

struct RunConfig {
  BatteryParams battery;
  degradation::StressModel model = degradation::StressModel::lithium_ion_default();
  double linear_k1 = 2.0e-4;
  market::MarketParams market;
  market::PenaltyForm penalty = market::PenaltyForm::signed_mismatch;
  solver::SolverConfig solver;
  SignalSource signal;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
};

/// 1 MW / 0.25 MWh battery, 4 s intervals, T = 1800, 50 $/MW-h capacity
/// price, 150 $/MWh mismatch price, polynomial(4.5e-4, 1.3) stress.
RunConfig default_run_config();

/// Overlays a JSON document on the defaults. Unknown keys, wrong types and
/// out-of-range values raise InputError naming the key. Relative signal
/// paths are resolved against `base_dir` and must exist.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

std::string to_json(const RunConfig& config);

/// Signal from the configured file, or generated from `seed`.
market::RegulationSignal load_signal(const RunConfig& config);

solver::DispatchProblem make_problem(const RunConfig& config, market::RegulationSignal signal);

}  // namespace rfd::config

#pragma once

#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfd/battery.hpp"
#include "rfd/degradation.hpp"
#include "rfd/market.hpp"
#include "rfd/oracle.hpp"
#include "rfd/policies.hpp"
#include "rfd/rainflow.hpp"
#include "rfd/solver.hpp"

namespace rfd::io {

/// Reads one named numeric column from a headed CSV. Blank lines are skipped.
/// Malformed rows, missing columns and non-finite values raise InputError
/// naming `source` and the 1-based line number.
std::vector<double> read_csv_column(std::istream& in, std::string_view source,
                                    std::string_view column);

/// `t,soc` profile file.
std::vector<double> read_profile_csv(const std::filesystem::path& path);
/// `t,r` signal file.
std::vector<double> read_signal_csv(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// `t,c,d,s,r` with one row per interval; s is the SoC at the start of the
/// interval and a final row carries the closing SoC with empty power fields.
std::string trace_csv(std::span<const double> charge, std::span<const double> discharge,
                      std::span<const double> soc, std::span<const double> signal);
/// `t,soc`.
std::string profile_csv(std::span<const double> soc);

/// JSON array of {depth, direction, kind, intervals, junction_intervals}.
std::string cycles_json(const rainflow::CycleSet& cycles);

struct CostSummary {
  double life_loss = 0.0;  // sum of phi over half cycles
  double life_loss_full_once = 0.0;  // full cycles counted once instead of twice
  double dollars = 0.0;    // lambda_r * life_loss
  double replacement_cost = 0.0;
  std::size_t half_cycles = 0;
  std::string model;
};
std::string cost_json(const CostSummary& summary);

/// Keys: total_regulation_utility, regulation_service_payment,
/// modeled_battery_degradation, actual_battery_degradation,
/// battery_life_expectancy_months, then the raw components.
std::string economics_json(const market::EconomicsReport& report);

std::string reports_json(std::span<const oracle::PropertyReport> reports);

std::string solution_json(const solver::Solution& solution, const solver::DispatchProblem& problem,
                          const solver::SolverConfig& config,
                          const market::EconomicsReport& window,
                          const market::EconomicsReport& annual);

std::string benchmark_json(const market::BenchmarkResult& result);
/// Aligned text rendering of the annual columns.
std::string benchmark_table(const market::BenchmarkResult& result);

}  // namespace rfd::io

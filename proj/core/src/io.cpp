#include "rfd/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "rfd/error.hpp"

namespace rfd::io {

using nlohmann::ordered_json;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t begin = 0;
  while (true) {
    const auto comma = line.find(',', begin);
    fields.push_back(trim(line.substr(begin, comma - begin)));
    if (comma == std::string_view::npos) break;
    begin = comma + 1;
  }
  return fields;
}

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line) + ": ";
}

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

ordered_json report_json(const market::EconomicsReport& r) {
  ordered_json j;
  j["total_regulation_utility"] = r.utility;
  j["regulation_service_payment"] = r.regulation_service_payment();
  j["modeled_battery_degradation"] = r.modeled_degradation;
  j["actual_battery_degradation"] = r.actual_degradation;
  j["battery_life_expectancy_months"] =
      r.lifetime_months ? ordered_json(*r.lifetime_months) : ordered_json(nullptr);
  j["capacity_payment"] = r.payment;
  j["mismatch_penalty"] = r.mismatch_penalty;
  j["horizon_hours"] = r.horizon_hours;
  j["annualization_factor"] = r.annualization_factor;
  return j;
}

ordered_json solution_summary(const solver::Solution& s) {
  ordered_json j;
  j["best_objective"] = s.best_objective;
  j["revenue"] = s.revenue;
  j["degradation_cost"] = s.degradation_cost;
  j["barrier_value"] = s.barrier_value;
  j["final_barrier_weight"] = s.final_barrier_weight;
  j["iterations"] = s.iterations;
  j["rejected_steps"] = s.rejected_steps;
  j["stages_run"] = s.stages_run;
  j["converged"] = s.converged;
  j["max_subgradient_norm"] = s.max_subgradient_norm;
  j["simultaneity_mwh"] = s.simultaneity;
  return j;
}

}  // namespace

std::vector<double> read_csv_column(std::istream& in, std::string_view source,
                                    std::string_view column) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  std::size_t index = 0;
  bool have_header = false;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (!have_header) {
      width = fields.size();
      index = width;
      for (std::size_t i = 0; i < width; ++i) {
        if (fields[i] == column) index = i;
      }
      if (index == width) {
        throw InputError(where(source, line_no) + "header has no '" + std::string(column) +
                         "' column");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != width) {
      throw InputError(where(source, line_no) + "expected " + std::to_string(width) +
                       " fields, found " + std::to_string(fields.size()));
    }
    const auto field = fields[index];
    double value = 0.0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || end != field.data() + field.size() || field.empty()) {
      throw InputError(where(source, line_no) + "'" + std::string(field) + "' is not a number");
    }
    if (!std::isfinite(value)) {
      throw InputError(where(source, line_no) + "non-finite value in column '" +
                       std::string(column) + "'");
    }
    values.push_back(value);
  }
  if (!have_header) throw InputError(std::string(source) + ": empty file");
  return values;
}

std::vector<double> read_profile_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_csv_column(in, path.string(), "soc");
}

std::vector<double> read_signal_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_csv_column(in, path.string(), "r");
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string trace_csv(std::span<const double> charge, std::span<const double> discharge,
                      std::span<const double> soc, std::span<const double> signal) {
  const std::size_t horizon = charge.size();
  if (discharge.size() != horizon || signal.size() != horizon || soc.size() != horizon + 1) {
    throw InputError("trace_csv: inconsistent lengths");
  }
  std::ostringstream out;
  out << "t,c,d,s,r\n";
  for (std::size_t t = 0; t < horizon; ++t) {
    out << t << ',' << number(charge[t]) << ',' << number(discharge[t]) << ',' << number(soc[t])
        << ',' << number(signal[t]) << '\n';
  }
  out << horizon << ",,," << number(soc[horizon]) << ",\n";
  return out.str();
}

std::string profile_csv(std::span<const double> soc) {
  std::ostringstream out;
  out << "t,soc\n";
  for (std::size_t t = 0; t < soc.size(); ++t) out << t << ',' << number(soc[t]) << '\n';
  return out.str();
}

std::string cycles_json(const rainflow::CycleSet& cycles) {
  ordered_json arr = ordered_json::array();
  for (const auto& h : cycles.half_cycles) {
    ordered_json j;
    j["depth"] = h.depth;
    j["direction"] = rainflow::to_string(h.direction);
    j["kind"] = rainflow::to_string(h.kind);
    j["intervals"] = h.intervals();
    j["junction_intervals"] = h.junction_intervals;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string cost_json(const CostSummary& summary) {
  ordered_json j;
  j["model"] = summary.model;
  j["half_cycles"] = summary.half_cycles;
  j["life_loss_fraction"] = summary.life_loss;
  j["life_loss_fraction_full_cycles_once"] = summary.life_loss_full_once;
  j["replacement_cost"] = summary.replacement_cost;
  j["degradation_cost"] = summary.dollars;
  return j.dump(2) + "\n";
}

std::string economics_json(const market::EconomicsReport& report) {
  return report_json(report).dump(2) + "\n";
}

std::string reports_json(std::span<const oracle::PropertyReport> reports) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json j;
    j["property"] = r.property;
    j["samples"] = r.samples;
    j["violations"] = r.violations;
    j["skipped"] = r.skipped;
    j["worst_excess"] = r.worst;
    j["tolerance"] = r.tolerance;
    j["seed"] = r.seed;
    ordered_json ex = ordered_json::array();
    for (const auto& v : r.examples) ex.push_back({{"excess", v.excess}, {"inputs", v.reproducer}});
    j["examples"] = std::move(ex);
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string solution_json(const solver::Solution& solution, const solver::DispatchProblem& problem,
                          const solver::SolverConfig& config,
                          const market::EconomicsReport& window,
                          const market::EconomicsReport& annual) {
  ordered_json j;
  j["horizon"] = problem.horizon();
  j["model"] = degradation::to_string(problem.model.variant());
  j["penalty_form"] = market::to_string(problem.penalty);
  j["subgradient_rule"] = solver::to_string(config.rule);
  j["step_size"] = config.step_size;
  j["seed"] = config.seed;
  j["solution"] = solution_summary(solution);
  const auto& trace = solution.objective_trace;
  ordered_json summary;
  summary["evaluations"] = trace.size();
  summary["first"] = trace.empty() ? ordered_json(nullptr) : ordered_json(trace.front());
  summary["last"] = trace.empty() ? ordered_json(nullptr) : ordered_json(trace.back());
  summary["best"] = solution.best_objective;
  j["trace_summary"] = std::move(summary);
  j["economics"] = report_json(window);
  j["annual_economics"] = report_json(annual);
  return j.dump(2) + "\n";
}

std::string benchmark_json(const market::BenchmarkResult& result) {
  ordered_json j;
  for (const auto& p : result.policies) {
    ordered_json col;
    col["annual"] = report_json(p.annual);
    col["window"] = report_json(p.window);
    col["soc_std"] = p.soc_std;
    if (p.solution) col["solver"] = solution_summary(*p.solution);
    j[p.name] = std::move(col);
  }
  return j.dump(2) + "\n";
}

std::string benchmark_table(const market::BenchmarkResult& result) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-34s%14s%14s%14s\n", "annual (k$)", "rainflow", "no_cost",
                "linear");
  out += buf;
  auto row = [&](const char* label, auto get) {
    std::snprintf(buf, sizeof buf, "%-34s%14.1f%14.1f%14.1f\n", label, get(result.policies[0]),
                  get(result.policies[1]), get(result.policies[2]));
    out += buf;
  };
  row("total regulation utility", [](const auto& p) { return p.annual.utility / 1e3; });
  row("regulation service payment",
      [](const auto& p) { return p.annual.regulation_service_payment() / 1e3; });
  row("modeled battery degradation",
      [](const auto& p) { return p.annual.modeled_degradation / 1e3; });
  row("actual battery degradation", [](const auto& p) { return p.annual.actual_degradation / 1e3; });
  row("battery life expectancy (months)",
      [](const auto& p) { return p.annual.lifetime_months.value_or(INFINITY); });
  std::snprintf(buf, sizeof buf, "%-34s%14.4f%14.4f%14.4f\n", "SoC standard deviation",
                result.policies[0].soc_std, result.policies[1].soc_std,
                result.policies[2].soc_std);
  out += buf;
  return out;
}

}  // namespace rfd::io

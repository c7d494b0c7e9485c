// rfdispatch: rainflow cycle counting, degradation cost and regulation
// dispatch from the command line.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "rfd/config.hpp"
#include "rfd/degradation.hpp"
#include "rfd/error.hpp"
#include "rfd/io.hpp"
#include "rfd/oracle.hpp"
#include "rfd/policies.hpp"
#include "rfd/rainflow.hpp"
#include "rfd/solver.hpp"

namespace {

enum ExitCode { kOk = 0, kViolation = 1, kInputError = 2 };

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format;
};

rfd::config::RunConfig resolve_config(const GlobalOptions& g) {
  std::string path = g.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(rfd::config::kConfigEnvVar)) path = env;
  }
  auto cfg = path.empty() ? rfd::config::default_run_config() : rfd::config::load_run_config(path);
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.solver.seed = *g.seed;
  }
  if (!g.out_dir.empty()) cfg.output_dir = g.out_dir;
  return cfg;
}

std::string format_or(const GlobalOptions& g, const char* fallback) {
  return g.format.empty() ? fallback : g.format;
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

int cmd_count(const GlobalOptions& g, const std::string& profile_path) {
  const auto cfg = resolve_config(g);
  const rfd::rainflow::SocProfile profile(rfd::io::read_profile_csv(profile_path));
  const auto cycles = rfd::rainflow::count_cycles(profile);
  const auto json = rfd::io::cycles_json(cycles);
  rfd::io::write_file_atomic(cfg.output_dir / "cycles.json", json);

  const auto format = format_or(g, "text");
  if (format == "json") {
    std::cout << json;
  } else if (format == "csv") {
    std::cout << "depth,direction,kind\n";
    for (const auto& h : cycles.half_cycles) {
      std::cout << h.depth << ',' << rfd::rainflow::to_string(h.direction) << ','
                << rfd::rainflow::to_string(h.kind) << '\n';
    }
  } else {
    std::printf("%-4s %-10s %-10s %-5s %s\n", "#", "depth", "direction", "kind", "intervals");
    std::size_t i = 0;
    for (const auto& h : cycles.half_cycles) {
      const auto iv = h.intervals();
      std::string span = iv.empty() ? "-"
                                    : std::to_string(iv.front()) + ".." + std::to_string(iv.back());
      std::printf("%-4zu %-10.6g %-10s %-5s %s\n", ++i, h.depth,
                  std::string(rfd::rainflow::to_string(h.direction)).c_str(),
                  std::string(rfd::rainflow::to_string(h.kind)).c_str(), span.c_str());
    }
    std::printf("%zu half cycles (%zu full cycles)\n", cycles.half_cycles.size(),
                cycles.full_cycle_count());
  }
  return kOk;
}

int cmd_cost(const GlobalOptions& g, const std::string& profile_path) {
  const auto cfg = resolve_config(g);
  const rfd::rainflow::SocProfile profile(rfd::io::read_profile_csv(profile_path));
  const auto cycles = rfd::rainflow::count_cycles(profile, {.assign_intervals = false});
  rfd::io::CostSummary summary;
  summary.model = std::string(rfd::degradation::to_string(cfg.model.variant()));
  summary.half_cycles = cycles.half_cycles.size();
  const auto both = rfd::degradation::cycle_cost_breakdown(cycles, cfg.model);
  summary.life_loss = both.half_cycle_convention;
  summary.life_loss_full_once = both.once_per_full_cycle;
  summary.replacement_cost = cfg.battery.replacement_cost();
  summary.dollars = summary.replacement_cost * summary.life_loss;
  const auto json = rfd::io::cost_json(summary);
  rfd::io::write_file_atomic(cfg.output_dir / "cost.json", json);

  const auto format = format_or(g, "text");
  if (format == "json") {
    std::cout << json;
  } else if (format == "csv") {
    std::cout << "half_cycles,life_loss_fraction,degradation_cost\n"
              << summary.half_cycles << ',' << summary.life_loss << ',' << summary.dollars << '\n';
  } else {
    std::printf("model               %s\n", summary.model.c_str());
    std::printf("half cycles         %zu\n", summary.half_cycles);
    std::printf("life loss fraction  %.6e\n", summary.life_loss);
    std::printf("degradation cost    $%.2f\n", summary.dollars);
  }
  return kOk;
}

std::string power_csv(const rfd::PowerSchedule& x, const rfd::market::RegulationSignal& signal,
                      double capacity) {
  std::ostringstream out;
  out.precision(17);
  out << "t,instructed,response\n";
  for (std::size_t t = 0; t < x.size(); ++t) {
    out << t << ',' << capacity * signal[t] << ',' << x.discharge[t] - x.charge[t] << '\n';
  }
  return out.str();
}

std::string trace_objective_csv(const std::vector<double>& trace) {
  std::ostringstream out;
  out.precision(17);
  out << "k,objective,best\n";
  double best = trace.empty() ? 0.0 : trace.front();
  for (std::size_t k = 0; k < trace.size(); ++k) {
    best = std::min(best, trace[k]);
    out << k << ',' << trace[k] << ',' << best << '\n';
  }
  return out.str();
}

int cmd_optimize(const GlobalOptions& g, std::optional<std::size_t> iters) {
  auto cfg = resolve_config(g);
  if (iters) cfg.solver.inner_iterations = *iters;
  const auto problem = rfd::config::make_problem(cfg, rfd::config::load_signal(cfg));
  const auto sol = rfd::solver::solve(problem, cfg.solver);
  const auto window = rfd::market::evaluate_economics(
      sol.charge, sol.discharge, problem.market, problem.signal, problem.battery, problem.model,
      sol.degradation_cost, problem.penalty);
  const auto annual = rfd::market::annualize(window, problem.battery);

  const auto& dir = cfg.output_dir;
  const auto trace = rfd::io::trace_csv(sol.charge, sol.discharge, sol.soc, problem.signal.values());
  const auto report = rfd::io::solution_json(sol, problem, cfg.solver, window, annual);
  rfd::io::write_file_atomic(dir / "solution.csv", trace);
  rfd::io::write_file_atomic(dir / "report.json", report);
  rfd::io::write_file_atomic(dir / "power_response.csv",
                             power_csv({sol.charge, sol.discharge}, problem.signal,
                                       problem.market.capacity_mw));
  rfd::io::write_file_atomic(dir / "soc.csv", rfd::io::profile_csv(sol.soc));
  rfd::io::write_file_atomic(dir / "objective_trace.csv",
                             trace_objective_csv(sol.objective_trace));

  const auto format = format_or(g, "text");
  if (format == "json") {
    std::cout << report;
  } else if (format == "csv") {
    std::cout << trace;
  } else {
    std::printf("horizon             %zu intervals (%.3f h)\n", problem.horizon(),
                window.horizon_hours);
    std::printf("best objective      %s\n", fixed(sol.best_objective, 4).c_str());
    std::printf("revenue             $%s\n", fixed(sol.revenue, 4).c_str());
    std::printf("degradation cost    $%s\n", fixed(sol.degradation_cost, 4).c_str());
    std::printf("iterations          %zu over %zu stages (%zu rejected steps)\n", sol.iterations,
                sol.stages_run, sol.rejected_steps);
    std::printf("annual utility      $%s\n", fixed(annual.utility, 2).c_str());
    std::printf("outputs             %s\n", dir.string().c_str());
  }
  return kOk;
}

int cmd_benchmark(const GlobalOptions& g) {
  const auto cfg = resolve_config(g);
  const auto problem = rfd::config::make_problem(cfg, rfd::config::load_signal(cfg));
  const auto result = rfd::market::run_benchmark(problem, cfg.solver, cfg.linear_k1);

  const auto json = rfd::io::benchmark_json(result);
  const auto table = rfd::io::benchmark_table(result);
  rfd::io::write_file_atomic(cfg.output_dir / "benchmark.json", json);
  rfd::io::write_file_atomic(cfg.output_dir / "benchmark.txt", table);
  for (const auto& p : result.policies) {
    rfd::io::write_file_atomic(
        cfg.output_dir / ("trace_" + p.name + ".csv"),
        rfd::io::trace_csv(p.schedule.charge, p.schedule.discharge, p.soc,
                           problem.signal.values()));
  }

  const auto format = format_or(g, "text");
  if (format == "json") {
    std::cout << json;
  } else if (format == "csv") {
    std::cout << "policy,total_regulation_utility,regulation_service_payment,"
                 "modeled_battery_degradation,actual_battery_degradation,"
                 "battery_life_expectancy_months,soc_std\n";
    for (const auto& p : result.policies) {
      std::cout.precision(17);
      std::cout << p.name << ',' << p.annual.utility << ','
                << p.annual.regulation_service_payment() << ',' << p.annual.modeled_degradation
                << ',' << p.annual.actual_degradation << ','
                << (p.annual.lifetime_months ? std::to_string(*p.annual.lifetime_months) : "")
                << ',' << p.soc_std << '\n';
    }
  } else {
    std::cout << table;
  }
  return kOk;
}

int cmd_verify(const GlobalOptions& g, const std::string& suite, std::size_t samples,
               bool inject_concave) {
  const auto cfg = resolve_config(g);
  rfd::oracle::SuiteOptions options;
  options.samples = samples;
  options.seed = cfg.seed;
  options.inject_concave = inject_concave;
  const auto reports = rfd::oracle::run_suite(suite, options);
  const auto json = rfd::io::reports_json(reports);
  rfd::io::write_file_atomic(cfg.output_dir / ("verify_" + suite + ".json"), json);

  bool ok = true;
  for (const auto& r : reports) ok = ok && r.passed();
  const auto format = format_or(g, "json");
  if (format == "text") {
    for (const auto& r : reports) {
      std::printf("%-4s %-38s samples=%zu violations=%zu worst=%.3g\n", r.passed() ? "ok" : "FAIL",
                  r.property.c_str(), r.samples, r.violations, r.worst);
    }
  } else if (format == "csv") {
    std::cout << "property,samples,violations,skipped,worst_excess\n";
    for (const auto& r : reports) {
      std::cout << r.property << ',' << r.samples << ',' << r.violations << ',' << r.skipped << ','
                << r.worst << '\n';
    }
  } else {
    std::cout << json;
  }
  return ok ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rainflow cycle-based battery degradation: counting, cost and dispatch"};
  app.fallthrough();
  app.require_subcommand(1);

  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config_path, "JSON run configuration")
      ->envname(rfd::config::kConfigEnvVar);
  auto* seed_opt = app.add_option("--seed", seed, "Seed for generated signals and oracles");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--format", g.format, "Console output format")
      ->check(CLI::IsMember({"json", "csv", "text"}));

  std::string profile;
  auto* count = app.add_subcommand("count", "Rainflow cycles of a `t,soc` profile");
  count->add_option("profile", profile, "SoC profile CSV")->required();
  auto* cost = app.add_subcommand("cost", "Cycle degradation cost of a `t,soc` profile");
  cost->add_option("profile", profile, "SoC profile CSV")->required();

  std::optional<std::size_t> iters;
  auto* optimize = app.add_subcommand("optimize", "Degradation-aware regulation dispatch");
  optimize->add_option("--iters", iters, "Inner iterations per barrier stage");

  auto* benchmark =
      app.add_subcommand("benchmark", "Rainflow, no-cost and linear policies on one signal");

  std::string suite;
  std::size_t samples = 1000;
  bool inject_concave = false;
  auto* verify = app.add_subcommand("verify", "Run an oracle property suite");
  verify->add_option("suite", suite, "Suite name")
      ->required()
      ->check(CLI::IsMember({"convexity", "merge", "perturbation", "gradient", "solver-gap",
                             "functions", "all"}));
  verify->add_option("--samples", samples, "Random cases per property");
  verify->add_flag("--inject-concave", inject_concave)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*count) return cmd_count(g, profile);
    if (*cost) return cmd_cost(g, profile);
    if (*optimize) return cmd_optimize(g, iters);
    if (*benchmark) return cmd_benchmark(g);
    if (*verify) return cmd_verify(g, suite, samples, inject_concave);
  } catch (const rfd::InputError& e) {
    std::cerr << "rfdispatch: error: " << e.what() << '\n';
    return kInputError;
  } catch (const rfd::InfeasibleError& e) {
    std::cerr << "rfdispatch: infeasible: " << e.what() << '\n';
    return kViolation;
  } catch (const std::exception& e) {
    std::cerr << "rfdispatch: error: " << e.what() << '\n';
    return kViolation;
  }
  return kInputError;
}

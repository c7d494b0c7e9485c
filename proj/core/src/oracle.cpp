#include "rfd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "rfd/error.hpp"
#include "rfd/rainflow.hpp"

namespace rfd::oracle {

namespace {

constexpr std::size_t kMaxExamples = 5;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + index(hi - lo + 1); }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer: independent streams per report from one user seed.
std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_vector(std::span<const double> xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ",";
    out += format_number(xs[i]);
  }
  return out + "]";
}

CheckOutcome outcome(double lhs, double rhs, double excess, double tolerance) {
  return {lhs, rhs, excess, excess > tolerance};
}

// Profiles in [0, 1]: independent uniforms, a bounded random walk, or values
// snapped to a 0.1 grid so that ties and flat runs are common.
std::vector<double> random_profile(Rng& rng, std::size_t samples) {
  std::vector<double> s(samples);
  switch (rng.index(3)) {
    case 0:
      for (auto& v : s) v = rng.uniform();
      break;
    case 1: {
      double v = rng.uniform();
      for (auto& x : s) {
        x = v;
        v = std::clamp(v + rng.uniform(-0.3, 0.3), 0.0, 1.0);
      }
      break;
    }
    default:
      for (auto& v : s) v = static_cast<double>(rng.index(11)) / 10.0;
      break;
  }
  return s;
}

struct NamedStress {
  std::string name;
  StressFunction phi;
};

std::vector<NamedStress> stress_functions(bool inject_concave) {
  using degradation::StressModel;
  std::vector<NamedStress> out{
      {"polynomial", as_function(StressModel::lithium_ion_default())},
      {"exponential", as_function(StressModel::exponential(1e-3, 1.0))},
      {"linear", as_function(StressModel::linear(2e-4))},
  };
  if (inject_concave) {
    out.push_back({"concave_injected", [](double d) { return 4.5e-4 * std::pow(d, 0.5); }});
  }
  return out;
}

PropertyReport make_report(std::string property, std::uint64_t seed, double tolerance) {
  PropertyReport r;
  r.property = std::move(property);
  r.seed = seed;
  r.tolerance = tolerance;
  r.worst = -std::numeric_limits<double>::infinity();
  return r;
}

void finish(PropertyReport& r) {
  if (!std::isfinite(r.worst)) r.worst = 0.0;
}

double max_abs(std::span<const double> xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::vector<double> StepDecomposition::reconstruct() const {
  std::vector<double> s;
  s.reserve(amplitudes.size() + 1);
  double v = initial;
  s.push_back(v);
  for (double p : amplitudes) {
    v += p;
    s.push_back(v);
  }
  return s;
}

StepDecomposition decompose_steps(std::span<const double> profile) {
  if (profile.empty()) throw InputError("decompose_steps: empty profile");
  StepDecomposition out;
  out.initial = profile[0];
  out.amplitudes.reserve(profile.size() - 1);
  for (std::size_t t = 1; t < profile.size(); ++t) {
    out.amplitudes.push_back(profile[t] - profile[t - 1]);
  }
  return out;
}

StressFunction as_function(const degradation::StressModel& model) {
  return [model](double d) { return model(d); };
}

double rainflow_cost(std::span<const double> profile, const StressFunction& phi) {
  const auto cycles = rainflow::count_cycles(profile, {.assign_intervals = false});
  double sum = 0.0;
  for (const auto& h : cycles.half_cycles) sum += phi(h.depth);
  return sum;
}

CheckOutcome check_convexity(std::span<const double> s1, std::span<const double> s2,
                             double lambda, const StressFunction& phi, double tolerance) {
  if (s1.size() != s2.size()) throw InputError("check_convexity: profile lengths differ");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InputError("check_convexity: lambda not in [0,1]");
  std::vector<double> mix(s1.size());
  for (std::size_t t = 0; t < mix.size(); ++t) mix[t] = lambda * s1[t] + (1.0 - lambda) * s2[t];
  const double lhs = rainflow_cost(mix, phi);
  const double rhs = lambda * rainflow_cost(s1, phi) + (1.0 - lambda) * rainflow_cost(s2, phi);
  return outcome(lhs, rhs, lhs - rhs, tolerance);
}

CheckOutcome check_adjacent_merge(std::span<const double> profile, std::size_t step,
                                  const StressFunction& phi, double tolerance) {
  if (profile.size() < 3 || step + 2 >= profile.size()) {
    throw InputError("check_adjacent_merge: steps " + std::to_string(step) + " and " +
                     std::to_string(step + 1) + " do not both exist");
  }
  std::vector<double> merged(profile.begin(), profile.end());
  merged.erase(merged.begin() + static_cast<std::ptrdiff_t>(step + 1));
  const double original = rainflow_cost(profile, phi);
  const double combined = rainflow_cost(merged, phi);
  return outcome(original, combined, combined - original, tolerance);
}

std::vector<double> add_step(std::span<const double> profile, std::size_t step, double amplitude) {
  if (step + 1 >= profile.size()) {
    throw InputError("add_step: step " + std::to_string(step) + " beyond the last interval");
  }
  std::vector<double> out(profile.begin(), profile.end());
  for (std::size_t t = step + 1; t < out.size(); ++t) out[t] += amplitude;
  return out;
}

CheckOutcome check_perturbation_bounds(std::span<const double> profile, std::size_t step,
                                       double amplitude, double tolerance) {
  if (amplitude == 0.0) throw InputError("check_perturbation_bounds: amplitude must be nonzero");
  auto before = rainflow::count_cycles(profile, {.assign_intervals = false}).depths();
  auto after =
      rainflow::count_cycles(add_step(profile, step, amplitude), {.assign_intervals = false})
          .depths();
  std::sort(before.begin(), before.end(), std::greater<>());
  std::sort(after.begin(), after.end(), std::greater<>());
  const std::size_t n = std::max(before.size(), after.size());
  before.resize(n, 0.0);
  after.resize(n, 0.0);
  double total = 0.0;
  double largest = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += after[i] - before[i];
    largest = std::max(largest, std::abs(after[i] - before[i]));
  }
  const double bound = std::abs(amplitude);
  const double lhs = std::max(std::abs(total), largest);
  return outcome(lhs, bound, lhs - bound, tolerance);
}

CheckOutcome check_superadditive(const StressFunction& g, double x1, double x2, double tolerance) {
  const double lhs = g(x1) + g(x2);
  const double rhs = g(x1 + x2);
  return outcome(lhs, rhs, lhs - rhs, tolerance);
}

CheckOutcome check_difference_bound(const StressFunction& g, double x1, double x2,
                                    double tolerance) {
  if (x1 < x2) std::swap(x1, x2);
  const double lhs = g(x1 - x2);
  const double rhs = g(x1) - g(x2);
  return outcome(lhs, rhs, lhs - rhs, tolerance);
}

CheckOutcome check_three_term(const StressFunction& g, double x1, double x2, double x3,
                              double tolerance) {
  const double lhs = g(x1) + g(x2) - g(x3);
  const double rhs = g(x1 + x2 - x3);
  return outcome(lhs, rhs, lhs - rhs, tolerance);
}

CheckOutcome check_signed_aggregation(const StressFunction& g, std::span<const double> xs,
                                      double tolerance) {
  double total = 0.0;
  double parts = 0.0;
  for (double x : xs) {
    total += x;
    parts += x >= 0.0 ? g(x) : -g(-x);
  }
  const double rhs = g(total);
  return outcome(parts, rhs, parts - rhs, tolerance);
}

FiniteDifference finite_difference_subgradient(std::span<const double> charge,
                                               std::span<const double> discharge,
                                               const solver::DispatchProblem& problem,
                                               double barrier_weight, double step) {
  if (!(step > 0.0)) throw InputError("finite_difference_subgradient: step must be > 0");
  if (!solver::strictly_interior(charge, discharge, problem)) {
    throw DomainError("finite_difference_subgradient: point is not strictly interior");
  }
  const std::size_t horizon = charge.size();
  std::vector<double> c(charge.begin(), charge.end());
  std::vector<double> d(discharge.begin(), discharge.end());
  auto value = [&] { return solver::barrier_objective(c, d, problem, barrier_weight); };
  const double f0 = value();

  FiniteDifference out;
  out.charge.resize(horizon);
  out.discharge.resize(horizon);

  // One step for every coordinate keeps the estimate reproducible.
  double h = step;
  auto probes_interior = [&](double width) {
    for (std::size_t k = 0; k < 2 * horizon; ++k) {
      auto& x = k < horizon ? c[k] : d[k - horizon];
      const double keep = x;
      bool ok = true;
      for (double sign : {1.0, -1.0}) {
        x = keep + sign * width;
        ok = ok && solver::strictly_interior(c, d, problem);
      }
      x = keep;
      if (!ok) return false;
    }
    return true;
  };
  for (int shrink = 0; shrink < 40 && !probes_interior(h); ++shrink) h *= 0.5;
  if (!probes_interior(h)) {
    throw DomainError("finite_difference_subgradient: no interior differencing step found");
  }
  out.step_used = h;

  for (std::size_t k = 0; k < 2 * horizon; ++k) {
    auto& x = k < horizon ? c[k] : d[k - horizon];
    const double keep = x;
    x = keep + h;
    const double up = value();
    x = keep - h;
    const double down = value();
    x = keep;
    const double centered = (up - down) / (2.0 * h);
    const double forward = (up - f0) / h;
    const double backward = (f0 - down) / h;
    if (std::abs(forward - backward) > 1e-3 * std::max(1.0, std::abs(centered))) {
      out.nonsmooth_coordinates.push_back(k);
    }
    (k < horizon ? out.charge[k] : out.discharge[k - horizon]) = centered;
  }
  return out;
}

BruteForceResult brute_force_optimum(const solver::DispatchProblem& problem, std::size_t levels) {
  problem.validate();
  const std::size_t horizon = problem.horizon();
  if (horizon > 8) throw InputError("brute_force_optimum: horizon must be <= 8");
  if (levels < 2 || levels > 7) throw InputError("brute_force_optimum: levels must be in [2, 7]");

  const auto& b = problem.battery;
  std::vector<double> grid(levels);
  for (std::size_t i = 0; i < levels; ++i) {
    grid[i] = -b.power_max_mw + 2.0 * b.power_max_mw * static_cast<double>(i) /
                                    static_cast<double>(levels - 1);
  }

  BruteForceResult best;
  best.best_loss = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> digit(horizon, 0);
  std::vector<double> c(horizon), d(horizon);
  while (true) {
    ++best.evaluations;
    for (std::size_t t = 0; t < horizon; ++t) {
      const double net = grid[digit[t]];
      d[t] = std::max(net, 0.0);
      c[t] = std::max(-net, 0.0);
    }
    const auto soc = soc_trajectory(c, d, b);
    const bool feasible = std::all_of(soc.begin(), soc.end(), [&](double s) {
      return s >= b.soc_min && s <= b.soc_max;
    });
    if (feasible) {
      ++best.feasible;
      const double loss = solver::utility_loss(c, d, problem);
      if (loss < best.best_loss) {
        best.best_loss = loss;
        best.schedule = {c, d};
      }
    }
    std::size_t pos = 0;
    while (pos < horizon && ++digit[pos] == levels) digit[pos++] = 0;
    if (pos == horizon) break;
  }
  if (best.feasible == 0) throw InfeasibleError("brute_force_optimum: no feasible grid point");
  return best;
}

void PropertyReport::record(const CheckOutcome& result,
                            const std::function<std::string()>& reproducer) {
  ++samples;
  worst = std::max(worst, result.excess);
  if (result.violated) {
    ++violations;
    if (examples.size() < kMaxExamples) examples.push_back({result.excess, reproducer()});
  }
}

std::vector<std::string_view> suite_names() {
  return {"convexity", "merge", "perturbation", "gradient", "solver-gap", "functions", "all"};
}

std::vector<PropertyReport> convexity_suite(const SuiteOptions& options) {
  std::vector<PropertyReport> reports;
  const auto models = stress_functions(options.inject_concave);
  for (std::size_t m = 0; m < models.size(); ++m) {
    const std::uint64_t seed = derive(options.seed, 100 + m);
    Rng rng(seed);
    auto report = make_report("convexity/" + models[m].name, seed, 1e-8);
    for (std::size_t i = 0; i < options.samples; ++i) {
      const std::size_t length = rng.between(1, 50) + 1;
      const auto s1 = random_profile(rng, length);
      const auto s2 = random_profile(rng, length);
      const double lambda = rng.uniform();
      report.record(check_convexity(s1, s2, lambda, models[m].phi, report.tolerance), [&] {
        return "s1=" + format_vector(s1) + " s2=" + format_vector(s2) +
               " lambda=" + format_number(lambda);
      });
    }
    finish(report);
    reports.push_back(std::move(report));
  }
  return reports;
}

std::vector<PropertyReport> functions_suite(const SuiteOptions& options) {
  std::vector<PropertyReport> reports;
  const auto models = stress_functions(options.inject_concave);
  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto& g = models[m].phi;

    std::uint64_t seed = derive(options.seed, 200 + m);
    Rng rng1(seed);
    auto superadd = make_report("superadditivity/" + models[m].name, seed, 1e-10);
    for (std::size_t i = 0; i < options.samples; ++i) {
      double x1 = rng1.uniform();
      double x2 = rng1.uniform();
      if (x1 + x2 > 1.0) {
        x1 = 1.0 - x1;
        x2 = 1.0 - x2;
      }
      superadd.record(check_superadditive(g, x1, x2, superadd.tolerance), [&] {
        return "x1=" + format_number(x1) + " x2=" + format_number(x2);
      });
    }
    finish(superadd);
    reports.push_back(std::move(superadd));

    seed = derive(options.seed, 300 + m);
    Rng rng2(seed);
    auto difference = make_report("difference_bound/" + models[m].name, seed, 1e-10);
    for (std::size_t i = 0; i < options.samples; ++i) {
      const double a = rng2.uniform();
      const double b = rng2.uniform();
      difference.record(check_difference_bound(g, a, b, difference.tolerance), [&] {
        return "x1=" + format_number(std::max(a, b)) + " x2=" + format_number(std::min(a, b));
      });
    }
    finish(difference);
    reports.push_back(std::move(difference));

    seed = derive(options.seed, 350 + m);
    Rng rng4(seed);
    auto three = make_report("three_term/" + models[m].name, seed, 1e-10);
    for (std::size_t i = 0; i < options.samples; ++i) {
      const double x1 = rng4.uniform();
      const double x2 = rng4.uniform();
      const double x3 = rng4.uniform(std::max(0.0, x1 + x2 - 1.0), std::min(x1, x2));
      three.record(check_three_term(g, x1, x2, x3, three.tolerance), [&] {
        return "x1=" + format_number(x1) + " x2=" + format_number(x2) + " x3=" + format_number(x3);
      });
    }
    finish(three);
    reports.push_back(std::move(three));

    seed = derive(options.seed, 400 + m);
    Rng rng3(seed);
    auto aggregation = make_report("signed_aggregation/" + models[m].name, seed, 1e-10);
    for (std::size_t i = 0; i < options.samples; ++i) {
      const std::size_t n = rng3.between(2, 8);
      const double total = rng3.uniform(1e-3, 1.0);
      std::vector<double> xs(n);
      bool accepted = false;
      for (int attempt = 0; attempt < 1000 && !accepted; ++attempt) {
        double partial = 0.0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
          xs[k] = rng3.uniform(-total, total);
          partial += xs[k];
        }
        xs[n - 1] = total - partial;
        accepted = std::abs(xs[n - 1]) <= total;
      }
      if (!accepted) {
        std::fill(xs.begin(), xs.end(), 0.0);
        xs[0] = total;
      }
      aggregation.record(check_signed_aggregation(g, xs, aggregation.tolerance),
                         [&] { return "xs=" + format_vector(xs); });
    }
    finish(aggregation);
    reports.push_back(std::move(aggregation));
  }
  return reports;
}

std::vector<PropertyReport> merge_suite(const SuiteOptions& options) {
  std::vector<PropertyReport> reports;
  const auto models = stress_functions(options.inject_concave);
  for (std::size_t m = 0; m < models.size(); ++m) {
    const std::uint64_t seed = derive(options.seed, 500 + m);
    Rng rng(seed);
    auto report = make_report("adjacent_merge/" + models[m].name, seed, 1e-10);
    for (std::size_t i = 0; i < options.samples; ++i) {
      const std::size_t steps = rng.between(2, 50);
      const auto profile = random_profile(rng, steps + 1);
      const std::size_t step = rng.index(steps - 1);
      report.record(check_adjacent_merge(profile, step, models[m].phi, report.tolerance), [&] {
        return "profile=" + format_vector(profile) + " step=" + std::to_string(step);
      });
    }
    finish(report);
    reports.push_back(std::move(report));
  }
  return reports;
}

std::vector<PropertyReport> perturbation_suite(const SuiteOptions& options) {
  const std::uint64_t seed = derive(options.seed, 600);
  Rng rng(seed);
  auto report = make_report("perturbation_bounds", seed, 1e-10);
  for (std::size_t i = 0; i < options.samples; ++i) {
    const std::size_t steps = rng.between(1, 50);
    const auto profile = random_profile(rng, steps + 1);
    const std::size_t step = rng.index(steps);
    double amplitude = rng.uniform(-0.5, 0.5);
    if (std::abs(amplitude) < 1e-6) amplitude = 0.25;
    report.record(check_perturbation_bounds(profile, step, amplitude, report.tolerance), [&] {
      return "profile=" + format_vector(profile) + " step=" + std::to_string(step) +
             " amplitude=" + format_number(amplitude);
    });
  }
  finish(report);
  return {std::move(report)};
}

std::vector<PropertyReport> gradient_suite(const SuiteOptions& options) {
  using degradation::StressModel;
  const std::uint64_t seed = derive(options.seed, 700);
  Rng rng(seed);
  auto report = make_report("subgradient_vs_finite_difference", seed, 1e-4);
  const std::size_t wanted = std::min<std::size_t>(options.samples, 50);
  const std::array<StressModel, 3> models{StressModel::lithium_ion_default(),
                                          StressModel::exponential(1e-3, 1.0),
                                          StressModel::linear(2e-4)};
  std::size_t attempts = 0;
  while (report.samples < wanted && attempts < 100 * wanted + 100) {
    ++attempts;
    solver::DispatchProblem problem;
    problem.battery.interval_hours = 0.05;
    problem.battery.soc_initial = rng.uniform(0.3, 0.7);
    problem.model = models[attempts % models.size()];
    const std::size_t horizon = rng.between(3, 12);
    std::vector<double> r(horizon), c(horizon), d(horizon);
    for (std::size_t t = 0; t < horizon; ++t) {
      r[t] = rng.uniform(-1.0, 1.0);
      c[t] = rng.uniform(0.05, 0.95);
      d[t] = rng.uniform(0.05, 0.95);
    }
    problem.signal = market::RegulationSignal(r);
    const double weight = std::pow(10.0, rng.uniform(0.0, 3.0));
    if (!solver::strictly_interior(c, d, problem, 1e-3)) continue;

    const auto fd = finite_difference_subgradient(c, d, problem, weight);
    if (!fd.smooth()) {
      ++report.skipped;
      continue;
    }
    const auto g = solver::subgradient(c, d, problem, weight);
    double err = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
      err = std::max({err, std::abs(g.charge[t] - fd.charge[t]),
                      std::abs(g.discharge[t] - fd.discharge[t])});
    }
    const double scale = std::max({1.0, max_abs(fd.charge), max_abs(fd.discharge)});
    const double rel = err / scale;
    report.record(outcome(rel, 0.0, rel, report.tolerance), [&] {
      return "model=" + std::string(degradation::to_string(problem.model.variant())) +
             " s0=" + format_number(problem.battery.soc_initial) + " t_s=0.05" +
             " barrier_weight=" + format_number(weight) + " r=" + format_vector(r) +
             " c=" + format_vector(c) + " d=" + format_vector(d);
    });
  }
  finish(report);
  return {std::move(report)};
}

solver::DispatchProblem toy_problem(std::uint64_t seed) {
  Rng rng(derive(seed, 900));
  solver::DispatchProblem problem;
  problem.battery.interval_hours = 0.05;
  problem.battery.soc_initial = rng.uniform(0.3, 0.7);
  std::vector<double> r(6);
  for (auto& x : r) x = rng.uniform(-1.0, 1.0);
  problem.signal = market::RegulationSignal(std::move(r));
  return problem;
}

solver::SolverConfig toy_solver_config() {
  solver::SolverConfig config;
  config.step_size = 1e-3;
  return config;
}

std::vector<PropertyReport> solver_gap_suite(const SuiteOptions& options) {
  const std::uint64_t seed = derive(options.seed, 800);
  auto report = make_report("solver_gap", seed, 0.0);
  const std::size_t instances = std::min<std::size_t>(options.samples, 20);
  const auto config = toy_solver_config();
  for (std::size_t i = 0; i < instances; ++i) {
    const auto problem = toy_problem(derive(seed, i));
    const auto grid = brute_force_optimum(problem, 5);
    const auto sol = solver::solve(problem, config);
    const double bound = solver::convergence_gap(sol.max_subgradient_norm, config.step_size) + 1e-3;
    const double excess = sol.best_objective - grid.best_loss - bound;
    report.record(outcome(sol.best_objective, grid.best_loss + bound, excess, 0.0), [&] {
      return "instance=" + std::to_string(i) + " u_best=" + format_number(sol.best_objective) +
             " grid=" + format_number(grid.best_loss) + " bound=" + format_number(bound) +
             " signal=" + format_vector(problem.signal.values());
    });
  }
  finish(report);
  return {std::move(report)};
}

std::vector<PropertyReport> run_suite(std::string_view name, const SuiteOptions& options) {
  if (name == "convexity") return convexity_suite(options);
  if (name == "functions") return functions_suite(options);
  if (name == "merge") return merge_suite(options);
  if (name == "perturbation") return perturbation_suite(options);
  if (name == "gradient") return gradient_suite(options);
  if (name == "solver-gap") return solver_gap_suite(options);
  if (name == "all") {
    std::vector<PropertyReport> all;
    for (auto suite : suite_names()) {
      if (suite == "all" || suite == "functions") continue;
      auto part = run_suite(suite, options);
      std::move(part.begin(), part.end(), std::back_inserter(all));
    }
    return all;
  }
  throw InputError("unknown verify suite '" + std::string(name) +
                   "' (expected convexity|functions|merge|perturbation|gradient|solver-gap|all)");
}

}  // namespace rfd::oracle

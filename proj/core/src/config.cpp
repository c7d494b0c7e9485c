#include "rfd/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "rfd/error.hpp"
#include "rfd/io.hpp"

namespace rfd::config {

using nlohmann::json;

namespace {

// Reads the keys of one JSON object, remembering which were consumed so that
// leftovers (typos) can be reported.
class Block {
 public:
  Block(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw InputError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  void read(const std::string& key, double& out) {
    if (const auto* v = take(key)) {
      if (!v->is_number()) throw InputError(name(key) + ": expected a number");
      out = v->get<double>();
    }
  }

  void read(const std::string& key, std::size_t& out) {
    if (const auto* v = take(key)) {
      if (!v->is_number_unsigned()) throw InputError(name(key) + ": expected a nonnegative integer");
      out = v->get<std::size_t>();
    }
  }

  void read(const std::string& key, std::string& out) {
    if (const auto* v = take(key)) {
      if (!v->is_string()) throw InputError(name(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  Block child(const std::string& key) {
    const auto* v = take(key);
    return Block(v ? *v : empty(), name(key));
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!used_.contains(key)) throw InputError(name(key) + ": unknown key");
    }
  }

  [[nodiscard]] std::string name(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const json* take(const std::string& key) {
    used_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  static const json& empty() {
    static const json e = json::object();
    return e;
  }

  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

void read_battery(Block b, BatteryParams& p) {
  b.read("energy_mwh", p.energy_mwh);
  b.read("power_max_mw", p.power_max_mw);
  b.read("eta_charge", p.eta_charge);
  b.read("eta_discharge", p.eta_discharge);
  b.read("soc_min", p.soc_min);
  b.read("soc_max", p.soc_max);
  b.read("soc_initial", p.soc_initial);
  b.read("cell_price_per_mwh", p.cell_price_per_mwh);
  if (b.has("interval_seconds") && b.has("interval_hours")) {
    throw InputError(b.name("interval_seconds") + ": give interval_seconds or interval_hours, not both");
  }
  if (b.has("interval_seconds")) {
    double seconds = 0.0;
    b.read("interval_seconds", seconds);
    p.interval_hours = seconds / 3600.0;
  }
  b.read("interval_hours", p.interval_hours);
  b.finish();
  if (p.soc_min < p.soc_max && !(p.soc_initial > p.soc_min && p.soc_initial < p.soc_max)) {
    throw InfeasibleError(b.name("soc_initial") + ": initial SoC lies outside (soc_min, soc_max)");
  }
  p.validate();
}

degradation::StressModel read_stress(Block b, const degradation::StressModel& fallback) {
  using degradation::StressModel;
  std::string variant(degradation::to_string(fallback.variant()));
  b.read("variant", variant);
  const auto kind = degradation::parse_variant(variant);
  const auto defaults = kind == fallback.variant() ? fallback.coefficients()
                                                   : std::array<double, 2>{0.0, 0.0};
  double first = defaults[0];
  double second = defaults[1];
  StressModel model = fallback;
  switch (kind) {
    case StressModel::Variant::linear:
      b.read("k1", first);
      model = StressModel::linear(first);
      break;
    case StressModel::Variant::exponential:
      b.read("k2", first);
      b.read("k3", second);
      model = StressModel::exponential(first, second);
      break;
    case StressModel::Variant::polynomial:
      b.read("k4", first);
      b.read("k5", second);
      model = StressModel::polynomial(first, second);
      break;
  }
  b.finish();
  return model;
}

void read_market(Block b, RunConfig& c) {
  b.read("capacity_price", c.market.capacity_price);
  b.read("mismatch_price", c.market.mismatch_price);
  b.read("capacity_mw", c.market.capacity_mw);
  std::string form(market::to_string(c.penalty));
  b.read("penalty", form);
  c.penalty = market::parse_penalty_form(form);
  b.finish();
  c.market.validate();
}

void read_solver(Block b, solver::SolverConfig& s) {
  b.read("step_size", s.step_size);
  b.read("barrier_weight0", s.barrier_weight0);
  b.read("barrier_growth", s.barrier_growth);
  b.read("barrier_stages", s.barrier_stages);
  b.read("inner_iterations", s.inner_iterations);
  b.read("interior_margin", s.interior_margin);
  b.read("max_halvings", s.max_halvings);
  b.read("stall_window", s.stall_window);
  b.read("stall_tolerance", s.stall_tolerance);
  std::string rule(solver::to_string(s.rule));
  b.read("rule", rule);
  s.rule = solver::parse_subgradient_rule(rule);
  b.finish();
}

void read_signal(Block b, SignalSource& s, const std::filesystem::path& base_dir) {
  std::string file;
  b.read("file", file);
  if (!file.empty()) {
    std::filesystem::path path(file);
    if (path.is_relative()) path = base_dir / path;
    if (!std::filesystem::exists(path)) {
      throw InputError(b.name("file") + ": '" + path.string() + "' does not exist");
    }
    s.file = path;
  }
  b.read("horizon", s.horizon);
  b.read("correlation", s.spec.correlation);
  b.read("sigma", s.spec.sigma);
  b.finish();
  if (s.horizon == 0) throw InputError(b.name("horizon") + ": must be positive");
}

}  // namespace

RunConfig default_run_config() { return RunConfig{}; }

RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c = default_run_config();
  Block root(doc, "");
  read_battery(root.child("battery"), c.battery);
  c.model = read_stress(root.child("stress"), c.model);
  {
    Block lin = root.child("linear_benchmark");
    lin.read("k1", c.linear_k1);
    lin.finish();
    if (!(c.linear_k1 >= 0.0)) throw InputError("linear_benchmark.k1: must be >= 0");
  }
  read_market(root.child("market"), c);
  read_solver(root.child("solver"), c.solver);
  read_signal(root.child("signal"), c.signal, base_dir);
  std::string out = c.output_dir.string();
  root.read("output_dir", out);
  c.output_dir = out;
  std::size_t seed = c.seed;
  root.read("seed", seed);
  c.seed = seed;
  c.solver.seed = c.seed;
  root.finish();
  c.solver.validate(c.battery);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_run_config(text.str(), path.parent_path());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string to_json(const RunConfig& c) {
  const auto& b = c.battery;
  json j;
  j["battery"] = {{"energy_mwh", b.energy_mwh},
                  {"power_max_mw", b.power_max_mw},
                  {"eta_charge", b.eta_charge},
                  {"eta_discharge", b.eta_discharge},
                  {"soc_min", b.soc_min},
                  {"soc_max", b.soc_max},
                  {"soc_initial", b.soc_initial},
                  {"interval_hours", b.interval_hours},
                  {"cell_price_per_mwh", b.cell_price_per_mwh}};
  const auto k = c.model.coefficients();
  switch (c.model.variant()) {
    case degradation::StressModel::Variant::linear:
      j["stress"] = {{"variant", "linear"}, {"k1", k[0]}};
      break;
    case degradation::StressModel::Variant::exponential:
      j["stress"] = {{"variant", "exponential"}, {"k2", k[0]}, {"k3", k[1]}};
      break;
    case degradation::StressModel::Variant::polynomial:
      j["stress"] = {{"variant", "polynomial"}, {"k4", k[0]}, {"k5", k[1]}};
      break;
  }
  j["linear_benchmark"] = {{"k1", c.linear_k1}};
  j["market"] = {{"capacity_price", c.market.capacity_price},
                 {"mismatch_price", c.market.mismatch_price},
                 {"capacity_mw", c.market.capacity_mw},
                 {"penalty", market::to_string(c.penalty)}};
  const auto& s = c.solver;
  j["solver"] = {{"step_size", s.step_size},
                 {"barrier_weight0", s.barrier_weight0},
                 {"barrier_growth", s.barrier_growth},
                 {"barrier_stages", s.barrier_stages},
                 {"inner_iterations", s.inner_iterations},
                 {"interior_margin", s.interior_margin},
                 {"max_halvings", s.max_halvings},
                 {"stall_window", s.stall_window},
                 {"stall_tolerance", s.stall_tolerance},
                 {"rule", solver::to_string(s.rule)}};
  json sig = {{"horizon", c.signal.horizon},
              {"correlation", c.signal.spec.correlation},
              {"sigma", c.signal.spec.sigma}};
  if (c.signal.file) sig["file"] = c.signal.file->string();
  j["signal"] = std::move(sig);
  j["output_dir"] = c.output_dir.string();
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

market::RegulationSignal load_signal(const RunConfig& config) {
  if (config.signal.file) return market::RegulationSignal(io::read_signal_csv(*config.signal.file));
  return market::generate_signal(config.seed, config.signal.horizon, config.signal.spec);
}

solver::DispatchProblem make_problem(const RunConfig& config, market::RegulationSignal signal) {
  solver::DispatchProblem p;
  p.battery = config.battery;
  p.model = config.model;
  p.market = config.market;
  p.signal = std::move(signal);
  p.penalty = config.penalty;
  return p;
}

}  // namespace rfd::config

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "rfd/config.hpp"
#include "rfd/error.hpp"
#include "rfd/io.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("rfd_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string error_of(const std::string& csv, const std::string& column = "soc") {
  std::istringstream in(csv);
  try {
    rfd::io::read_csv_column(in, "input.csv", column);
  } catch (const rfd::InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Csv, ReadsNamedColumnAndSkipsBlankLines) {
  std::istringstream in("t,soc\n0,0.2\n\n1, 0.5\n2,0.1\r\n");
  EXPECT_EQ(rfd::io::read_csv_column(in, "x", "soc"), (std::vector<double>{0.2, 0.5, 0.1}));
}

TEST(Csv, ErrorsNameTheLine) {
  EXPECT_EQ(error_of("t,r\n0,0.1\n"), "input.csv:1: header has no 'soc' column");
  EXPECT_EQ(error_of("t,soc\n0,0.1\n1\n"), "input.csv:3: expected 2 fields, found 1");
  EXPECT_EQ(error_of("t,soc\n0,abc\n"), "input.csv:2: 'abc' is not a number");
  EXPECT_EQ(error_of("t,soc\n0,\n"), "input.csv:2: '' is not a number");
  EXPECT_EQ(error_of("t,soc\n0,0.1\n1,inf\n"), "input.csv:3: non-finite value in column 'soc'");
  EXPECT_EQ(error_of(""), "input.csv: empty file");
}

TEST(Csv, FixtureProfileLoads) {
  const auto soc = rfd::io::read_profile_csv(fs::path(RFD_DATA_DIR) / "fixture_profile.csv");
  EXPECT_EQ(soc, (std::vector<double>{0.2, 0.5, 0.1, 0.9, 0.3, 0.6, 0.0, 0.8, 0.2}));
  EXPECT_THROW(rfd::io::read_profile_csv("/nonexistent/profile.csv"), rfd::InputError);
}

TEST(Output, TraceHasClosingRow) {
  const std::vector<double> c = {0.5, 0.0}, d = {0.0, 0.25}, s = {0.5, 0.6, 0.55}, r = {-0.5, 0.25};
  const auto text = rfd::io::trace_csv(c, d, s, r);
  EXPECT_EQ(text, "t,c,d,s,r\n0,0.5,0,0.5,-0.5\n1,0,0.25,0.59999999999999998,0.25\n"
                  "2,,,0.55000000000000004,\n");
  EXPECT_THROW(rfd::io::trace_csv(c, d, r, r), rfd::InputError);
}

TEST(Output, ProfileCsvRoundTrips) {
  const std::vector<double> soc = {0.1, 0.123456789012345, 0.9};
  std::istringstream in(rfd::io::profile_csv(soc));
  EXPECT_EQ(rfd::io::read_csv_column(in, "x", "soc"), soc);
}

TEST(Output, AtomicWriteCreatesDirectoriesAndLeavesNoTemporary) {
  const auto dir = scratch("atomic");
  const auto path = dir / "nested" / "file.txt";
  rfd::io::write_file_atomic(path, "first");
  rfd::io::write_file_atomic(path, "second");
  EXPECT_EQ(slurp(path), "second");
  EXPECT_FALSE(fs::exists(dir / "nested" / "file.txt.tmp"));
}

TEST(Output, CyclesJsonForFixture) {
  const auto cycles = rfd::rainflow::count_cycles(
      std::vector<double>{0.2, 0.5, 0.1, 0.9, 0.3, 0.6, 0.0, 0.8, 0.2});
  const auto j = nlohmann::json::parse(rfd::io::cycles_json(cycles));
  ASSERT_EQ(j.size(), 8u);
  EXPECT_EQ(j[3]["direction"], "discharge");
  EXPECT_NEAR(j[3]["depth"].get<double>(), 0.9, 1e-12);
  EXPECT_EQ(j[4]["kind"], "full");
}

TEST(Output, EconomicsJsonKeyOrder) {
  rfd::market::EconomicsReport r;
  r.payment = 10.0;
  r.mismatch_penalty = 4.0;
  const auto j = nlohmann::ordered_json::parse(rfd::io::economics_json(r));
  std::vector<std::string> keys;
  for (const auto& [key, value] : j.items()) keys.push_back(key);
  ASSERT_GE(keys.size(), 5u);
  EXPECT_EQ(keys[0], "total_regulation_utility");
  EXPECT_EQ(keys[1], "regulation_service_payment");
  EXPECT_EQ(keys[2], "modeled_battery_degradation");
  EXPECT_EQ(keys[3], "actual_battery_degradation");
  EXPECT_EQ(keys[4], "battery_life_expectancy_months");
  EXPECT_EQ(j["regulation_service_payment"], 6.0);
  EXPECT_TRUE(j["battery_life_expectancy_months"].is_null());
}

TEST(Config, DefaultFileMatchesBuiltInDefaults) {
  const auto c = rfd::config::load_run_config(fs::path(RFD_CONFIG_DIR) / "default.json");
  const auto d = rfd::config::default_run_config();
  EXPECT_DOUBLE_EQ(c.battery.interval_hours, d.battery.interval_hours);
  EXPECT_DOUBLE_EQ(c.battery.replacement_cost(), 150000.0);
  EXPECT_EQ(c.model.variant(), rfd::degradation::StressModel::Variant::polynomial);
  EXPECT_EQ(c.model.coefficients(), d.model.coefficients());
  EXPECT_DOUBLE_EQ(c.linear_k1, 2e-4);
  EXPECT_EQ(c.signal.horizon, 1800u);
  EXPECT_EQ(c.solver.inner_iterations, 2000u);
  EXPECT_EQ(c.seed, 1u);
}

TEST(Config, SerializedFormParsesBack) {
  auto c = rfd::config::default_run_config();
  c.model = rfd::degradation::StressModel::exponential(1e-3, 1.0);
  c.seed = 9;
  const auto back = rfd::config::parse_run_config(rfd::config::to_json(c), ".");
  EXPECT_EQ(back.model.variant(), rfd::degradation::StressModel::Variant::exponential);
  EXPECT_EQ(back.seed, 9u);
  EXPECT_DOUBLE_EQ(back.battery.interval_hours, c.battery.interval_hours);
}

TEST(Config, RejectsBadInput) {
  using rfd::config::parse_run_config;
  EXPECT_THROW(parse_run_config(R"({"batery": {}})", "."), rfd::InputError);
  EXPECT_THROW(parse_run_config(R"({"battery": {"energy": 1}})", "."), rfd::InputError);
  EXPECT_THROW(parse_run_config(R"({"battery": {"energy_mwh": "big"}})", "."), rfd::InputError);
  EXPECT_THROW(parse_run_config(R"({"stress": {"variant": "cubic"}})", "."), rfd::InputError);
  EXPECT_THROW(parse_run_config(R"({"solver": {"step_size": 0}})", "."), rfd::InputError);
  EXPECT_THROW(parse_run_config("{not json", "."), rfd::InputError);
  EXPECT_THROW(
      parse_run_config(R"({"battery": {"interval_seconds": 4, "interval_hours": 0.1}})", "."),
      rfd::InputError);
  EXPECT_THROW(parse_run_config(R"({"signal": {"file": "missing.csv"}})", "."), rfd::InputError);
  EXPECT_THROW(parse_run_config(R"({"battery": {"soc_initial": 0.0}})", "."),
               rfd::InfeasibleError);
}

TEST(Config, UnknownKeyIsNamed) {
  try {
    rfd::config::parse_run_config(R"({"market": {"capacity_pryce": 5}})", ".");
    FAIL() << "expected InputError";
  } catch (const rfd::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("market.capacity_pryce"), std::string::npos);
  }
}

TEST(Config, SignalFileIsResolvedAgainstTheConfigDirectory) {
  const auto dir = scratch("signal");
  {
    std::ofstream(dir / "sig.csv") << "t,r\n0,0.5\n1,-0.25\n";
    std::ofstream(dir / "run.json") << R"({"signal": {"file": "sig.csv"}})";
  }
  const auto c = rfd::config::load_run_config(dir / "run.json");
  const auto signal = rfd::config::load_signal(c);
  ASSERT_EQ(signal.size(), 2u);
  EXPECT_EQ(signal[1], -0.25);
  const auto problem = rfd::config::make_problem(c, signal);
  EXPECT_EQ(problem.horizon(), 2u);
}

TEST(Config, GeneratedSignalFollowsSeed) {
  auto c = rfd::config::default_run_config();
  c.signal.horizon = 50;
  const auto a = rfd::config::load_signal(c);
  c.seed = 2;
  const auto b = rfd::config::load_signal(c);
  EXPECT_EQ(a.size(), 50u);
  EXPECT_NE(a[3], b[3]);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "rfd/error.hpp"
#include "rfd/oracle.hpp"

namespace orc = rfd::oracle;
using rfd::degradation::StressModel;

namespace {

const orc::StressFunction kSquare = [](double x) { return x * x; };
const orc::StressFunction kSqrt = [](double x) { return std::sqrt(x); };

const orc::PropertyReport* find(const std::vector<orc::PropertyReport>& reports,
                                const std::string& name) {
  for (const auto& r : reports) {
    if (r.property == name) return &r;
  }
  return nullptr;
}

}  // namespace

TEST(Decompose, RoundTrips) {
  const std::vector<double> s = {0.2, 0.5, 0.1, 0.9, 0.3};
  const auto steps = orc::decompose_steps(s);
  EXPECT_EQ(steps.initial, 0.2);
  ASSERT_EQ(steps.amplitudes.size(), 4u);
  EXPECT_NEAR(steps.amplitudes[2], 0.8, 1e-15);
  const auto back = steps.reconstruct();
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(back[i], s[i], 1e-15);
}

TEST(RainflowCost, AgreesWithModelCost) {
  const std::vector<double> s = {0.2, 0.5, 0.1, 0.9, 0.3, 0.6, 0.0, 0.8, 0.2};
  const auto m = StressModel::lithium_ion_default();
  EXPECT_NEAR(orc::rainflow_cost(s, orc::as_function(m)), rfd::degradation::cycle_cost(s, m),
              1e-15);
}

TEST(Checks, ConvexityHoldsForConvexStressAndFailsForConcave) {
  const std::vector<double> s1 = {0.0, 0.5}, s2 = {0.0, 0.1};
  EXPECT_FALSE(orc::check_convexity(s1, s2, 0.5, kSquare).violated);
  const auto bad = orc::check_convexity(s1, s2, 0.5, kSqrt);
  EXPECT_TRUE(bad.violated);
  EXPECT_GT(bad.excess, 0.03);
}

TEST(Checks, MergingCoMonotoneStepsIsFree) {
  const std::vector<double> ramp = {0.0, 0.3, 0.7};
  const auto same = orc::check_adjacent_merge(ramp, 0, kSquare);
  EXPECT_FALSE(same.violated);
  EXPECT_NEAR(same.lhs, same.rhs, 1e-15);
  const std::vector<double> zigzag = {0.0, 0.6, 0.2};
  const auto merged = orc::check_adjacent_merge(zigzag, 0, kSquare);
  EXPECT_FALSE(merged.violated);
  EXPECT_LT(merged.rhs, merged.lhs);
}

TEST(Checks, AddStepShiftsTheTail) {
  const auto out = orc::add_step(std::vector<double>{0.0, 0.5, 1.0}, 0, 0.2);
  EXPECT_EQ(out[0], 0.0);
  EXPECT_NEAR(out[1], 0.7, 1e-15);
  EXPECT_NEAR(out[2], 1.2, 1e-15);
}

TEST(Checks, PerturbationBoundsOnARamp) {
  const std::vector<double> ramp = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (std::size_t step = 0; step < 4; ++step) {
    for (double amplitude : {-0.6, -0.1, 0.1, 0.4}) {
      EXPECT_FALSE(orc::check_perturbation_bounds(ramp, step, amplitude).violated);
    }
  }
}

TEST(Checks, ScalarInequalitiesForSquare) {
  EXPECT_FALSE(orc::check_superadditive(kSquare, 0.3, 0.4).violated);
  EXPECT_TRUE(orc::check_superadditive(kSqrt, 0.3, 0.4).violated);
  EXPECT_FALSE(orc::check_difference_bound(kSquare, 0.7, 0.2).violated);
  EXPECT_FALSE(orc::check_three_term(kSquare, 0.6, 0.5, 0.3).violated);
}

TEST(Checks, SignedAggregationCounterexample) {
  const std::vector<double> xs = {0.9, 0.9, -0.4, -0.4};
  // g(1.0) = 1 while 0.81 + 0.81 - 0.16 - 0.16 = 1.3.
  const auto out = orc::check_signed_aggregation(kSquare, xs);
  EXPECT_TRUE(out.violated);
  EXPECT_NEAR(out.excess, 0.3, 1e-12);
  const auto poly = orc::check_signed_aggregation(orc::as_function(StressModel::lithium_ion_default()), xs);
  EXPECT_TRUE(poly.violated);
  EXPECT_FALSE(orc::check_signed_aggregation(kSquare, std::vector<double>{0.5, 0.5}).violated);
}

TEST(FiniteDifference, FlagsTheMismatchKink) {
  rfd::solver::DispatchProblem p;
  p.battery.interval_hours = 0.05;
  p.signal = rfd::market::RegulationSignal({0.2, -0.3, 0.6});
  // Interval 0 delivers exactly the requested 0.2 MW.
  const std::vector<double> c = {0.3, 0.5, 0.1};
  const std::vector<double> d = {0.5, 0.4, 0.2};
  const auto fd = orc::finite_difference_subgradient(c, d, p, 10.0);
  EXPECT_FALSE(fd.smooth());
  EXPECT_NE(std::find(fd.nonsmooth_coordinates.begin(), fd.nonsmooth_coordinates.end(), 0u),
            fd.nonsmooth_coordinates.end());
  EXPECT_GT(fd.step_used, 0.0);
}

TEST(BruteForce, IdleIsOptimalWithoutPrices) {
  auto p = orc::toy_problem(1);
  p.market.capacity_price = 0.0;
  p.market.mismatch_price = 0.0;
  const auto result = orc::brute_force_optimum(p, 3);
  EXPECT_NEAR(result.best_loss, 0.0, 1e-12);
  EXPECT_EQ(result.evaluations, 729u);
}

TEST(BruteForce, FiveLevelGridIsFastAndRefinementHelps) {
  const auto p = orc::toy_problem(3);
  const auto begin = std::chrono::steady_clock::now();
  const auto five = orc::brute_force_optimum(p, 5);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
  EXPECT_EQ(five.evaluations, 15625u);
  EXPECT_LT(seconds, 1.0);
  const auto three = orc::brute_force_optimum(p, 3);
  const auto seven = orc::brute_force_optimum(p, 7);
  EXPECT_LE(seven.best_loss, three.best_loss + 1e-12);
  EXPECT_LE(five.feasible, five.evaluations);
}

TEST(BruteForce, RejectsLargeInstances) {
  rfd::solver::DispatchProblem p;
  p.signal = rfd::market::generate_signal(1, 9);
  EXPECT_THROW(orc::brute_force_optimum(p, 3), rfd::InputError);
  EXPECT_THROW(orc::brute_force_optimum(orc::toy_problem(1), 8), rfd::InputError);
  EXPECT_THROW(orc::brute_force_optimum(orc::toy_problem(1), 1), rfd::InputError);
}

TEST(Suites, ConcaveInjectionIsCaught) {
  const auto reports = orc::convexity_suite({.samples = 2000, .seed = 1, .inject_concave = true});
  const auto* concave = find(reports, "convexity/concave_injected");
  ASSERT_NE(concave, nullptr);
  EXPECT_GT(concave->violations, 0u);
  EXPECT_FALSE(concave->examples.empty());
  const auto* poly = find(reports, "convexity/polynomial");
  ASSERT_NE(poly, nullptr);
  EXPECT_TRUE(poly->passed());
}

TEST(Suites, MergeHoldsEvenForConcaveStress) {
  // Merging an opposite pair never deepens a cycle, so concavity alone does
  // not break merge monotonicity.
  const auto reports = orc::merge_suite({.samples = 2000, .seed = 1, .inject_concave = true});
  const auto* concave = find(reports, "adjacent_merge/concave_injected");
  ASSERT_NE(concave, nullptr);
  EXPECT_EQ(concave->violations, 0u);
}

TEST(Suites, AreDeterministicPerSeed) {
  const auto a = orc::run_suite("merge", {.samples = 300, .seed = 3});
  const auto b = orc::run_suite("merge", {.samples = 300, .seed = 3});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].worst, b[i].worst);
    EXPECT_EQ(a[i].seed, b[i].seed);
  }
}

TEST(Suites, SmallRunsPass) {
  for (const char* name : {"convexity", "merge", "perturbation"}) {
    for (const auto& r : orc::run_suite(name, {.samples = 300, .seed = 11})) {
      EXPECT_TRUE(r.passed()) << r.property;
      EXPECT_EQ(r.samples, 300u) << r.property;
    }
  }
  for (const auto& r : orc::gradient_suite({.samples = 10, .seed = 11})) {
    EXPECT_TRUE(r.passed()) << r.property;
  }
  for (const auto& r : orc::solver_gap_suite({.samples = 2, .seed = 11})) {
    EXPECT_TRUE(r.passed()) << r.property;
    EXPECT_EQ(r.samples, 2u);
  }
}

TEST(Suites, FunctionsSuiteSeparatesTheProperties) {
  const auto reports = orc::functions_suite({.samples = 2000, .seed = 7});
  for (const char* name : {"superadditivity/polynomial", "difference_bound/polynomial",
                           "three_term/polynomial", "superadditivity/exponential",
                           "three_term/exponential"}) {
    const auto* r = find(reports, name);
    ASSERT_NE(r, nullptr) << name;
    EXPECT_TRUE(r->passed()) << name;
  }
  const auto* aggregation = find(reports, "signed_aggregation/polynomial");
  ASSERT_NE(aggregation, nullptr);
  EXPECT_GT(aggregation->violations, 0u);
}

TEST(Suites, NamesAndUnknownSuite) {
  const auto names = orc::suite_names();
  EXPECT_NE(std::find(names.begin(), names.end(), "all"), names.end());
  EXPECT_THROW(orc::run_suite("nosuch", {}), rfd::InputError);
}

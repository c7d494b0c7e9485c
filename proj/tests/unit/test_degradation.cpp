#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rfd/degradation.hpp"
#include "rfd/error.hpp"

namespace deg = rfd::degradation;
using deg::StressModel;

TEST(StressModel, PolynomialValues) {
  const auto m = StressModel::lithium_ion_default();
  EXPECT_DOUBLE_EQ(m(1.0), 4.5e-4);
  EXPECT_NEAR(m(0.5), 4.5e-4 * std::pow(0.5, 1.3), 1e-18);
  EXPECT_NEAR(m.derivative(0.25), 1.3 * 4.5e-4 * std::pow(0.25, 0.3), 1e-15);
  EXPECT_EQ(m(0.0), 0.0);
}

TEST(StressModel, LinearAndExponentialValues) {
  const auto lin = StressModel::linear(2e-4);
  EXPECT_DOUBLE_EQ(lin(0.5), 1e-4);
  EXPECT_DOUBLE_EQ(lin.derivative(0.3), 2e-4);
  const auto ex = StressModel::exponential(1e-3, 1.0);
  EXPECT_NEAR(ex(0.5), 1e-3 * 0.5 * std::exp(0.5), 1e-15);
  EXPECT_NEAR(ex.derivative(0.5), 1e-3 * std::exp(0.5) * 1.5, 1e-15);
  EXPECT_EQ(StressModel::linear(0.0)(0.7), 0.0);
}

TEST(StressModel, RejectsBadCoefficients) {
  EXPECT_THROW(StressModel::linear(-1.0), rfd::InputError);
  EXPECT_THROW(StressModel::polynomial(4.5e-4, 0.5), rfd::InputError);
  EXPECT_THROW(StressModel::polynomial(0.0, 1.3), rfd::InputError);
  EXPECT_THROW(StressModel::exponential(1e-3, -1.0), rfd::InputError);
}

TEST(StressModel, DepthOutsideUnitIntervalIsADomainError) {
  const auto m = StressModel::lithium_ion_default();
  EXPECT_THROW((void)m(1.5), rfd::DomainError);
  EXPECT_THROW((void)m(-0.1), rfd::DomainError);
}

TEST(StressModel, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (const auto& m : {StressModel::lithium_ion_default(), StressModel::exponential(1e-3, 1.0),
                        StressModel::linear(2e-4)}) {
    for (int i = 0; i < 100; ++i) {
      const double d = u(rng);
      const double h = 1e-6;
      const double fd = (m(d + h) - m(d - h)) / (2 * h);
      EXPECT_NEAR(m.derivative(d), fd, 1e-7 * std::max(1.0, std::abs(fd)) + 1e-12);
    }
  }
}

TEST(StressModel, ConvexAndNondecreasingOnGrid) {
  for (const auto& m : {StressModel::lithium_ion_default(), StressModel::exponential(1e-3, 1.0),
                        StressModel::linear(2e-4)}) {
    double previous = -1.0;
    for (int i = 0; i <= 100; ++i) {
      const double d = i / 100.0;
      EXPECT_GE(m(d), previous);
      previous = m(d);
      if (i > 0 && i < 100) {
        EXPECT_LE(m(d), 0.5 * (m(d - 0.01) + m(d + 0.01)) + 1e-18);
      }
    }
  }
}

TEST(StressModel, VariantNamesRoundTrip) {
  for (auto v : {StressModel::Variant::linear, StressModel::Variant::exponential,
                 StressModel::Variant::polynomial}) {
    EXPECT_EQ(deg::parse_variant(deg::to_string(v)), v);
  }
  EXPECT_THROW(deg::parse_variant("cubic"), rfd::InputError);
}

TEST(CycleCost, FullCycleCountsTwice) {
  const auto m = StressModel::lithium_ion_default();
  // Two residual halves of depth 1.
  EXPECT_NEAR(deg::cycle_cost(std::vector<double>{0.0, 1.0, 0.0}, m), 9e-4, 1e-15);
  // One nested full cycle of depth 0.3 between the residual halves.
  const std::vector<double> s = {0.0, 0.8, 0.5, 0.8, 0.2};
  const auto breakdown = deg::cycle_cost_breakdown(rfd::rainflow::count_cycles(s), m);
  EXPECT_NEAR(breakdown.half_cycle_convention, m(0.8) + m(0.6) + 2 * m(0.3), 1e-15);
  EXPECT_NEAR(breakdown.once_per_full_cycle, m(0.8) + m(0.6) + m(0.3), 1e-15);
}

TEST(CycleCost, DollarsUseReplacementCost) {
  rfd::BatteryParams p;
  EXPECT_DOUBLE_EQ(p.replacement_cost(), 150000.0);
  const auto m = StressModel::linear(1e-3);
  // A single half cycle of depth 1.
  EXPECT_NEAR(deg::degradation_cost_dollars(std::vector<double>{0.0, 1.0}, m, p), 150.0, 1e-9);
}

TEST(CycleCost, ConstantProfileCostsNothing) {
  EXPECT_EQ(deg::cycle_cost(std::vector<double>{0.3, 0.3, 0.3},
                            StressModel::lithium_ion_default()),
            0.0);
}

TEST(ExpectedLifetime, Examples) {
  rfd::BatteryParams p;
  EXPECT_NEAR(deg::expected_lifetime(300000.0, p), 6.0, 1e-12);
  EXPECT_NEAR(deg::expected_lifetime(162900.0, p), 11.05, 0.01);
  EXPECT_NEAR(deg::expected_lifetime(150000.0, p), 12.0, 1e-12);
  EXPECT_THROW(deg::expected_lifetime(0.0, p), rfd::InputError);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rfd/error.hpp"
#include "rfd/market.hpp"

namespace mk = rfd::market;

namespace {

constexpr double kTs = 4.0 / 3600.0;

std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

}  // namespace

TEST(Revenue, CapacityPaymentAnnualizes) {
  const mk::MarketParams market;
  const mk::RegulationSignal signal(zeros(1800));
  const auto rev = mk::revenue_breakdown(zeros(1800), zeros(1800), market, signal, kTs);
  EXPECT_NEAR(rev.capacity_payment, 100.0, 1e-9);
  EXPECT_EQ(rev.mismatch_penalty, 0.0);

  rfd::BatteryParams battery;
  const auto window = mk::evaluate_economics(zeros(1800), zeros(1800), market, signal, battery,
                                             rfd::degradation::StressModel::lithium_ion_default(),
                                             0.0);
  const auto annual = mk::annualize(window, battery);
  EXPECT_NEAR(annual.annualization_factor, 4380.0, 1e-9);
  EXPECT_NEAR(annual.payment, 438000.0, 1e-6);
  EXPECT_FALSE(annual.lifetime_months.has_value());
}

TEST(Revenue, IdleBatteryPaysFullMismatch) {
  const mk::MarketParams market;
  const mk::RegulationSignal signal(std::vector<double>(1800, 0.5));
  const auto rev = mk::revenue_breakdown(zeros(1800), zeros(1800), market, signal, kTs);
  EXPECT_NEAR(rev.mismatch_penalty, 150.0 * kTs * 900.0, 1e-9);
  EXPECT_NEAR(rev.total(), 100.0 - 150.0, 1e-9);
}

TEST(Revenue, PerfectFollowingHasNoPenalty) {
  const mk::MarketParams market;
  const mk::RegulationSignal signal({0.5, -0.25, 0.0, 1.0});
  const std::vector<double> c = {0.0, 0.25, 0.0, 0.0};
  const std::vector<double> d = {0.5, 0.0, 0.0, 1.0};
  EXPECT_NEAR(mk::revenue_breakdown(c, d, market, signal, 1.0).mismatch_penalty, 0.0, 1e-15);
  EXPECT_NEAR(mk::revenue_breakdown(c, d, market, signal, 1.0, mk::PenaltyForm::split_literal)
                  .mismatch_penalty,
              0.0, 1e-15);
}

TEST(Revenue, PenaltyFormsDifferOnWrongDirection) {
  const mk::MarketParams market;
  const mk::RegulationSignal signal({0.5});
  const std::vector<double> c = {0.5}, d = {0.0};
  // Signed: |0.5 - (0 - 0.5)| = 1. Split: |(0 - 0.5) + (0.5 - 0)| = 0.
  EXPECT_NEAR(mk::revenue_breakdown(c, d, market, signal, 1.0).mismatch_penalty, 150.0, 1e-12);
  EXPECT_NEAR(mk::revenue_breakdown(c, d, market, signal, 1.0, mk::PenaltyForm::split_literal)
                  .mismatch_penalty,
              0.0, 1e-12);
}

TEST(Revenue, ConcaveInPower) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> r(-1.0, 1.0);
  const mk::MarketParams market;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> sig(10), c1(10), d1(10), c2(10), d2(10), cm(10), dm(10);
    for (std::size_t t = 0; t < 10; ++t) {
      sig[t] = r(rng);
      c1[t] = u(rng), d1[t] = u(rng), c2[t] = u(rng), d2[t] = u(rng);
    }
    const double l = u(rng);
    for (std::size_t t = 0; t < 10; ++t) {
      cm[t] = l * c1[t] + (1 - l) * c2[t];
      dm[t] = l * d1[t] + (1 - l) * d2[t];
    }
    const mk::RegulationSignal signal(sig);
    for (auto form : {mk::PenaltyForm::signed_mismatch, mk::PenaltyForm::split_literal}) {
      const double mid = mk::revenue(cm, dm, market, signal, kTs, form);
      const double ends = l * mk::revenue(c1, d1, market, signal, kTs, form) +
                          (1 - l) * mk::revenue(c2, d2, market, signal, kTs, form);
      EXPECT_GE(mid, ends - 1e-12);
    }
  }
}

TEST(Revenue, SubgradientMatchesFiniteDifferenceAwayFromKinks) {
  const mk::MarketParams market;
  const mk::RegulationSignal signal({0.7, -0.4, 0.2});
  const std::vector<double> c = {0.1, 0.1, 0.5}, d = {0.3, 0.2, 0.1};
  for (auto form : {mk::PenaltyForm::signed_mismatch, mk::PenaltyForm::split_literal}) {
    std::vector<double> gc(3), gd(3);
    mk::negative_revenue_subgradient(c, d, market, signal, kTs, form, gc, gd);
    for (std::size_t t = 0; t < 3; ++t) {
      auto cp = c, cm = c, dp = d, dm = d;
      cp[t] += 1e-6, cm[t] -= 1e-6, dp[t] += 1e-6, dm[t] -= 1e-6;
      const auto f = [&](const auto& x, const auto& y) {
        return -mk::revenue(x, y, market, signal, kTs, form);
      };
      EXPECT_NEAR(gc[t], (f(cp, d) - f(cm, d)) / 2e-6, 1e-6);
      EXPECT_NEAR(gd[t], (f(c, dp) - f(c, dm)) / 2e-6, 1e-6);
    }
  }
}

TEST(Revenue, RejectsLengthMismatch) {
  const mk::RegulationSignal signal({0.1, 0.2});
  EXPECT_THROW(mk::revenue(zeros(2), zeros(3), mk::MarketParams{}, signal, kTs), rfd::InputError);
}

TEST(Signal, RejectsOutOfRange) {
  EXPECT_THROW(mk::RegulationSignal({0.2, 1.5}), rfd::InputError);
  EXPECT_THROW(mk::RegulationSignal({std::nan("")}), rfd::InputError);
}

TEST(Signal, SplitsIntoParts) {
  const mk::RegulationSignal signal({0.4, -0.3});
  EXPECT_EQ(signal.discharge_part(0), 0.4);
  EXPECT_EQ(signal.charge_part(0), 0.0);
  EXPECT_EQ(signal.charge_part(1), 0.3);
  EXPECT_EQ(signal.discharge_part(1), 0.0);
}

TEST(Signal, GeneratorIsDeterministicClippedAndCentered) {
  const auto a = mk::generate_signal(42, 100000);
  const auto b = mk::generate_signal(42, 100000);
  const auto c = mk::generate_signal(43, 100000);
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  EXPECT_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
  const double mean =
      std::accumulate(a.values().begin(), a.values().end(), 0.0) / static_cast<double>(a.size());
  EXPECT_NEAR(mean, 0.0, 0.05);
  const auto [lo, hi] = std::minmax_element(a.values().begin(), a.values().end());
  EXPECT_GE(*lo, -1.0);
  EXPECT_LE(*hi, 1.0);

  const auto wide = mk::generate_signal(1, 10000, {.correlation = 0.5, .sigma = 3.0});
  EXPECT_TRUE(std::any_of(wide.values().begin(), wide.values().end(),
                          [](double v) { return v == 1.0 || v == -1.0; }));
  EXPECT_THROW(mk::generate_signal(1, 0), rfd::InputError);
  EXPECT_THROW(mk::generate_signal(1, 10, {.correlation = 1.0, .sigma = 0.5}), rfd::InputError);
}

TEST(Follow, TracksUnconstrainedSignal) {
  rfd::BatteryParams battery;
  const mk::RegulationSignal signal({0.5, -0.5, 0.0, 1.0});
  const auto s = mk::policy_follow(signal, battery, 1.0);
  EXPECT_EQ(s.discharge, (std::vector<double>{0.5, 0.0, 0.0, 1.0}));
  EXPECT_EQ(s.charge, (std::vector<double>{0.0, 0.5, 0.0, 0.0}));
}

TEST(Follow, SaturatesAtEmpty) {
  rfd::BatteryParams battery;
  const mk::RegulationSignal signal(std::vector<double>(200, 1.0));
  const auto s = mk::policy_follow(signal, battery, 1.0);
  // 0.5 * E / (P / eta_d) = 0.11875 h = 106.875 intervals of full power.
  for (std::size_t t = 0; t < 106; ++t) EXPECT_DOUBLE_EQ(s.discharge[t], 1.0) << t;
  EXPECT_NEAR(s.discharge[106], 0.875, 1e-9);
  for (std::size_t t = 107; t < 200; ++t) EXPECT_NEAR(s.discharge[t], 0.0, 1e-9) << t;
  const auto soc = rfd::soc_trajectory(s.charge, s.discharge, battery);
  EXPECT_NEAR(soc.back(), 0.0, 1e-12);
  EXPECT_GE(*std::min_element(soc.begin(), soc.end()), -1e-12);
}

TEST(Follow, CapsAtPowerRating) {
  rfd::BatteryParams battery;
  const mk::RegulationSignal signal({-1.0, 1.0});
  const auto s = mk::policy_follow(signal, battery, 2.0);
  EXPECT_DOUBLE_EQ(s.charge[0], 1.0);
  EXPECT_DOUBLE_EQ(s.discharge[1], 1.0);
}

TEST(Economics, UtilityIdentityAndAnnualization) {
  rfd::BatteryParams battery;
  const mk::MarketParams market;
  const auto signal = mk::generate_signal(3, 1800);
  const auto s = mk::policy_follow(signal, battery, 1.0);
  const auto model = rfd::degradation::StressModel::lithium_ion_default();
  const auto w = mk::evaluate_economics(s.charge, s.discharge, market, signal, battery, model, 0.0);
  EXPECT_NEAR(w.utility, w.payment - w.mismatch_penalty - w.actual_degradation, 1e-9);
  EXPECT_NEAR(w.actual_degradation, mk::posterior_assessment(s.charge, s.discharge, battery, model),
              1e-12);
  const auto a = mk::annualize(w, battery);
  EXPECT_NEAR(a.utility, 4380.0 * w.utility, 1e-6 * std::abs(a.utility));
  EXPECT_NEAR(a.actual_degradation, 4380.0 * w.actual_degradation, 1e-6);
  ASSERT_TRUE(a.lifetime_months.has_value());
  EXPECT_NEAR(*a.lifetime_months, 12.0 * 150000.0 / a.actual_degradation, 1e-9);
  EXPECT_NEAR(*w.lifetime_months, *a.lifetime_months, 1e-9);
}

TEST(Economics, PosteriorAssessmentOfOneHalfCycle) {
  rfd::BatteryParams battery;
  battery.soc_initial = 0.5;
  battery.eta_charge = 1.0;
  battery.interval_hours = 0.125;
  // Charge 0.5 of capacity: 1 MW * 0.125 h / 0.25 MWh.
  const double cost = mk::posterior_assessment(std::vector<double>{1.0}, std::vector<double>{0.0},
                                               battery,
                                               rfd::degradation::StressModel::linear(1e-3));
  EXPECT_NEAR(cost, 150000.0 * 1e-3 * 0.5, 1e-9);
}

TEST(Market, PenaltyFormNames) {
  EXPECT_EQ(mk::parse_penalty_form(mk::to_string(mk::PenaltyForm::signed_mismatch)),
            mk::PenaltyForm::signed_mismatch);
  EXPECT_EQ(mk::parse_penalty_form(mk::to_string(mk::PenaltyForm::split_literal)),
            mk::PenaltyForm::split_literal);
  EXPECT_THROW(mk::parse_penalty_form("absolute"), rfd::InputError);
}

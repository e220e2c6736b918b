#include <gtest/gtest.h>

#include <cmath>

#include "episim/rng.hpp"
#include "episim/stats.hpp"

using namespace episim;

TEST(Stats, QuantileType7) {
  const std::vector<double> x{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(quantile_sorted(x, 0.1), 1.3);
  EXPECT_DOUBLE_EQ(quantile_sorted(x, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile_sorted(x, 1.0), 4.0);
  const auto d = deciles({5, 1, 4, 2, 3});
  for (std::size_t i = 1; i < 9; ++i) EXPECT_LE(d[i - 1], d[i]);
}

TEST(Stats, MeanAndStd) {
  const std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(mean(x), 5.0);
  EXPECT_NEAR(stddev(x), std::sqrt(32.0 / 7.0), 1e-15);
}

TEST(Stats, ExponentFitIsExactOnPowerLaws) {
  for (double a : {1.0, 0.5, 1.0 / 3.0}) {
    std::vector<ScalingPoint> pts;
    for (double n : {10.0, 100.0, 1000.0, 10000.0}) pts.push_back({n, 3.0 * std::pow(n, a)});
    const auto f = exponent_fit(pts);
    EXPECT_NEAR(f.slope, a, 1e-12 * a);
    EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
    EXPECT_NEAR(f.ci_high - f.ci_low, 0.0, 1e-10);
  }
}

TEST(Stats, ExponentFitCiCoversNoisySlope) {
  std::vector<ScalingPoint> pts{{10, 10.5}, {100, 98}, {1000, 1030}, {10000, 9900}};
  const auto f = exponent_fit(pts);
  EXPECT_LT(f.ci_low, 1.0);
  EXPECT_GT(f.ci_high, 1.0);
}

TEST(Stats, ExponentFitRejectsBadInput) {
  EXPECT_THROW(exponent_fit(std::vector<ScalingPoint>{{1, 1}, {2, 2}}), InvalidParameter);
  EXPECT_THROW(exponent_fit(std::vector<ScalingPoint>{{1, 1}, {2, 0}, {3, 1}}), InvalidParameter);
  EXPECT_THROW(exponent_fit(std::vector<ScalingPoint>{{2, 1}, {2, 2}, {2, 3}}), InvalidParameter);
}

TEST(Stats, KsSameAndShifted) {
  Rng r(1, 0);
  std::vector<double> a, b, c;
  for (int i = 0; i < 2000; ++i) {
    a.push_back(r.exponential(1.0));
    b.push_back(r.exponential(1.0));
    c.push_back(r.exponential(1.0) + 0.2);
  }
  EXPECT_GT(ks_two_sample(a, b).p_value, 0.01);
  EXPECT_LT(ks_two_sample(a, c).p_value, 1e-6);
  EXPECT_DOUBLE_EQ(ks_two_sample(a, a).statistic, 0.0);
}

TEST(Stats, KolmogorovTail) {
  EXPECT_NEAR(kolmogorov_q(1.36), 0.05, 0.002);
  EXPECT_NEAR(kolmogorov_q(1.63), 0.01, 0.001);
}

TEST(Dominance, IdenticalSamplesAreConsistent) {
  Rng r(2, 0);
  std::vector<double> a;
  for (int i = 0; i < 300; ++i) a.push_back(r.exponential(1.0));
  EXPECT_TRUE(dominance_report(a, a).consistent);
  EXPECT_EQ(dominance_report(a, a).label(), "consistent-with-dominance");
}

TEST(Dominance, ShiftDirection) {
  Rng r(3, 0);
  std::vector<double> a, b;
  for (int i = 0; i < 300; ++i) {
    a.push_back(r.exponential(1.0));
    b.push_back(a.back() + 1.0);
  }
  EXPECT_TRUE(dominance_report(a, b).consistent);
  const auto rev = dominance_report(b, a);
  EXPECT_FALSE(rev.consistent);
  EXPECT_EQ(rev.violating_deciles.size(), 9u);
  EXPECT_EQ(rev.label().rfind("violation-at-deciles[10%,20%", 0), 0u);
}

TEST(Dominance, NeedsHundredPoints) {
  std::vector<double> small(99, 1.0), big(100, 1.0);
  EXPECT_THROW(dominance_report(small, big), InvalidParameter);
}

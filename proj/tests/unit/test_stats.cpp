#include <gtest/gtest.h>

#include <cmath>

#include "coupling_lab/error.hpp"
#include "coupling_lab/random.hpp"
#include "coupling_lab/stats.hpp"

using namespace coupling_lab;

TEST(Stats, SlopeOfExactPowerLaws) {
  const std::vector<double> t{1, 3, 10, 30, 100, 300};
  std::vector<double> v, w;
  for (double s : t) {
    v.push_back(std::pow(s, -2.0));
    w.push_back(7.0 * std::pow(s, -0.5));
  }
  const auto fit = fit_loglog_slope(t, v);
  EXPECT_NEAR(fit.slope, -2.0, 1e-12);
  EXPECT_NEAR(fit.half_width, 0.0, 1e-10);
  EXPECT_NEAR(fit_loglog_slope(t, w).slope, -0.5, 1e-12);
  EXPECT_NEAR(std::exp(fit_loglog_slope(t, w).intercept), 7.0, 1e-10);
}

TEST(Stats, SlopeRejectsBadInput) {
  const std::vector<double> t{1, 2, 3}, v{1, 2, 3};
  EXPECT_THROW(fit_loglog_slope(t, v), ArgumentError);
  const std::vector<double> t4{1, 2, 3, 4}, v4{1, 0, 3, 4};
  EXPECT_THROW(fit_loglog_slope(t4, v4), ArgumentError);
}

TEST(Stats, KsCriticalValues) {
  EXPECT_NEAR(ks_critical_one_sample(10000), 1.6276 / 100.0, 1e-5);
  EXPECT_NEAR(ks_critical_two_sample(10000, 10000), 1.6276 * std::sqrt(2.0 / 10000.0), 1e-5);
}

TEST(Stats, KsDetectsShift) {
  RngStream rng(1, 2, 3);
  std::vector<double> a(20000), b(20000);
  for (auto& v : a) v = rng.uniform();
  for (auto& v : b) v = rng.uniform() + 0.05;
  EXPECT_TRUE(ks_test(a, [](double x) { return std::clamp(x, 0.0, 1.0); }).pass);
  EXPECT_FALSE(ks_test_two_sample(a, b).pass);
}

TEST(Stats, Proportion) {
  const auto p = proportion_estimate(25, 100);
  EXPECT_DOUBLE_EQ(p.mean, 0.25);
  EXPECT_NEAR(p.std_error, std::sqrt(0.25 * 0.75 / 100), 1e-15);
}

TEST(Stats, ChiSquare) {
  std::vector<double> skewed(10000);
  for (std::size_t i = 0; i < skewed.size(); ++i) skewed[i] = std::pow((i + 0.5) / 1e4, 2.0);
  EXPECT_FALSE(chi_square_uniform(skewed, 20).pass);
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "coupling_lab/bounds.hpp"
#include "coupling_lab/coupling.hpp"
#include "coupling_lab/error.hpp"

using namespace coupling_lab;

namespace {

constexpr double kPi = std::numbers::pi;

BoundRequest req(const BernsteinSpec& spec, double t, double h,
                 PrefactorMode mode = PrefactorMode::Corrected) {
  BoundRequest r{.spec = spec};
  r.t = t;
  r.distance = h;
  r.prefactor_mode = mode;
  return r;
}

}  // namespace

TEST(Bounds, IntegralClosedForms) {
  EXPECT_NEAR(bound_integral(BernsteinSpec::linear(1.0), 1.0).value, std::sqrt(kPi),
              1e-8 * std::sqrt(kPi));
  EXPECT_NEAR(bound_integral(BernsteinSpec::stable_pow(1.0), 1.0).value, 2.0, 2e-8);
  EXPECT_NEAR(bound_integral(BernsteinSpec::geometric_stable(1.0), 1.0).value, kPi, 1e-8 * kPi);
}

TEST(Bounds, StableScaling) {
  for (double a : {0.5, 1.0, 1.5}) {
    const auto spec = BernsteinSpec::stable_pow(a);
    const double exact = (2.0 / a) * std::tgamma(1.0 / a);
    for (double t : {1.0, 10.0, 100.0, 1000.0}) {
      const double v = bound_integral(spec, t).value * std::pow(t, 1.0 / a);
      EXPECT_NEAR(v, exact, 1e-8 * exact) << a << " " << t;
    }
  }
}

TEST(Bounds, SubordinateExamples) {
  EXPECT_EQ(tv_bound_subordinate(req(BernsteinSpec::stable_pow(1.0), 1.0, 0.0)), 0.0);
  const auto drift = BernsteinSpec::linear(1.0);
  const double corrected = tv_bound_subordinate(req(drift, 1.0, 1.0));
  const double printed = tv_bound_subordinate(req(drift, 1.0, 1.0, PrefactorMode::AsPrinted));
  EXPECT_NEAR(corrected, 1.0 / std::sqrt(kPi), 1e-9);
  EXPECT_NEAR(printed, 1.0 / std::sqrt(2.0 * kPi), 1e-9);
  const double exact = brownian_tv(1.0, 1.0);
  EXPECT_NEAR(exact, 0.5527, 1e-4);
  EXPECT_GT(corrected, exact);
  EXPECT_LT(printed, exact);
  EXPECT_NEAR(tv_bound_subordinate(req(BernsteinSpec::stable_pow(1.0), 10.0, 1.0)), 0.2 / kPi,
              1e-10);
  EXPECT_EQ(tv_bound_subordinate(req(BernsteinSpec::stable_pow(1.0), 1e-4, 1.0)), 2.0);
}

TEST(Bounds, GeneralLevy) {
  auto r = req(BernsteinSpec::stable_pow(1.0), 100.0, 1.0);
  EXPECT_NEAR(tv_bound_general(r), 2.0 / (kPi * std::cos(1.0) * 100.0), 1e-10);
  r.distance = 0.0;
  EXPECT_EQ(tv_bound_general(r), 0.0);
  for (double t : {1e-3, 0.1, 1.0, 10.0}) {
    r = req(BernsteinSpec::relativistic(1.0, 1.0), t, 3.0);
    EXPECT_LE(tv_bound_general(r), 2.0);
  }
  r = req(BernsteinSpec::stable_pow(1.0), 100.0, 1.0);
  r.c_mode = RateMode::GeneralLevy;
  EXPECT_NEAR(tv_bound_subordinate(r), tv_bound_general(req(BernsteinSpec::stable_pow(1.0), 100.0, 1.0)),
              1e-12);
}

TEST(Bounds, CConstant) {
  EXPECT_NEAR(c_constant(1), std::cos(1.0), 1e-15);
  EXPECT_NEAR(c_constant(2), kPi * std::cos(1.0) / 4.0, 1e-15);
  for (int d = 2; d <= 10; ++d) EXPECT_LT(c_constant(d), c_constant(d - 1));
  EXPECT_THROW(c_constant(0), ArgumentError);
}

TEST(Bounds, AsymptoticRate) {
  EXPECT_NEAR(asymptotic_rate(BernsteinSpec::stable_pow(1.0), 100.0, 1.0).envelope, 0.01, 1e-15);
  const auto rel = BernsteinSpec::relativistic(1.0, 1.0);
  std::vector<double> ratio;
  for (double t : {1e2, 1e4, 1e6})
    ratio.push_back(asymptotic_rate(rel, t, 1.0).envelope * std::sqrt(t));
  EXPECT_LE(std::abs(ratio[2] / ratio[1] - 1.0), 0.05);
  EXPECT_LE(std::abs(ratio[1] / ratio[0] - 1.0), 0.05);
  const double t = 1e4;
  const double closed_form = std::pow(std::exp(std::pow(t, -0.5)) - 1.0, 1.0);
  EXPECT_NEAR(asymptotic_rate(BernsteinSpec::log_stable(0.5), t, 1.0).envelope, closed_form, 1e-10);
  const auto stable = asymptotic_rate(BernsteinSpec::stable_pow(1.0), t, 1.0);
  EXPECT_TRUE(stable.growth_ok && stable.small_r_ok && stable.doubling_ok);
}

TEST(Bounds, Product) {
  const auto s = BernsteinSpec::stable_pow(1.0);
  const std::vector<BernsteinSpec> specs{s, s};
  EXPECT_EQ(bound_product(specs, 100.0, std::vector<double>{0.0, 0.0}, 2), 0.0);
  EXPECT_NEAR(bound_product(specs, 100.0, std::vector<double>{1.0, 1.0}, 2),
              2.0 * 2.0 / (kPi * c_constant(2) * 100.0), 1e-10);
  EXPECT_NEAR(bound_product(specs, 100.0, std::vector<double>{1.0, 0.0}, 2),
              2.0 / (kPi * c_constant(2) * 100.0), 1e-10);
}

TEST(Bounds, LowerBoundIntegral) {
  const auto drift = BernsteinSpec::linear(1.0);
  EXPECT_NEAR(*lower_bound_integral(drift, kPi), 1.0, 1e-15);
  EXPECT_NEAR(bound_integral(drift, kPi).value, 1.0, 1e-9);
  EXPECT_FALSE(lower_bound_integral(BernsteinSpec::stable_pow(1.3), 1.0).has_value());
  const auto rel = BernsteinSpec::relativistic(1.0, 1.0);
  EXPECT_NEAR(*lower_bound_integral(rel, 4.0), std::sqrt(kPi / 2.0), 1e-12);
  EXPECT_GE(bound_integral(rel, 4.0).value, *lower_bound_integral(rel, 4.0));
}

TEST(Bounds, LevyLowerBound) {
  const auto spec = BernsteinSpec::stable_pow(0.8);
  const std::vector<std::vector<double>> pts{{0.1}, {-0.5}, {1.0}, {3.0}};
  const auto exact = check_levy_lower_bound(
      [&](std::span<const double> z) {
        const double r = std::abs(z[0]);
        return eval(spec, 1.0 / (r * r)) / r;
      },
      spec, pts);
  EXPECT_TRUE(exact.pass);
  EXPECT_NEAR(exact.min_residual, 0.0, 1e-12);
  const auto doubled = check_levy_lower_bound(
      [](std::span<const double> z) { return 2.0 * std::pow(std::abs(z[0]), -1.8); }, spec, pts);
  EXPECT_TRUE(doubled.pass);
  for (std::size_t i = 0; i < pts.size(); ++i)
    EXPECT_NEAR(doubled.residuals[i], std::pow(std::abs(pts[i][0]), -1.8), 1e-12);
  const auto truncated = check_levy_lower_bound(
      [](std::span<const double> z) {
        const double r = std::abs(z[0]);
        return r <= 1.0 ? 2.0 * std::pow(r, -1.8) : 0.0;
      },
      spec, pts);
  EXPECT_FALSE(truncated.pass);
  EXPECT_LT(truncated.residuals[3], 0.0);
}

TEST(Bounds, Dichotomy) {
  for (const auto& spec : {BernsteinSpec::relativistic(1.0, 1.0), BernsteinSpec::log_stable(0.5),
                           BernsteinSpec::log_stable(1.0)}) {
    double lo = kInfinity, hi = 0.0;
    for (double t = 10.0; t <= 1e5 * 1.0001; t *= 10.0) {
      const double v = bound_integral(spec, t).value;
      lo = std::min(lo, v * std::sqrt(t));
      hi = std::max(hi, v * std::sqrt(t));
      EXPECT_GE(v, *lower_bound_integral(spec, t) * (1 - 1e-9)) << spec.describe();
    }
    EXPECT_LE(hi / lo, 3.0) << spec.describe();
  }
}

TEST(Bounds, Divergence) {
  const auto flat = BernsteinSpec::custom({.evaluate = [](double l) { return std::log1p(std::log1p(l)); }});
  EXPECT_THROW(bound_integral(flat, 1.0), DivergenceError);
}

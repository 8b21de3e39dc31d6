#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "coupling_lab/error.hpp"
#include "coupling_lab/stats.hpp"
#include "coupling_lab/subordinators.hpp"

using namespace coupling_lab;

namespace {

RngStream stream(std::uint64_t id, std::uint64_t rep = 0) { return RngStream(42, id, rep); }

std::vector<double> draws(const SubordinatorSampler& s, double t, std::size_t n, std::uint64_t id) {
  RngStream rng = stream(id);
  std::vector<double> out(n);
  for (auto& v : out) v = sample_increment(s, t, rng);
  return out;
}

std::vector<SubordinatorSampler> strategies() {
  return {SubordinatorSampler::exact_stable(BernsteinSpec::stable_pow(1.0)),
          SubordinatorSampler::exact_gamma(BernsteinSpec::geometric_stable(1.0)),
          SubordinatorSampler::tempered_stable(BernsteinSpec::relativistic(1.0, 1.0)),
          SubordinatorSampler::for_spec(BernsteinSpec::mixed_stable(0.5, 1.0)),
          SubordinatorSampler::compound_poisson(BernsteinSpec::stable_pow(1.0), 1e-3)};
}

}  // namespace

TEST(Subordinators, DriftOnly) {
  const auto s = SubordinatorSampler::drift_only(BernsteinSpec::linear(1.0));
  RngStream rng = stream(1);
  EXPECT_DOUBLE_EQ(sample_increment(s, 3.0, rng), 3.0);
  const auto s2 = SubordinatorSampler::drift_only(BernsteinSpec::linear(2.0));
  const std::vector<double> grid{1, 2, 3};
  EXPECT_EQ(sample_path(s2, grid, rng), (std::vector<double>{2, 4, 6}));
  const auto fp = first_passage(s, 5.0, 0.01, rng);
  EXPECT_DOUBLE_EQ(fp.time, 5.0);
  EXPECT_LT(fp.pre_level, 5.0);
  EXPECT_GE(fp.post_level, 5.0);
  const auto lap = validate_laplace(s, 1.0, 1.0, 10000, rng);
  EXPECT_DOUBLE_EQ(lap.mc_mean, std::exp(-1.0));
  EXPECT_TRUE(lap.pass);
}

TEST(Subordinators, GammaMean) {
  const auto s = SubordinatorSampler::exact_gamma(BernsteinSpec::geometric_stable(1.0));
  const auto v = draws(s, 2.0, 100000, 2);
  EXPECT_NEAR(mean_estimate(v).mean, 2.0, 3.0 * std::sqrt(2.0 / 1e5));
}

TEST(Subordinators, LaplaceExamples) {
  RngStream rng = stream(3);
  const auto stable = SubordinatorSampler::exact_stable(BernsteinSpec::stable_pow(1.0));
  EXPECT_TRUE(validate_laplace(stable, 1.0, 1.0, 100000, rng).pass);
  const auto gamma = SubordinatorSampler::exact_gamma(BernsteinSpec::geometric_stable(1.0));
  const auto g = validate_laplace(gamma, 1.0, 2.0, 100000, rng);
  EXPECT_DOUBLE_EQ(g.target, 0.25);
  EXPECT_TRUE(g.pass);
  const auto tempered = SubordinatorSampler::tempered_stable(BernsteinSpec::relativistic(1.0, 1.0));
  const auto r = validate_laplace(tempered, 3.0, 1.0, 100000, rng);
  EXPECT_NEAR(r.target, std::exp(-1.0), 1e-15);
  EXPECT_TRUE(r.pass) << r.mc_mean << " +- " << r.std_error;
}

TEST(Subordinators, PathsAreNondecreasing) {
  const std::vector<double> grid{0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
  for (const auto& s : strategies()) {
    RngStream rng = stream(4);
    for (int i = 0; i < 2000; ++i) {
      const auto path = sample_path(s, grid, rng);
      for (std::size_t k = 0; k < path.size(); ++k) {
        ASSERT_GE(path[k], 0.0);
        if (k > 0) ASSERT_GE(path[k], path[k - 1]) << s.describe();
      }
    }
  }
}

TEST(Subordinators, GammaPathIncrementIsExponential) {
  const auto s = SubordinatorSampler::exact_gamma(BernsteinSpec::geometric_stable(1.0));
  RngStream rng = stream(5);
  const std::vector<double> grid{1.0, 2.0};
  std::vector<double> inc(100000);
  for (auto& v : inc) {
    const auto p = sample_path(s, grid, rng);
    v = p[1] - p[0];
  }
  EXPECT_TRUE(ks_test(inc, [](double x) { return -std::expm1(-x); }).pass);
}

TEST(Subordinators, IncrementSplitting) {
  for (const auto& s : strategies()) {
    const auto whole = draws(s, 1.0, 100000, 6);
    RngStream rng = stream(7);
    std::vector<double> split(100000);
    for (auto& v : split) v = sample_increment(s, 0.5, rng) + sample_increment(s, 0.5, rng);
    const auto ks = ks_test_two_sample(whole, split);
    EXPECT_TRUE(ks.pass) << s.describe() << " D=" << ks.statistic;
  }
}

TEST(Subordinators, FirstPassageBracket) {
  for (const auto& s : strategies()) {
    RngStream rng = stream(8);
    for (int i = 0; i < 2000; ++i) {
      const auto fp = first_passage(s, 1.0, 0.01, rng);
      ASSERT_LT(fp.pre_level, 1.0);
      ASSERT_GE(fp.post_level, 1.0);
      ASSERT_LE(fp.step, 0.01 * fp.time * (1 + 1e-12));
    }
  }
}

TEST(Subordinators, FirstPassageCensoring) {
  const auto s = SubordinatorSampler::drift_only(BernsteinSpec::linear(1.0));
  RngStream rng = stream(9);
  const auto fp = first_passage(s, 5.0, 0.01, rng, 2.0);
  EXPECT_TRUE(fp.censored);
  EXPECT_TRUE(std::isinf(fp.time));
}

TEST(Subordinators, StableFirstPassageMean) {
  // S_t has the law of t^2 S_1, so E T_1 = E S_1^{-1/2} = 2 / sqrt(pi).
  const auto s = SubordinatorSampler::exact_stable(BernsteinSpec::stable_pow(1.0));
  const double tol = 1e-3;
  RngStream rng = stream(10);
  std::vector<double> times(10000);
  for (auto& v : times) v = first_passage(s, 1.0, tol, rng).time;
  const auto m = mean_estimate(times);
  const double exact = 2.0 / std::sqrt(std::numbers::pi);
  EXPECT_GE(m.mean, exact - 3.0 * m.std_error);
  EXPECT_LE(m.mean, exact * (1 + tol) + 3.0 * m.std_error);
}

TEST(Subordinators, StrategyConsistency) {
  EXPECT_THROW(SubordinatorSampler::exact_stable(BernsteinSpec::relativistic(1.0, 1.0)),
               ArgumentError);
  EXPECT_THROW(SubordinatorSampler::exact_gamma(BernsteinSpec::geometric_stable(0.5)),
               ArgumentError);
  EXPECT_THROW(SubordinatorSampler::from_name(BernsteinSpec::stable_pow(1.0), "no-such"),
               ArgumentError);
  EXPECT_EQ(SubordinatorSampler::for_spec(BernsteinSpec::log_stable(1.0)).strategy(),
            Strategy::ExactGamma);
  EXPECT_EQ(SubordinatorSampler::for_spec(BernsteinSpec::relativistic(1.0, 1.0)).strategy(),
            Strategy::TemperedStableRejection);
  // No Levy density is available for these, so there is nothing to sample from.
  EXPECT_THROW(SubordinatorSampler::for_spec(BernsteinSpec::log_stable(0.5)), ArgumentError);
  EXPECT_THROW(SubordinatorSampler::for_spec(BernsteinSpec::log_up(1.0, 0.5)), ArgumentError);
}

TEST(Subordinators, CompoundPoissonThinning) {
  const CompoundPoissonLevy levy([](double z) { return z >= 0.99 ? 50.0 : 0.0; }, 1.0, 0.5);
  EXPECT_NEAR(levy.jump_rate(), 1.0, 1e-6);
  RngStream rng = stream(11);
  std::size_t none = 0;
  const std::size_t n = 100000;
  for (std::size_t i = 0; i < n; ++i) none += sample_cp_levy_increment(levy, 1.0, rng) == 0.0;
  const auto p = proportion_estimate(none, n);
  EXPECT_NEAR(p.mean, std::exp(-levy.jump_rate()), 3.0 * p.std_error);
}

TEST(Subordinators, TruncatedStableMoments) {
  const auto levy = truncated_stable_levy(0.5, 1.0, 0.01);
  RngStream rng = stream(12);
  std::vector<double> x(100000), x2(100000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = sample_cp_levy_increment(levy, 1.0, rng);
    x2[i] = x[i] * x[i];
  }
  const auto m = mean_estimate(x);
  EXPECT_NEAR(m.mean, 0.0, 3.0 * m.std_error);
  const auto v = mean_estimate(x2);
  EXPECT_NEAR(v.mean, 4.0 / 3.0, 3.0 * v.std_error);
}

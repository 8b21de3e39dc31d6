#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace coupling_lab {

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

MeanEstimate mean_estimate(std::span<const double> values);

/// Proportion k/n with binomial standard error.
MeanEstimate proportion_estimate(std::size_t hits, std::size_t n);

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;
  bool pass = false;
};

/// Asymptotic Kolmogorov critical values, sqrt(-log(level/2)/2) scaled.
double ks_critical_one_sample(std::size_t n, double level = 0.01);
double ks_critical_two_sample(std::size_t n, std::size_t m, double level = 0.01);

KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf,
                 double level = 0.01);
KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b, double level = 0.01);

struct ChiSquareResult {
  double statistic = 0.0;
  double critical = 0.0;
  bool pass = false;
};

/// Equal-width binning of values in (0,1) against the uniform law.
ChiSquareResult chi_square_uniform(std::span<const double> values, int bins, double level = 0.01);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double half_width = 0.0;  // 95% confidence half-width of the slope
  std::size_t points = 0;
};

/// Least squares on (log t, log v); needs >= 4 points with v > 0.
SlopeFit fit_loglog_slope(std::span<const double> t, std::span<const double> values);

}  // namespace coupling_lab

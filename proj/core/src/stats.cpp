#include "coupling_lab/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "coupling_lab/error.hpp"

namespace coupling_lab {

MeanEstimate mean_estimate(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("mean_estimate: empty input");
  MeanEstimate e;
  e.n = values.size();
  double m2 = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - e.mean;
    e.mean += d / static_cast<double>(i + 1);
    m2 += d * (values[i] - e.mean);
  }
  if (e.n > 1) e.std_error = std::sqrt(m2 / static_cast<double>(e.n - 1) / static_cast<double>(e.n));
  return e;
}

MeanEstimate proportion_estimate(std::size_t hits, std::size_t n) {
  if (n == 0) throw ArgumentError("proportion_estimate: n must be positive");
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n};
}

namespace {
double kolmogorov_c(double level) { return std::sqrt(-0.5 * std::log(level / 2.0)); }
}  // namespace

double ks_critical_one_sample(std::size_t n, double level) {
  return kolmogorov_c(level) / std::sqrt(static_cast<double>(n));
}

double ks_critical_two_sample(std::size_t n, std::size_t m, double level) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return kolmogorov_c(level) * std::sqrt((nn + mm) / (nn * mm));
}

KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf,
                 double level) {
  if (sample.empty()) throw ArgumentError("ks_test: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  KsResult r{d, ks_critical_one_sample(sample.size(), level), false};
  r.pass = r.statistic <= r.critical;
  return r;
}

KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b, double level) {
  if (a.empty() || b.empty()) throw ArgumentError("ks_test_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r{d, ks_critical_two_sample(a.size(), b.size(), level), false};
  r.pass = r.statistic <= r.critical;
  return r;
}

ChiSquareResult chi_square_uniform(std::span<const double> values, int bins, double level) {
  if (values.empty() || bins < 2) throw ArgumentError("chi_square_uniform: bad input");
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (const double v : values) {
    if (!(v > 0.0 && v < 1.0)) throw DomainError("chi_square_uniform: value outside (0,1)");
    ++counts[std::min(static_cast<std::size_t>(v * bins), counts.size() - 1)];
  }
  const double expected = static_cast<double>(values.size()) / bins;
  ChiSquareResult r;
  for (const double c : counts) r.statistic += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(bins - 1);
  r.critical = boost::math::quantile(boost::math::complement(dist, level));
  r.pass = r.statistic <= r.critical;
  return r;
}

SlopeFit fit_loglog_slope(std::span<const double> t, std::span<const double> values) {
  if (t.size() != values.size()) throw ArgumentError("fit_loglog_slope: size mismatch");
  if (t.size() < 4) throw ArgumentError("fit_loglog_slope: need at least 4 points");
  const std::size_t n = t.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(t[i] > 0.0) || !(values[i] > 0.0))
      throw ArgumentError("fit_loglog_slope: times and values must be positive");
    x[i] = std::log(t[i]);
    y[i] = std::log(values[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ArgumentError("fit_loglog_slope: times must not all coincide");
  SlopeFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += r * r;
  }
  const double df = static_cast<double>(n - 2);
  const double se = std::sqrt(rss / df / sxx);
  const boost::math::students_t dist(df);
  fit.half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
  return fit;
}

}  // namespace coupling_lab

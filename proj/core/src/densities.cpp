#include "coupling_lab/densities.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>

#include "coupling_lab/error.hpp"
#include "coupling_lab/format.hpp"
#include "coupling_lab/quadrature.hpp"
#include "coupling_lab/random.hpp"

namespace coupling_lab {

namespace {

constexpr double kDensityTruncation = 1e-8;
constexpr double kIntegralTol = 1e-13;

// FFTW's planner is not reentrant.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place real-to-real transform of kind REDFT00 or RODFT00.
void r2r(std::vector<double>& data, fftw_r2r_kind kind) {
  if (data.size() < 2) return;
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_r2r_1d(static_cast<int>(data.size()), data.data(), data.data(), kind,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

// Upper estimate of int_xi^inf exp(-t f(u^2)) u^{-m} du from the local
// growth of f at xi^2: t f(u^2) >= A + kappa log(u / xi) with kappa a damped
// local log-slope.
double tail_estimate(const BernsteinSpec& spec, double t, double xi, double m) {
  const double lam = xi * xi;
  const double f = eval(spec, lam);
  const double a = t * f;
  const double elasticity = lam * deriv(spec, lam, 1) / f;
  const double kappa = 0.9 * 2.0 * elasticity * a;
  const double e = kappa + m - 1.0;
  if (!(e > 0.0)) return kInfinity;
  return std::exp(-a) * std::pow(xi, 1.0 - m) / e;
}

void probe_integrability(const BernsteinSpec& spec, double t) {
  for (const double xi : {1e3, 1e6}) {
    const double value = eval(spec, xi * xi);
    if (t * value < (1.5) * std::log(xi))
      throw DivergenceError("characteristic function of " + spec.describe() + " at t=" +
                            shortest_repr(t) + " is not integrable: t f(xi^2) = " +
                            shortest_repr(t * value) + " < 1.5 log(xi) at xi=" +
                            shortest_repr(xi));
  }
}

// Scale where t f(xi^2) = 1.
double xi_scale(const BernsteinSpec& spec, double t) { return std::sqrt(inverse(spec, 1.0 / t)); }

// int_0^inf g(xi) dxi for g dominated by the characteristic function times
// xi^{-m}. Panels grow geometrically from the decay scale up to `period`,
// then stay at that length (g may oscillate with that period).
double fourier_integral(const std::function<double(double)>& g, const BernsteinSpec& spec,
                        double t, double m, double period, double abs_tol) {
  const double scale = xi_scale(spec, t);
  double a = 0.0, b = std::min(scale, period);
  double total = 0.0;
  constexpr long kMaxPanels = 50'000'000;
  for (long panel = 0; panel < kMaxPanels; ++panel) {
    total += integrate(g, a, b, {.rel_tol = kIntegralTol, .abs_tol = 0.1 * abs_tol}).value;
    a = b;
    b = a + std::min(a, period);
    if (a > scale && t * eval(spec, a * a) > 40.0 && tail_estimate(spec, t, a, m) <= abs_tol)
      return total;
  }
  throw NonconvergenceError("fourier_integral: tail of the xi-integral did not close");
}

double interval_probability(const BernsteinSpec& spec, double t, double h) {
  // P(0 < Z <= h) = (1/pi) int sin(h xi) / xi phi(xi) dxi.
  if (h == 0.0) return 0.0;
  auto g = [&](double xi) {
    const double phi = characteristic_function(spec, t, xi);
    return xi == 0.0 ? h * phi : std::sin(h * xi) / xi * phi;
  };
  const double period = 2.0 * std::numbers::pi / h;
  return fourier_integral(g, spec, t, 1.0, period, kIntegralTol) / std::numbers::pi;
}

}  // namespace

double characteristic_function(const BernsteinSpec& spec, double t, double xi) {
  if (xi == 0.0) return 1.0;
  return std::exp(-t * eval(spec, xi * xi));
}

double DensityGrid::operator()(double z) const {
  const double u = std::abs(z) / spacing;
  const double last = static_cast<double>(values.size() - 1);
  if (u > last) return 0.0;
  const auto j = static_cast<std::size_t>(u);
  if (j + 1 >= values.size()) return values.back();
  const double w = u - static_cast<double>(j);
  return (1.0 - w) * values[j] + w * values[j + 1];
}

DensityGrid density_1d(const BernsteinSpec& spec, double t, const GridParams& params) {
  if (!(t > 0.0)) throw DomainError("density_1d: t must be positive");
  probe_integrability(spec, t);
  const double scale = xi_scale(spec, t);

  double xi_max = std::sqrt(inverse(spec, 40.0 / t));
  while (tail_estimate(spec, t, xi_max, 0.0) / std::numbers::pi > kDensityTruncation &&
         xi_max < 1e9 * scale)
    xi_max *= 2.0;
  const bool fixed_width = params.half_width > 0.0;
  double dz = params.spacing > 0.0 ? params.spacing : std::numbers::pi / xi_max;
  double half_width = fixed_width ? params.half_width : 20.0 / scale;
  std::size_t n = 16;
  if (fixed_width || params.spacing > 0.0) {
    n = std::max<std::size_t>(n, static_cast<std::size_t>(std::ceil(half_width / dz)));
  } else {
    while (static_cast<double>(n) * dz < half_width) n *= 2;
  }
  n = std::min(n, params.max_points);
  if (fixed_width) dz = half_width / static_cast<double>(n);
  else half_width = dz * static_cast<double>(n);

  DensityGrid grid{.spec = spec, .t = t, .spacing = 0.0, .half_width = 0.0, .values = {}};
  while (true) {
    const double dxi = std::numbers::pi / half_width;
    std::vector<double> data(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
      data[k] = characteristic_function(spec, t, dxi * static_cast<double>(k));
    r2r(data, FFTW_REDFT00);
    for (auto& v : data) v *= dxi / (2.0 * std::numbers::pi);

    const double xi_top = dxi * static_cast<double>(n);
    auto phi = [&](double xi) { return characteristic_function(spec, t, xi); };
    double direct = 0.0;
    {
      double a = 0.0, b = std::min(scale, xi_top);
      while (a < xi_top) {
        direct += integrate(phi, a, b, {.rel_tol = 1e-12}).value;
        a = b;
        b = std::min(2.0 * b, xi_top);
      }
      direct /= std::numbers::pi;
    }
    grid.alias_error = std::abs(data[0] - direct);
    grid.values = std::move(data);
    grid.spacing = dz;
    grid.half_width = half_width;
    grid.truncation_bound = tail_estimate(spec, t, xi_top, 0.0) / std::numbers::pi;
    if (grid.alias_error <= params.alias_tol * direct || fixed_width ||
        2 * n > params.max_points)
      break;
    n *= 2;
    half_width *= 2.0;
  }
  if (grid.truncation_bound > kDensityTruncation)
    warn("density_1d: xi-truncation bound " + shortest_repr(grid.truncation_bound) +
         " exceeds 1e-8 for " + spec.describe() + " at t=" + shortest_repr(t) +
         " (grid budget)");

  auto& v = grid.values;
  double mass = v[0] + v.back();
  for (std::size_t j = 1; j + 1 < v.size(); ++j) mass += 2.0 * v[j];
  grid.mass = mass * dz;
  double clipped = 0.0;
  for (auto& x : v) {
    if (x < 0.0) {
      clipped = std::max(clipped, -x);
      x = 0.0;
    }
  }
  grid.clipped = clipped;
  if (clipped > 0.0) {
    double m = v[0] + v.back();
    for (std::size_t j = 1; j + 1 < v.size(); ++j) m += 2.0 * v[j];
    m *= dz;
    for (auto& x : v) x /= m;
  }
  return grid;
}

TvExact tv_exact_1d(const DensityGrid& grid, double h) {
  h = std::abs(h);
  TvExact out;
  if (h == 0.0) return out;
  const BernsteinSpec& spec = grid.spec;
  const double t = grid.t;
  out.unimodal = 2.0 * 2.0 * interval_probability(spec, t, 0.5 * h);
  out.value = out.unimodal;

  // g(z) = p(z) - p(z - h) = C(z) - S(z), with C even and S odd:
  // C = (1/pi) int phi 2 sin^2(xi h / 2) cos(xi z), S = (1/pi) int phi sin(xi h) sin(xi z).
  const std::size_t n = grid.values.size() - 1;
  const double dxi = std::numbers::pi / grid.half_width;
  std::vector<double> c(n + 1), s(n > 1 ? n - 1 : 0);
  for (std::size_t k = 0; k <= n; ++k) {
    const double xi = dxi * static_cast<double>(k);
    const double phi = characteristic_function(spec, t, xi);
    const double half = std::sin(0.5 * xi * h);
    c[k] = phi * 2.0 * half * half;
    if (k >= 1 && k < n) s[k - 1] = phi * std::sin(xi * h);
  }
  r2r(c, FFTW_REDFT00);
  r2r(s, FFTW_RODFT00);
  const double norm = dxi / (2.0 * std::numbers::pi);
  // z = 0 and z = +-L (one periodic point) carry no odd part.
  double sum = std::abs(c[0]) + std::abs(c[n]);
  for (std::size_t j = 1; j < n; ++j) sum += std::abs(c[j] - s[j - 1]) + std::abs(c[j] + s[j - 1]);
  sum *= norm;
  out.direct = sum * grid.spacing;
  out.discrepancy = std::abs(out.unimodal - out.direct);
  out.value = std::min(2.0, out.value);
  return out;
}

TvExact tv_exact_1d(const BernsteinSpec& spec, double t, double h, const GridParams& params) {
  if (h == 0.0) return {};
  return tv_exact_1d(density_1d(spec, t, params), h);
}

double tv_halfspace_lower(const BernsteinSpec& spec, double t, std::span<const double> x,
                          std::span<const double> y) {
  if (x.size() != y.size() || x.empty())
    throw ArgumentError("tv_halfspace_lower: points must be nonempty and of equal dimension");
  if (!(t > 0.0)) throw DomainError("tv_halfspace_lower: t must be positive");
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] > y[j]) throw ArgumentError("tv_halfspace_lower: requires x <= y coordinatewise");
  const double orthant = std::ldexp(1.0, 1 - static_cast<int>(x.size()));
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    total += orthant * interval_probability(spec, t, y[j] - x[j]);
  return total;
}

// ---------------------------------------------------------------------------
// Empirical total variation.

std::size_t default_min_count() { return 20; }

namespace {

// Histogram L1 distance on fixed bin groups.
double grouped_l1(std::span<const std::uint32_t> ca, std::span<const std::uint32_t> cb,
                  std::span<const std::size_t> group, std::size_t groups, double na, double nb) {
  std::vector<double> diff(groups, 0.0);
  for (std::size_t i = 0; i < ca.size(); ++i)
    diff[group[i]] += ca[i] / na - cb[i] / nb;
  double sum = 0.0;
  for (const double d : diff) sum += std::abs(d);
  return sum;
}

template <class Key>
TvEstimate histogram_tv(const std::vector<Key>& ka, const std::vector<Key>& kb, bool merge,
                        const TvEmpiricalOptions& options) {
  std::vector<Key> keys(ka);
  keys.insert(keys.end(), kb.begin(), kb.end());
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  auto index = [&](const Key& k) {
    return static_cast<std::uint32_t>(std::lower_bound(keys.begin(), keys.end(), k) -
                                      keys.begin());
  };
  std::vector<std::uint32_t> ia(ka.size()), ib(kb.size());
  for (std::size_t i = 0; i < ka.size(); ++i) ia[i] = index(ka[i]);
  for (std::size_t i = 0; i < kb.size(); ++i) ib[i] = index(kb[i]);

  const std::size_t bins = keys.size();
  std::vector<std::uint32_t> ca(bins, 0), cb(bins, 0);
  for (const auto i : ia) ++ca[i];
  for (const auto i : ib) ++cb[i];

  // Groups of consecutive bins holding at least min_count points in total.
  std::vector<std::size_t> group(bins);
  std::size_t groups = 0;
  if (merge) {
    const std::size_t threshold = options.min_count > 0 ? options.min_count : default_min_count();
    std::size_t acc = 0;
    for (std::size_t i = 0; i < bins; ++i) {
      group[i] = groups;
      acc += ca[i] + cb[i];
      if (acc >= threshold) {
        ++groups;
        acc = 0;
      }
    }
    if (acc > 0) {
      if (groups == 0) {
        groups = 1;
      } else {
        for (std::size_t i = bins; i-- > 0 && group[i] == groups;) group[i] = groups - 1;
      }
    }
  } else {
    for (std::size_t i = 0; i < bins; ++i) group[i] = i;
    groups = bins;
  }

  const double na = static_cast<double>(ia.size()), nb = static_cast<double>(ib.size());
  TvEstimate est;
  est.raw = grouped_l1(ca, cb, group, groups, na, nb);
  if (options.resamples < 2) {
    est.value = est.raw;
    return est;
  }
  std::vector<double> boot;
  for (int r = 0; r < options.resamples; ++r) {
    RngStream rng(options.seed, 0x7476ULL, static_cast<std::uint64_t>(r));
    std::fill(ca.begin(), ca.end(), 0u);
    std::fill(cb.begin(), cb.end(), 0u);
    for (std::size_t i = 0; i < ia.size(); ++i) ++ca[ia[rng.next_u64() % ia.size()]];
    for (std::size_t i = 0; i < ib.size(); ++i) ++cb[ib[rng.next_u64() % ib.size()]];
    boot.push_back(grouped_l1(ca, cb, group, groups, na, nb));
  }
  double mean = 0.0;
  for (const double v : boot) mean += v;
  mean /= static_cast<double>(boot.size());
  double var = 0.0;
  for (const double v : boot) var += (v - mean) * (v - mean);
  var /= static_cast<double>(boot.size() - 1);
  est.std_error = std::sqrt(var);
  est.value = std::clamp(2.0 * est.raw - mean, 0.0, 2.0);
  return est;
}

std::int64_t bin_index(double v, double anchor, double width) {
  const double k = std::floor((v - anchor) / width);
  constexpr double kLimit = 4.0e18;
  return static_cast<std::int64_t>(std::clamp(k, -kLimit, kLimit));
}

}  // namespace

TvEstimate tv_empirical(std::span<const double> a, std::span<const double> b, double bin_width,
                        const TvEmpiricalOptions& options) {
  if (a.empty() || b.empty()) throw ArgumentError("tv_empirical: empty sample");
  if (!(bin_width > 0.0)) throw ArgumentError("tv_empirical: bin width must be positive");
  std::vector<std::int64_t> ka(a.size()), kb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ka[i] = bin_index(a[i], options.anchor, bin_width);
  for (std::size_t i = 0; i < b.size(); ++i) kb[i] = bin_index(b[i], options.anchor, bin_width);
  return histogram_tv(ka, kb, true, options);
}

TvEstimate tv_empirical(std::span<const std::vector<double>> a,
                        std::span<const std::vector<double>> b, double bin_width,
                        const TvEmpiricalOptions& options) {
  if (a.empty() || b.empty()) throw ArgumentError("tv_empirical: empty sample");
  if (!(bin_width > 0.0)) throw ArgumentError("tv_empirical: bin width must be positive");
  const std::size_t d = a.front().size();
  auto keys = [&](std::span<const std::vector<double>> pts) {
    std::vector<std::vector<std::int64_t>> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
      if (p.size() != d) throw ArgumentError("tv_empirical: mixed dimensions");
      std::vector<std::int64_t> k(d);
      for (std::size_t j = 0; j < d; ++j) k[j] = bin_index(p[j], options.anchor, bin_width);
      out.push_back(std::move(k));
    }
    return out;
  };
  const auto ka = keys(a), kb = keys(b);
  return histogram_tv(ka, kb, d == 1, options);
}

}  // namespace coupling_lab

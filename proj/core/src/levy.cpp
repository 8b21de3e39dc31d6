#include "coupling_lab/levy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coupling_lab/error.hpp"
#include "coupling_lab/quadrature.hpp"

namespace coupling_lab {

namespace {

constexpr double kMaxDecades = 40.0;

double cell_mass(const std::function<double(double)>& density, double a, double b) {
  // Integrate in log space: the cells are log-uniform.
  auto g = [&](double v) {
    const double s = std::exp(v);
    return density(s) * s;
  };
  const auto r = integrate(g, std::log(a), std::log(b), {.rel_tol = 1e-11});
  return r.value;
}

double local_exponent(double da, double db, double a, double b) {
  if (!(da > 0.0) || !(db > 0.0) || !std::isfinite(da) || !std::isfinite(db)) return 0.0;
  return -std::log(db / da) / std::log(b / a);
}

}  // namespace

TailJumpSampler::TailJumpSampler(std::function<double(double)> density, double eps, double support)
    : density_(std::move(density)), eps_(eps), support_(support) {
  if (!(eps > 0.0)) throw ArgumentError("jump sampler: eps must be positive");
  if (!(support > eps)) throw ArgumentError("jump sampler: support must exceed eps");
  const double ratio = std::pow(10.0, 1.0 / kCellsPerDecade);
  const bool bounded = std::isfinite(support);
  const double upper = bounded ? support : eps * std::pow(10.0, kMaxDecades);
  const int cells = static_cast<int>(std::ceil(kCellsPerDecade * std::log10(upper / eps)));

  edges_.push_back(eps);
  double acc = 0.0;
  double prev_q = std::numeric_limits<double>::quiet_NaN();
  int stable_cells = 0;
  for (int i = 1; i <= cells; ++i) {
    const double a = edges_.back();
    const double b = (i == cells) ? upper : eps * std::pow(ratio, i);
    const double mass = cell_mass(density_, a, b);
    if (!(mass >= 0.0) || !std::isfinite(mass))
      throw ArgumentError("jump sampler: density is not integrable on a cell");
    acc += mass;
    edges_.push_back(b);
    cumulative_.push_back(acc);
    const double q = local_exponent(density_(a), density_(b), a, b);
    exponents_.push_back(q);
    if (bounded) continue;
    // Unbounded support: stop once the remainder is negligible or the density
    // has settled into an exact power law that the Pareto cell reproduces.
    const double db = density_(b);
    const double pareto = q > 1.0 ? db * b / (q - 1.0) : std::numeric_limits<double>::infinity();
    if (db == 0.0 || pareto < 1e-15 * acc) break;
    stable_cells = (std::abs(q - prev_q) <= 1e-9 * std::abs(q)) ? stable_cells + 1 : 0;
    prev_q = q;
    if (stable_cells >= kCellsPerDecade && q > 1.0) break;
  }
  if (!bounded) {
    const double b = edges_.back();
    const double db = density_(b);
    const double q = exponents_.back();
    if (db > 0.0) {
      if (!(q > 1.0)) throw ArgumentError("jump sampler: density tail is not integrable");
      tail_index_ = q - 1.0;
      tail_mass_ = db * b / tail_index_;
    }
  }
  total_ = acc + tail_mass_;
  if (!(total_ > 0.0) || !std::isfinite(total_))
    throw ArgumentError("jump sampler: density has no finite positive mass beyond eps");
}

double TailJumpSampler::sample(RngStream& rng) const {
  const double target = rng.uniform() * total_;
  const double body = cumulative_.back();
  if (target >= body && tail_mass_ > 0.0)
    return edges_.back() * std::pow(rng.uniform(), -1.0 / tail_index_);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  const std::size_t cell =
      std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  const double a = edges_[cell], b = edges_[cell + 1];
  const double q = exponents_[cell];
  const double u = rng.uniform();
  if (q == 0.0 && !(density_(a) > 0.0 && density_(b) > 0.0)) return a + u * (b - a);
  if (std::abs(1.0 - q) < 1e-9) return a * std::pow(b / a, u);
  const double e = 1.0 - q;
  const double lo = std::pow(a, e), hi = std::pow(b, e);
  return std::clamp(std::pow(lo + u * (hi - lo), 1.0 / e), a, b);
}

double integrate_near_zero(const std::function<double(double)>& g, double eps) {
  auto h = [&](double v) {
    const double s = eps * std::exp(-v);
    return g(s) * s;
  };
  // Stop at s = 1e-150 so that power-law densities stay finite; the rest is
  // closed with the local exponential rate of h.
  const double top = std::log(eps) + 150.0 * std::log(10.0);
  const auto r = integrate(h, 0.0, top, {.rel_tol = 1e-11, .max_subdivisions = 20000});
  const double h_top = h(top), h_before = h(top - 1.0);
  double tail = 0.0;
  if (h_top > 0.0) {
    const double rate = std::log(h_before / h_top);
    tail = rate > 0.0 ? h_top / rate : std::numeric_limits<double>::infinity();
  }
  const double value = r.value + tail;
  if (!std::isfinite(value) || !r.converged)
    throw ArgumentError("small-jump moment integral does not converge near 0");
  return value;
}

}  // namespace coupling_lab

#include "coupling_lab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coupling_lab/error.hpp"
#include "coupling_lab/format.hpp"
#include "coupling_lab/quadrature.hpp"

namespace coupling_lab {

namespace {

constexpr int kMaxDoublings = 60;

// Tail of int_U^inf exp(-k(u)) du under the envelope k(u) >= kappa log(u^2),
// kappa read off at U.
double log_envelope_tail(double exponent, double u) {
  const double kappa = exponent / std::log(u * u);
  if (!(kappa > 0.5)) return kInfinity;
  return std::pow(u, 1.0 - 2.0 * kappa) / (2.0 * kappa - 1.0);
}

}  // namespace

std::string prefactor_mode_name(PrefactorMode mode) {
  return mode == PrefactorMode::Corrected ? "corrected" : "as-printed";
}

PrefactorMode parse_prefactor_mode(const std::string& name) {
  if (name == "corrected") return PrefactorMode::Corrected;
  if (name == "as-printed") return PrefactorMode::AsPrinted;
  throw ArgumentError("unknown prefactor mode '" + name + "'");
}

BoundIntegral bound_integral(const BernsteinSpec& spec, double t, double c_rate) {
  if (!(t > 0.0)) throw DomainError("bound_integral: t must be positive");
  if (!(c_rate > 0.0)) throw DomainError("bound_integral: c_rate must be positive");
  const double ct = c_rate * t;
  BoundIntegral out;
  for (const double r : {1e6, 1e12}) {
    if (ct * eval(spec, r) < 1.5 * std::log(r)) out.divergence_warning = true;
  }
  if (out.divergence_warning)
    warn("bound_integral: growth probe suggests a slowly converging or divergent integral for " +
         spec.describe() + " at t=" + shortest_repr(t));

  // r = u^2 turns r^{-1/2} dr into 2 du.
  auto integrand = [&](double u) {
    if (u == 0.0) return 2.0;
    return 2.0 * std::exp(-ct * eval(spec, u * u));
  };
  double u = std::sqrt(inverse(spec, 1.0 / ct));
  auto first = integrate(integrand, 0.0, u, {.rel_tol = 1e-13, .max_subdivisions = 8000});
  double total = first.value;
  double err = first.error;
  for (int k = 0;; ++k) {
    if (k >= kMaxDoublings)
      throw DivergenceError("bound_integral: tail did not close after 60 doublings for " +
                            spec.describe() + " at t=" + shortest_repr(t));
    const auto piece = integrate(integrand, u, 2.0 * u,
                                 {.rel_tol = 1e-13, .abs_tol = 1e-14 * total,
                                  .max_subdivisions = 8000});
    total += piece.value;
    err += piece.error;
    u *= 2.0;
    const double tail = 2.0 * log_envelope_tail(ct * eval(spec, u * u), u);
    if (piece.value <= 1e-10 * total && tail <= 1e-10 * total) {
      err += tail;
      break;
    }
  }
  out.value = total;
  out.error = err;
  out.upper_limit = u * u;
  return out;
}

double prefactor(PrefactorMode mode) {
  return mode == PrefactorMode::Corrected ? 1.0 / std::numbers::pi
                                          : 1.0 / (std::numbers::sqrt2 * std::numbers::pi);
}

double c_constant(int d) {
  if (d < 1) throw ArgumentError("c_constant: dimension must be >= 1");
  const double half = 0.5 * d;
  return std::pow(std::numbers::pi, half) * std::cos(1.0) / (2.0 * d * std::tgamma(half + 1.0));
}

namespace {

void validate(const BoundRequest& req) {
  if (!(req.t > 0.0)) throw DomainError("bound request: t must be positive");
  if (!(req.distance >= 0.0)) throw DomainError("bound request: distance must be >= 0");
  if (req.dimension < 1) throw ArgumentError("bound request: dimension must be >= 1");
  if (req.spec.diagnostic_only())
    warn("bounds assume a Bernstein function without drift; " + req.spec.describe() +
         " is a diagnostic");
}

double first_term(const BernsteinSpec& spec, double t, double dist, double c_rate,
                  PrefactorMode mode) {
  if (dist == 0.0) return 0.0;
  return prefactor(mode) * dist * bound_integral(spec, t, c_rate).value;
}

}  // namespace

double tv_bound_subordinate(const BoundRequest& req) {
  validate(req);
  const double c = req.c_mode == RateMode::GeneralLevy ? c_constant(req.dimension) : 1.0;
  return std::min(2.0, first_term(req.spec, req.t, req.distance, c, req.prefactor_mode));
}

double tv_bound_general(const BoundRequest& req) {
  validate(req);
  const double first = first_term(req.spec, req.t, req.distance, c_constant(req.dimension),
                                  req.prefactor_mode);
  const double envelope = req.envelope_constant * (1.0 + req.distance) / std::sqrt(req.t);
  return std::min({first, envelope, 2.0});
}

RateReport asymptotic_rate(const BernsteinSpec& spec, double t, double dist) {
  if (!(t > 0.0)) throw DomainError("asymptotic_rate: t must be positive");
  RateReport r;
  r.envelope = dist * std::sqrt(inverse(spec, 1.0 / t));
  r.growth_proxy = std::min(eval(spec, 1e6) / std::log(1e6), eval(spec, 1e12) / std::log(1e12));
  const double small6 = eval(spec, 1e-6) * std::abs(std::log(1e-6));
  const double small12 = eval(spec, 1e-12) * std::abs(std::log(1e-12));
  r.small_r_proxy = std::max(small6, small12);
  r.doubling = doubling_diagnostic(spec);
  r.growth_ok = r.growth_proxy > 0.0;
  // Bounded (or shrinking) as r decreases by six decades.
  r.small_r_ok = std::isfinite(r.small_r_proxy) && small12 <= 2.0 * small6;
  r.doubling_ok = std::isfinite(r.doubling.limsup_ratio);
  return r;
}

double bound_product(std::span<const BernsteinSpec> specs, double t,
                     std::span<const double> distances, int d, double envelope_constant,
                     PrefactorMode mode) {
  if (specs.size() != distances.size())
    throw ArgumentError("bound_product: one spec per coordinate distance required");
  if (!(t > 0.0)) throw DomainError("bound_product: t must be positive");
  const double c = c_constant(d);
  double sum = 0.0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const double h = std::abs(distances[i]);
    if (h == 0.0) continue;
    const double envelope = envelope_constant * (1.0 + h) / std::sqrt(t);
    sum += std::min(first_term(specs[i], t, h, c, mode), envelope);
  }
  return std::min(2.0, sum);
}

std::optional<double> lower_bound_integral(const BernsteinSpec& spec, double t,
                                           PrefactorMode mode) {
  if (!(t > 0.0)) throw DomainError("lower_bound_integral: t must be positive");
  const double mean = fprime_at_zero(spec);
  if (!std::isfinite(mean)) return std::nullopt;
  const double k = mode == PrefactorMode::Corrected ? std::numbers::pi : 2.0 * std::numbers::pi;
  return std::sqrt(k / (t * mean));
}

LevyLowerBoundCheck check_levy_lower_bound(
    const std::function<double(std::span<const double>)>& levy_density, const BernsteinSpec& spec,
    std::span<const std::vector<double>> points) {
  LevyLowerBoundCheck out;
  out.min_residual = kInfinity;
  for (const auto& z : points) {
    double norm2 = 0.0;
    for (const double v : z) norm2 += v * v;
    if (z.empty() || norm2 == 0.0)
      throw ArgumentError("check_levy_lower_bound: points must exclude the origin");
    const double norm = std::sqrt(norm2);
    const double bound = std::pow(norm, -static_cast<double>(z.size())) * eval(spec, 1.0 / norm2);
    const double residual = levy_density(z) - bound;
    out.residuals.push_back(residual);
    out.min_residual = std::min(out.min_residual, residual);
  }
  out.pass = out.min_residual >= -1e-12;
  return out;
}

}  // namespace coupling_lab

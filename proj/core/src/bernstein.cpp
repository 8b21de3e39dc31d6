#include "coupling_lab/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coupling_lab/error.hpp"
#include "coupling_lab/format.hpp"
#include "coupling_lab/jet.hpp"

namespace coupling_lab {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ArgumentError(what);
}

bool in_open(double v, double lo, double hi) { return v > lo && v < hi; }

// Closed forms, written once for double and for Taylor jets.
template <class T>
T closed_form(const BernsteinSpec& spec, const T& lam) {
  using std::expm1;
  using std::log1p;
  using std::pow;
  const double a = spec.alpha();
  const double b = spec.beta();
  switch (spec.family()) {
    case Family::StablePow:
      return pow(lam, a / 2.0);
    case Family::MixedStable:
      return pow(lam, a / 2.0) + pow(lam, b / 2.0);
    case Family::LogUp:
      return pow(lam, a / 2.0) * pow(log1p(lam), b / 2.0);
    case Family::LogDown:
      return pow(lam, a / 2.0) * pow(log1p(lam), -b / 2.0);
    case Family::Relativistic: {
      const double theta = std::pow(spec.mass(), 2.0 / a);
      return spec.mass() * expm1((a / 2.0) * log1p(lam / theta));
    }
    case Family::LogStable:
      return pow(log1p(pow(lam, a)), 1.0 / a);
    case Family::GeometricStable:
      return log1p(pow(lam, a));
    case Family::Linear:
      return lam * spec.drift();
    case Family::Custom:
      break;
  }
  throw ArgumentError("closed form requested for a custom Bernstein function");
}

double custom_eval(const BernsteinSpec& spec, double lambda) {
  return spec.custom_functions()->evaluate(lambda);
}

struct FdResult {
  double value;
  double error;
};

double central_difference(const BernsteinSpec& spec, double x, double h, int k) {
  auto f = [&](double v) { return custom_eval(spec, v); };
  switch (k) {
    case 1:
      return (f(x + h) - f(x - h)) / (2.0 * h);
    case 2:
      return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    case 3:
      return (f(x + 2 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2 * h)) / (2.0 * h * h * h);
    default:
      return (f(x + 2 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2 * h)) /
             (h * h * h * h);
  }
}

// Step grows with the order so that roundoff stays below the 1e-9 budget.
FdResult custom_derivative(const BernsteinSpec& spec, double lambda, int k) {
  static constexpr double kRelStep[] = {1e-5, 1e-3, 5e-3, 1e-2};
  const double h = lambda * kRelStep[k - 1];
  const double coarse = central_difference(spec, lambda, h, k);
  const double fine = central_difference(spec, lambda, h / 2.0, k);
  return {(4.0 * fine - coarse) / 3.0, std::abs(fine - coarse) / 3.0};
}

double numeric_inverse(const BernsteinSpec& spec, double s) {
  // Work in u = log(lambda); f(e^u) is increasing.
  auto g = [&](double u) { return eval(spec, std::exp(u)) - s; };
  const double g0 = g(0.0);
  if (g0 == 0.0) return 1.0;
  // Geometric expansion from lambda = 1; the log-step doubles each time so the
  // whole double range is reachable well within the budget.
  constexpr int kMaxExpansions = 200;
  constexpr double kMaxLog = 709.0;
  const double dir = g0 < 0.0 ? 1.0 : -1.0;
  double prev = 0.0, step = std::numbers::ln2;
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  for (int i = 0; i < kMaxExpansions && !bracketed; ++i) {
    const double u = dir * std::min(step, kMaxLog);
    if (dir * g(u) >= 0.0) {
      lo = std::min(prev, u);
      hi = std::max(prev, u);
      bracketed = true;
    } else if (step >= kMaxLog) {
      break;
    }
    prev = u;
    step *= 2.0;
  }
  if (!bracketed)
    throw NonconvergenceError("inverse: could not bracket s=" + shortest_repr(s) + " for " +
                              spec.describe() + " (is f onto (0, inf)?)");

  double u = 0.5 * (lo + hi);
  for (int iter = 0; iter < 300; ++iter) {
    const double lam = std::exp(u);
    const double gu = eval(spec, lam) - s;
    if (gu == 0.0) return lam;
    (gu < 0.0 ? lo : hi) = u;
    const double slope = lam * deriv(spec, lam, 1);
    double next = u - gu / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double du = std::abs(next - u);
    u = next;
    if (du <= 1e-15 * std::max(1.0, std::abs(u)) || hi - lo <= 1e-15 * std::max(1.0, std::abs(u)))
      break;
  }
  const double lam = std::exp(u);
  if (std::abs(eval(spec, lam) - s) > 1e-12 * std::max(1.0, s))
    throw NonconvergenceError("inverse: Newton/bisection did not reach tolerance for " +
                              spec.describe());
  return lam;
}

}  // namespace

BernsteinSpec BernsteinSpec::stable_pow(double alpha) {
  require(in_open(alpha, 0.0, 2.0), "StablePow: alpha must lie in (0,2)");
  return {Family::StablePow, alpha, 0.0, 0.0, 0.0};
}

BernsteinSpec BernsteinSpec::mixed_stable(double alpha, double beta) {
  require(in_open(alpha, 0.0, 2.0) && in_open(beta, 0.0, 2.0) && alpha < beta,
          "MixedStable: need 0 < alpha < beta < 2");
  return {Family::MixedStable, alpha, beta, 0.0, 0.0};
}

BernsteinSpec BernsteinSpec::log_up(double alpha, double beta) {
  require(in_open(alpha, 0.0, 2.0), "LogUp: alpha must lie in (0,2)");
  require(in_open(beta, 0.0, 2.0 - alpha), "LogUp: beta must lie in (0, 2-alpha)");
  return {Family::LogUp, alpha, beta, 0.0, 0.0};
}

BernsteinSpec BernsteinSpec::log_down(double alpha, double beta) {
  require(in_open(alpha, 0.0, 2.0), "LogDown: alpha must lie in (0,2)");
  require(in_open(beta, 0.0, alpha), "LogDown: beta must lie in (0, alpha)");
  return {Family::LogDown, alpha, beta, 0.0, 0.0};
}

BernsteinSpec BernsteinSpec::relativistic(double alpha, double m) {
  require(in_open(alpha, 0.0, 2.0), "Relativistic: alpha must lie in (0,2)");
  require(m > 0.0 && std::isfinite(m), "Relativistic: m must be positive");
  return {Family::Relativistic, alpha, 0.0, m, 0.0};
}

BernsteinSpec BernsteinSpec::log_stable(double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "LogStable: alpha must lie in (0,1]");
  return {Family::LogStable, alpha, 0.0, 0.0, 0.0};
}

BernsteinSpec BernsteinSpec::geometric_stable(double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "GeometricStable: alpha must lie in (0,1]");
  return {Family::GeometricStable, alpha, 0.0, 0.0, 0.0};
}

BernsteinSpec BernsteinSpec::linear(double b) {
  require(b > 0.0 && std::isfinite(b), "Linear: b must be positive");
  return {Family::Linear, 0.0, 0.0, 0.0, b};
}

BernsteinSpec BernsteinSpec::custom(CustomFunctions functions) {
  require(static_cast<bool>(functions.evaluate), "Custom: evaluator is required");
  BernsteinSpec spec{Family::Custom, 0.0, 0.0, 0.0, 0.0};
  spec.custom_ = std::make_shared<const CustomFunctions>(std::move(functions));
  return spec;
}

bool BernsteinSpec::has_levy_density() const {
  switch (family_) {
    case Family::StablePow:
    case Family::MixedStable:
    case Family::Relativistic:
      return true;
    case Family::LogStable:
    case Family::GeometricStable:
      return alpha_ == 1.0;
    case Family::Custom:
      return static_cast<bool>(custom_->levy_density);
    default:
      return false;
  }
}

double BernsteinSpec::levy_density(double s) const {
  if (!(s > 0.0)) throw DomainError("levy_density: s must be positive");
  auto stable = [s](double rho) { return rho / std::tgamma(1.0 - rho) * std::pow(s, -1.0 - rho); };
  switch (family_) {
    case Family::StablePow:
      return stable(alpha_ / 2.0);
    case Family::MixedStable:
      return stable(alpha_ / 2.0) + stable(beta_ / 2.0);
    case Family::Relativistic:
      return stable(alpha_ / 2.0) * std::exp(-std::pow(mass_, 2.0 / alpha_) * s);
    case Family::LogStable:
    case Family::GeometricStable:
      if (alpha_ == 1.0) return std::exp(-s) / s;
      break;
    case Family::Custom:
      if (custom_->levy_density) return custom_->levy_density(s);
      break;
    default:
      break;
  }
  throw ArgumentError("levy_density: " + describe() + " carries no Levy density");
}

bool BernsteinSpec::has_analytic_inverse() const {
  switch (family_) {
    case Family::StablePow:
    case Family::Relativistic:
    case Family::LogStable:
    case Family::GeometricStable:
    case Family::Linear:
      return true;
    case Family::Custom:
      return static_cast<bool>(custom_->inverse);
    default:
      return false;
  }
}

std::string family_name(Family family) {
  switch (family) {
    case Family::StablePow: return "stable-pow";
    case Family::MixedStable: return "mixed-stable";
    case Family::LogUp: return "log-up";
    case Family::LogDown: return "log-down";
    case Family::Relativistic: return "relativistic";
    case Family::LogStable: return "log-stable";
    case Family::GeometricStable: return "geometric-stable";
    case Family::Linear: return "linear";
    case Family::Custom: return "custom";
  }
  return "unknown";
}

std::string BernsteinSpec::describe() const {
  const std::string a = shortest_repr(alpha_);
  switch (family_) {
    case Family::StablePow:
    case Family::LogStable:
    case Family::GeometricStable:
      return family_name(family_) + "(alpha=" + a + ")";
    case Family::MixedStable:
    case Family::LogUp:
    case Family::LogDown:
      return family_name(family_) + "(alpha=" + a + ",beta=" + shortest_repr(beta_) + ")";
    case Family::Relativistic:
      return family_name(family_) + "(alpha=" + a + ",m=" + shortest_repr(mass_) + ")";
    case Family::Linear:
      return "linear(b=" + shortest_repr(drift_) + ")";
    case Family::Custom:
      return "custom(" + custom_->label + ")";
  }
  return "unknown";
}

double eval(const BernsteinSpec& spec, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("eval: lambda must be positive");
  if (spec.family() == Family::Custom) return custom_eval(spec, lambda);
  return closed_form(spec, lambda);
}

double deriv(const BernsteinSpec& spec, double lambda, int order) {
  if (order < 1 || order > 4) throw ArgumentError("deriv: order must lie in 1..4");
  if (!(lambda > 0.0)) throw DomainError("deriv: lambda must be positive");
  if (spec.family() == Family::Custom) return custom_derivative(spec, lambda, order).value;
  return closed_form(spec, Jet<4>::variable(lambda)).derivative(static_cast<std::size_t>(order));
}

double inverse(const BernsteinSpec& spec, double s) {
  if (!(s > 0.0)) throw DomainError("inverse: s must be positive");
  const double a = spec.alpha();
  switch (spec.family()) {
    case Family::StablePow:
      return std::pow(s, 2.0 / a);
    case Family::Relativistic: {
      const double theta = std::pow(spec.mass(), 2.0 / a);
      return theta * std::expm1(std::log1p(s / spec.mass()) * 2.0 / a);
    }
    case Family::LogStable:
      return std::pow(std::expm1(std::pow(s, a)), 1.0 / a);
    case Family::GeometricStable:
      return std::pow(std::expm1(s), 1.0 / a);
    case Family::Linear:
      return s / spec.drift();
    case Family::Custom:
      if (spec.custom_functions()->inverse) return spec.custom_functions()->inverse(s);
      break;
    default:
      break;
  }
  return numeric_inverse(spec, s);
}

double fprime_at_zero(const BernsteinSpec& spec) {
  const double a = spec.alpha();
  switch (spec.family()) {
    case Family::StablePow:
    case Family::MixedStable:
    case Family::LogUp:
    case Family::LogDown:
      return kInfinity;
    case Family::Relativistic:
      return (a / 2.0) * std::pow(spec.mass(), 1.0 - 2.0 / a);
    case Family::LogStable:
      return 1.0;
    case Family::GeometricStable:
      return a == 1.0 ? 1.0 : kInfinity;
    case Family::Linear:
      return spec.drift();
    case Family::Custom:
      break;
  }
  const double d1 = deriv(spec, 1e-2, 1);
  const double d2 = deriv(spec, 1e-4, 1);
  const double d3 = deriv(spec, 1e-6, 1);
  if (d2 > 5.0 * d1 && d3 > 5.0 * d2) return kInfinity;
  // Linear extrapolation of f' to lambda = 0 from the two smallest probes.
  return d3 - (d2 - d3) * (1e-6 / (1e-4 - 1e-6));
}

MonotonicityReport check_complete_monotone(const BernsteinSpec& spec,
                                           std::span<const double> lambda_grid, int order) {
  if (lambda_grid.empty()) throw ArgumentError("check_complete_monotone: empty grid");
  if (order < 0 || order > 4) throw ArgumentError("check_complete_monotone: order must be <= 4");
  constexpr double kTol = 1e-9;
  const bool custom = spec.family() == Family::Custom;
  MonotonicityReport report;
  for (const double lam : lambda_grid) {
    for (int k = 0; k <= order; ++k) {
      double value = 0.0, allowance = kTol;
      if (k == 0) {
        value = eval(spec, lam);
      } else if (custom) {
        const auto fd = custom_derivative(spec, lam, k);
        value = fd.value;
        allowance += fd.error;
      } else {
        value = deriv(spec, lam, k);
      }
      const double signed_value = (k % 2 == 1 || k == 0) ? value : -value;
      const double violation = -signed_value;
      if (violation > report.worst_violation) {
        report.worst_violation = violation;
        report.worst_lambda = lam;
        report.worst_order = k;
      }
      if (violation > allowance) report.pass = false;
    }
  }
  return report;
}

std::vector<double> default_doubling_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 40; ++k) grid.push_back(std::ldexp(1.0, -k));
  return grid;
}

DoublingReport doubling_diagnostic(const BernsteinSpec& spec, std::span<const double> s_grid) {
  if (s_grid.empty()) throw ArgumentError("doubling_diagnostic: empty grid");
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    if (!(s_grid[i] > 0.0) || (i > 0 && !(s_grid[i] < s_grid[i - 1])))
      throw ArgumentError("doubling_diagnostic: grid must be positive and strictly decreasing");
  }
  DoublingReport report;
  report.s_grid.assign(s_grid.begin(), s_grid.end());
  for (const double s : s_grid) report.ratios.push_back(inverse(spec, 2.0 * s) / inverse(spec, s));

  const std::size_t tail = s_grid.size() / 2;
  report.limsup_ratio = *std::max_element(report.ratios.begin() + static_cast<long>(tail),
                                          report.ratios.end());
  double c = 0.0;
  for (std::size_t i = tail; i < s_grid.size(); ++i) {
    const double s = s_grid[i];
    c = std::max(c, inverse(spec, 2.0 * eval(spec, s)) / s);
  }
  report.remark_constant = c;
  report.remark_condition = std::isfinite(c);
  return report;
}

}  // namespace coupling_lab

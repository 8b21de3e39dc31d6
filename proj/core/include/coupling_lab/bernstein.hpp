#pragma once

// Bernstein functions f(lambda) = a + b*lambda + int (1 - e^{-lambda s}) mu(ds):
// the catalog families used throughout the lab plus user-supplied ones.

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace coupling_lab {

enum class Family {
  StablePow,        // lambda^{alpha/2}
  MixedStable,      // lambda^{alpha/2} + lambda^{beta/2}
  LogUp,            // lambda^{alpha/2} log(1+lambda)^{beta/2}
  LogDown,          // lambda^{alpha/2} log(1+lambda)^{-beta/2}
  Relativistic,     // (lambda + m^{2/alpha})^{alpha/2} - m
  LogStable,        // log(1+lambda^alpha)^{1/alpha}
  GeometricStable,  // log(1+lambda^alpha)
  Linear,           // b*lambda, pure drift
  Custom,
};

struct CustomFunctions {
  std::function<double(double)> evaluate;      // required
  std::function<double(double)> levy_density;  // optional density of mu on (0, inf)
  std::function<double(double)> inverse;       // optional analytic inverse
  std::string label = "custom";
};

class BernsteinSpec {
 public:
  static BernsteinSpec stable_pow(double alpha);
  static BernsteinSpec mixed_stable(double alpha, double beta);
  static BernsteinSpec log_up(double alpha, double beta);
  static BernsteinSpec log_down(double alpha, double beta);
  static BernsteinSpec relativistic(double alpha, double m);
  static BernsteinSpec log_stable(double alpha);
  static BernsteinSpec geometric_stable(double alpha);
  static BernsteinSpec linear(double b);
  static BernsteinSpec custom(CustomFunctions functions);

  Family family() const noexcept { return family_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double mass() const noexcept { return mass_; }
  double drift() const noexcept { return family_ == Family::Linear ? drift_ : 0.0; }

  /// Linear has a drift term, which the Levy-measure comparison bounds exclude.
  bool diagnostic_only() const noexcept { return family_ == Family::Linear; }

  bool has_levy_density() const;
  /// Density of the Levy measure mu at s > 0.
  double levy_density(double s) const;
  bool has_analytic_inverse() const;

  const CustomFunctions* custom_functions() const noexcept { return custom_.get(); }

  /// e.g. "relativistic(alpha=1,m=1)".
  std::string describe() const;

 private:
  BernsteinSpec(Family family, double alpha, double beta, double mass, double drift)
      : family_(family), alpha_(alpha), beta_(beta), mass_(mass), drift_(drift) {}

  Family family_;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  double mass_ = 0.0;
  double drift_ = 0.0;
  std::shared_ptr<const CustomFunctions> custom_;
};

std::string family_name(Family family);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

double eval(const BernsteinSpec& spec, double lambda);

/// k-th derivative, k in 1..4. Catalog families are differentiated exactly
/// (Taylor arithmetic); custom ones by Richardson-extrapolated central differences.
double deriv(const BernsteinSpec& spec, double lambda, int order);

/// Inverse on (0, inf); analytic where the family has one, otherwise
/// bracketing plus safeguarded Newton/bisection.
double inverse(const BernsteinSpec& spec, double s);

/// lim_{lambda -> 0+} f'(lambda) = E[S_1]; +infinity when divergent.
double fprime_at_zero(const BernsteinSpec& spec);

struct MonotonicityReport {
  bool pass = true;
  double worst_violation = 0.0;  // largest amount by which a sign condition fails
  double worst_lambda = 0.0;
  int worst_order = -1;          // 0 means f itself
};

MonotonicityReport check_complete_monotone(const BernsteinSpec& spec,
                                           std::span<const double> lambda_grid, int order);

struct DoublingReport {
  std::vector<double> s_grid;
  std::vector<double> ratios;          // f^{-1}(2s) / f^{-1}(s)
  double limsup_ratio = 0.0;           // max over the tail half of the grid
  double remark_constant = kInfinity;  // smallest c with 2 f(s) <= f(c s) on the tail half
  bool remark_condition = false;
};

/// s = 2^{-k}, k = 1..40.
std::vector<double> default_doubling_grid();

DoublingReport doubling_diagnostic(const BernsteinSpec& spec, std::span<const double> s_grid);
inline DoublingReport doubling_diagnostic(const BernsteinSpec& spec) {
  const auto grid = default_doubling_grid();
  return doubling_diagnostic(spec, grid);
}

}  // namespace coupling_lab

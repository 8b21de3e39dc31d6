#pragma once

// Evaluators for the total-variation bounds of reflection-subordinate
// couplings and their supporting integrals.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coupling_lab/bernstein.hpp"

namespace coupling_lab {

/// Corrected: 1/pi, from 2 P(T^B > s) <= |x-y| / sqrt(pi s) and
/// E[S^{-1/2}] = pi^{-1/2} int r^{-1/2} e^{-t f(r)} dr.
/// AsPrinted: 1/(sqrt(2) pi), kept for literal comparison; it is violated by
/// the exact Brownian total variation.
enum class PrefactorMode { Corrected, AsPrinted };

/// UnitRate: e^{-t f(r)}. GeneralLevy: e^{-c(d) t f(r)}.
enum class RateMode { UnitRate, GeneralLevy };

std::string prefactor_mode_name(PrefactorMode mode);
PrefactorMode parse_prefactor_mode(const std::string& name);

struct BoundRequest {
  BernsteinSpec spec;
  double t = 1.0;
  double distance = 0.0;
  int dimension = 1;
  PrefactorMode prefactor_mode = PrefactorMode::Corrected;
  RateMode c_mode = RateMode::UnitRate;
  double envelope_constant = 1.0;  // C in C (1 + |x-y|) / sqrt(t); not determined analytically
};

struct BoundIntegral {
  double value = 0.0;
  double error = 0.0;
  double upper_limit = 0.0;         // last r = U^2 integrated to
  bool divergence_warning = false;  // growth probe failed at r = 1e6 or 1e12
};

/// int_0^inf r^{-1/2} exp(-c_rate t f(r)) dr. Throws DivergenceError when the
/// tail cannot be closed within 60 interval doublings.
BoundIntegral bound_integral(const BernsteinSpec& spec, double t, double c_rate = 1.0);

double prefactor(PrefactorMode mode);

/// pi^{d/2} cos(1) / (2 d Gamma(d/2 + 1)).
double c_constant(int d);

/// prefactor * distance * bound_integral, capped at 2. The exponent carries
/// c(d) when req.c_mode is GeneralLevy.
double tv_bound_subordinate(const BoundRequest& req);

/// min(first term with c = c(d), C (1 + |x-y|) / sqrt(t), 2).
double tv_bound_general(const BoundRequest& req);

struct RateReport {
  double envelope = 0.0;         // distance * sqrt(f^{-1}(1/t)), constant C = 1
  double growth_proxy = 0.0;     // min over r in {1e6, 1e12} of f(r) / log r
  double small_r_proxy = 0.0;    // max over r in {1e-6, 1e-12} of f(r) |log r|
  DoublingReport doubling;
  bool growth_ok = false;        // liminf f(r)/log r > 0 plausible
  bool small_r_ok = false;       // liminf_{r->0} f(r) |log r| < inf plausible
  bool doubling_ok = false;      // limsup f^{-1}(2s)/f^{-1}(s) finite
};

RateReport asymptotic_rate(const BernsteinSpec& spec, double t, double distance);

/// 2 min sum_i [ per-coordinate first term with c = c(d)  min  C (1 + |x_i - y_i|) / sqrt(t) ].
double bound_product(std::span<const BernsteinSpec> specs, double t,
                     std::span<const double> distances, int d, double envelope_constant = 1.0,
                     PrefactorMode mode = PrefactorMode::Corrected);

/// Jensen lower bound for bound_integral when f'(0+) = E S_1 is finite:
/// sqrt(pi / (t f'(0+))) (Corrected) or sqrt(2 pi / (t f'(0+))) (AsPrinted).
/// Empty when f'(0+) is infinite.
std::optional<double> lower_bound_integral(const BernsteinSpec& spec, double t,
                                           PrefactorMode mode = PrefactorMode::Corrected);

struct LevyLowerBoundCheck {
  double min_residual = 0.0;
  std::vector<double> residuals;
  bool pass = false;
};

/// nu(z) - |z|^{-d} f(|z|^{-2}) at each point; pass iff all >= -1e-12.
LevyLowerBoundCheck check_levy_lower_bound(
    const std::function<double(std::span<const double>)>& levy_density, const BernsteinSpec& spec,
    std::span<const std::vector<double>> points);

}  // namespace coupling_lab

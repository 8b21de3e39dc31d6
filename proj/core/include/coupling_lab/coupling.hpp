#pragma once

// Reflection coupling of Brownian motions (variance 2t per coordinate) and
// its time change by a common subordinator.

#include <optional>
#include <span>
#include <vector>

#include "coupling_lab/random.hpp"
#include "coupling_lab/subordinators.hpp"

namespace coupling_lab {

using Point = std::vector<double>;

double distance(std::span<const double> x, std::span<const double> y);

/// Mirror image of z across the hyperplane bisecting x and y.
Point reflect(std::span<const double> x, std::span<const double> y, std::span<const double> z);

/// Brownian coupling time |x-y|^2 / (8 Z^2); 0 when x == y.
double sample_tb(std::span<const double> x, std::span<const double> y, RngStream& rng);
double sample_tb(double distance, RngStream& rng);

struct SurvivalTb {
  double probability = 0.0;  // P(T^B > t) = erf(|x-y| / (4 sqrt t))
  double envelope = 0.0;     // |x-y| / (2 sqrt(pi t))
};

SurvivalTb survival_tb(double distance, double t);
SurvivalTb survival_tb(std::span<const double> x, std::span<const double> y, double t);

/// Exact total variation between N(x, 2t I) and N(y, 2t I).
double brownian_tv(double distance, double t);

struct CouplingDraw {
  double tb = 0.0;
  FirstPassageResult tx;
  Point x, y;
  std::vector<double> per_coordinate;  // product couplings only

  /// Coupling time of the subordinate pair (max over coordinates for products).
  double time() const { return tx.time; }
};

/// T^B, then T^X as the first passage of an independent subordinator over T^B.
CouplingDraw sample_tx(const SubordinatorSampler& sampler, std::span<const double> x,
                       std::span<const double> y, double tol, RngStream& rng,
                       double horizon = kInfinity);

struct CoupledPair {
  Point first;   // X_t started at x
  Point second;  // hat X_t started at y
  double subordinator_value = 0.0;  // S_t
  double tb = 0.0;
  bool coupled = false;             // S_t >= T^B
};

/// One draw of the coupled pair at time t. S_t and T^B are drawn first; the
/// component of B_{S_t} normal to the mirror hyperplane is then drawn from its
/// exact conditional law given T^B (a Bessel(3) bridge before coupling, a free
/// Gaussian after it), so both marginals are exact.
CoupledPair simulate_coupled_marginals(const SubordinatorSampler& sampler,
                                       std::span<const double> x, std::span<const double> y,
                                       double t, RngStream& rng);

/// Independent one-dimensional couplings per coordinate; overall time is the max.
CouplingDraw sample_tx_product(std::span<const SubordinatorSampler> samplers,
                               std::span<const double> x, std::span<const double> y, double tol,
                               RngStream& rng, double horizon = kInfinity);

}  // namespace coupling_lab

#pragma once

// Tabulated sampler for the normalized restriction of a one-dimensional jump
// density to [eps, support]. Cell masses come from adaptive quadrature on a
// log grid; within a cell a local power law is inverted. An unbounded
// support gets an analytic Pareto cell beyond the last grid point.

#include <functional>
#include <vector>

#include "coupling_lab/random.hpp"

namespace coupling_lab {

class TailJumpSampler {
 public:
  static constexpr int kCellsPerDecade = 64;

  TailJumpSampler(std::function<double(double)> density, double eps, double support);

  /// Total mass of the density on [eps, support].
  double rate() const { return total_; }
  double eps() const { return eps_; }
  double support() const { return support_; }

  /// One jump size from the normalized restriction.
  double sample(RngStream& rng) const;

 private:
  std::function<double(double)> density_;
  double eps_, support_;
  std::vector<double> edges_;       // cell boundaries, eps = edges_[0]
  std::vector<double> cumulative_;  // cumulative mass at the end of each cell
  std::vector<double> exponents_;   // local power q with density ~ s^{-q}
  double tail_mass_ = 0.0;          // analytic Pareto cell beyond edges_.back()
  double tail_index_ = 0.0;
  double total_ = 0.0;
};

/// int_0^eps g(s) ds for g integrable at 0, via s = eps * e^{-v}.
double integrate_near_zero(const std::function<double(double)>& g, double eps);

}  // namespace coupling_lab

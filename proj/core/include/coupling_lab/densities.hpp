#pragma once

// Densities and total-variation distances of one-dimensional subordinate
// Brownian motions, obtained from the characteristic function
// exp(-t f(xi^2)).

#include <cstdint>
#include <span>
#include <vector>

#include "coupling_lab/bernstein.hpp"

namespace coupling_lab {

double characteristic_function(const BernsteinSpec& spec, double t, double xi);

struct GridParams {
  double spacing = 0.0;      // 0: chosen from the decay of the characteristic function
  double half_width = 0.0;   // 0: 20 length scales, doubled until aliasing is controlled
  std::size_t max_points = std::size_t{1} << 22;
  double alias_tol = 1e-7;   // relative agreement of grid p(0) with direct quadrature
};

/// p_t on z_j = j * spacing, j = 0..N (even extension to [-L, L]).
struct DensityGrid {
  BernsteinSpec spec;
  double t = 0.0;
  double spacing = 0.0;
  double half_width = 0.0;
  std::vector<double> values;
  double mass = 0.0;              // trapezoid mass over [-L, L] before renormalization
  double clipped = 0.0;           // largest negative value clipped to 0
  double truncation_bound = 0.0;  // bound on the error from cutting the xi-integral
  double alias_error = 0.0;       // |grid p(0) - direct p(0)|

  std::size_t points() const { return values.size(); }
  double z(std::size_t j) const { return static_cast<double>(j) * spacing; }
  /// Grid value at signed index j.
  double at(long j) const { return values[static_cast<std::size_t>(j < 0 ? -j : j)]; }
  /// Linear interpolation; 0 outside [-L, L].
  double operator()(double z) const;
};

/// Density by discrete cosine inversion of the characteristic function.
/// Throws DivergenceError when exp(-t f(xi^2)) is not integrable.
DensityGrid density_1d(const BernsteinSpec& spec, double t, const GridParams& params = {});

struct TvExact {
  double value = 0.0;        // symmetric-unimodal route
  double unimodal = 0.0;     // 2 (2 F(h/2) - 1), from the characteristic function
  double direct = 0.0;       // sum |p(z) - p(z - h)| dz on the grid
  double discrepancy = 0.0;  // |unimodal - direct|
};

/// int |p_t(z) - p_t(z - h)| dz.
TvExact tv_exact_1d(const BernsteinSpec& spec, double t, double h, const GridParams& params = {});
TvExact tv_exact_1d(const DensityGrid& grid, double h);

/// sum_j 2^{1-d} P(Z_t in (x_j - y_j, 0]) for x <= y coordinatewise. Each
/// orthant probability factors exactly (coordinates of Z_t are conditionally
/// independent and symmetric given the subordinator), leaving a
/// one-dimensional integral.
double tv_halfspace_lower(const BernsteinSpec& spec, double t, std::span<const double> x,
                          std::span<const double> y);

struct TvEmpiricalOptions {
  double anchor = 0.0;        // a bin edge
  int resamples = 50;
  std::size_t min_count = 0;  // 1-d bin merging threshold; 0 picks a default
  std::uint64_t seed = 0x7476656d70ULL;
};

struct TvEstimate {
  double value = 0.0;      // bootstrap bias-corrected, clipped to [0, 2]
  double std_error = 0.0;  // bootstrap standard deviation
  double raw = 0.0;        // plain histogram L1 distance
};

/// Histogram L1 distance between two samples.
TvEstimate tv_empirical(std::span<const double> a, std::span<const double> b, double bin_width,
                        const TvEmpiricalOptions& options = {});
/// d-dimensional version on cubic bins (no merging).
TvEstimate tv_empirical(std::span<const std::vector<double>> a,
                        std::span<const std::vector<double>> b, double bin_width,
                        const TvEmpiricalOptions& options = {});

std::size_t default_min_count();

}  // namespace coupling_lab

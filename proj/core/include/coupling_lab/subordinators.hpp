#pragma once

// Random-variate generation for subordinator increments, paths and first
// passage times.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "coupling_lab/bernstein.hpp"
#include "coupling_lab/levy.hpp"
#include "coupling_lab/random.hpp"

namespace coupling_lab {

enum class Strategy {
  ExactStable,
  ExactGamma,
  TemperedStableRejection,
  DriftOnly,
  SumOfComponents,
  CompoundPoissonApprox,
};

std::string strategy_name(Strategy strategy);

class SubordinatorSampler {
 public:
  /// One-sided (alpha/2)-stable law; StablePow only.
  static SubordinatorSampler exact_stable(const BernsteinSpec& spec);
  /// Gamma(t, 1) increments; GeometricStable(1) or LogStable(1), both log(1+lambda).
  static SubordinatorSampler exact_gamma(const BernsteinSpec& spec);
  /// Exponentially tilted stable proposals; Relativistic only.
  static SubordinatorSampler tempered_stable(const BernsteinSpec& spec);
  /// S_t = b t; Linear only.
  static SubordinatorSampler drift_only(const BernsteinSpec& spec);
  /// Independent components whose exponents add up to spec's (MixedStable only).
  static SubordinatorSampler sum_of_components(const BernsteinSpec& spec,
                                               std::vector<SubordinatorSampler> components);
  /// Jumps of size >= eps from the Levy density, smaller ones replaced by
  /// their mean drift t * int_0^eps s mu(ds).
  static SubordinatorSampler compound_poisson(const BernsteinSpec& spec, double eps);

  /// The exact strategy for the family when one exists, otherwise
  /// compound_poisson(spec, default_eps).
  static SubordinatorSampler for_spec(const BernsteinSpec& spec, double default_eps = 1e-3);
  /// Strategy selected by its config name ("exact-stable", "compound-poisson", ...).
  static SubordinatorSampler from_name(const BernsteinSpec& spec, const std::string& name,
                                       double eps = 1e-3);

  const BernsteinSpec& spec() const { return spec_; }
  Strategy strategy() const { return strategy_; }
  const std::vector<SubordinatorSampler>& components() const { return components_; }
  double eps() const { return eps_; }
  double drift_compensation() const { return drift_compensation_; }
  /// Jump intensity of the compound-Poisson part, 0 for other strategies.
  double jump_rate() const { return jumps_ ? jumps_->rate() : 0.0; }

  std::string describe() const;

 private:
  SubordinatorSampler(BernsteinSpec spec, Strategy strategy)
      : spec_(std::move(spec)), strategy_(strategy) {}

  friend double sample_increment(const SubordinatorSampler&, double, RngStream&);

  BernsteinSpec spec_;
  Strategy strategy_;
  std::vector<SubordinatorSampler> components_;
  std::shared_ptr<const TailJumpSampler> jumps_;
  double eps_ = 0.0;
  double drift_compensation_ = 0.0;
};

/// A draw of S_t.
double sample_increment(const SubordinatorSampler& sampler, double t, RngStream& rng);

/// S at each time of a strictly increasing grid with grid[0] > 0.
std::vector<double> sample_path(const SubordinatorSampler& sampler, std::span<const double> grid,
                                RngStream& rng);

struct FirstPassageResult {
  double time = 0.0;        // first grid time with S >= level (inf if censored)
  double lower_time = 0.0;  // previous grid time, S < level there
  double pre_level = 0.0;   // S(lower_time)
  double post_level = 0.0;  // S(time)
  double step = 0.0;        // time - lower_time
  bool censored = false;    // horizon reached before the crossing
  std::uint64_t steps = 0;  // grid steps simulated
};

/// First passage of S over level, located on the geometric grid
/// t_k = t_0 (1 + tol)^k so that the bracket [lower_time, time] has width
/// at most tol * time. S is sampled exactly at the grid times. With a finite
/// horizon the simulation stops there and reports a censored result.
FirstPassageResult first_passage(const SubordinatorSampler& sampler, double level, double tol,
                                 RngStream& rng, double horizon = kInfinity);

struct LaplaceCheck {
  double mc_mean = 0.0;
  double target = 0.0;
  double std_error = 0.0;
  bool pass = false;
};

/// Monte-Carlo E[exp(-lambda S_t)] against exp(-t f(lambda)).
LaplaceCheck validate_laplace(const SubordinatorSampler& sampler, double lambda, double t,
                              std::uint64_t n, RngStream& rng);

/// Symmetric jump measure nu(dz) = density(|z|) dz on 0 < |z| <= support,
/// split at eps into a compound-Poisson part and a Gaussian substitute for
/// the small jumps.
class CompoundPoissonLevy {
 public:
  CompoundPoissonLevy(std::function<double(double)> density, double support, double eps);

  /// Intensity of jumps with |z| >= eps (both signs).
  double jump_rate() const { return 2.0 * jumps_.rate(); }
  /// int_{|z|<eps} z^2 nu(dz).
  double small_jump_variance() const { return small_variance_; }
  double eps() const { return jumps_.eps(); }
  double support() const { return jumps_.support(); }

  double sample_jump(RngStream& rng) const;

 private:
  friend CompoundPoissonLevy truncated_stable_levy(double, double, double);

  TailJumpSampler jumps_;
  double small_variance_ = 0.0;
  double power_alpha_ = 0.0;  // > 0: density is c z^{-1-alpha}, sampled by exact inversion
  double power_lo_ = 0.0, power_hi_ = 0.0;  // eps^{-alpha}, support^{-alpha}
};

/// One increment over time t of the symmetric pure-jump process.
double sample_cp_levy_increment(const CompoundPoissonLevy& levy, double t, RngStream& rng);

/// Truncated symmetric stable: c / |z|^{1+alpha} on 0 < |z| <= 1.
CompoundPoissonLevy truncated_stable_levy(double alpha, double c, double eps);

}  // namespace coupling_lab

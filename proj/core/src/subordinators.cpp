#include "coupling_lab/subordinators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coupling_lab/error.hpp"
#include "coupling_lab/format.hpp"

namespace coupling_lab {

namespace {

constexpr std::uint64_t kMaxProposals = 10'000'000;
constexpr std::uint64_t kMaxSteps = 1'000'000'000;

// One-sided stable variate with E exp(-lambda S) = exp(-lambda^rho), rho in (0,1).
double unit_stable(double rho, RngStream& rng) {
  const double u = std::numbers::pi * rng.uniform();
  const double e = rng.exponential();
  const double log_s = std::log(std::sin(rho * u)) - std::log(std::sin(u)) / rho +
                       (1.0 - rho) / rho * (std::log(std::sin((1.0 - rho) * u)) - std::log(e));
  return std::exp(log_s);
}

double stable_increment(double alpha, double t, RngStream& rng) {
  const double rho = alpha / 2.0;
  return std::pow(t, 1.0 / rho) * unit_stable(rho, rng);
}

double tempered_increment(const BernsteinSpec& spec, double t, RngStream& rng) {
  const double m = spec.mass();
  const double theta = std::pow(m, 2.0 / spec.alpha());
  // Acceptance per piece is exp(-m * t / k) >= 0.1.
  const auto pieces = static_cast<std::uint64_t>(
      std::max(1.0, std::ceil(m * t / std::numbers::ln10)));
  const double dt = t / static_cast<double>(pieces);
  double total = 0.0;
  std::uint64_t proposals = 0;
  for (std::uint64_t i = 0; i < pieces; ++i) {
    while (true) {
      if (++proposals > kMaxProposals)
        throw NonconvergenceError("tempered-stable rejection exceeded 1e7 proposals");
      const double s = stable_increment(spec.alpha(), dt, rng);
      if (rng.uniform() < std::exp(-theta * s)) {
        total += s;
        break;
      }
    }
  }
  return total;
}

void require_family(bool ok, const BernsteinSpec& spec, const char* strategy) {
  if (!ok)
    throw ArgumentError(std::string("strategy ") + strategy + " does not apply to " +
                        spec.describe());
}

}  // namespace

std::string strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::ExactStable: return "exact-stable";
    case Strategy::ExactGamma: return "exact-gamma";
    case Strategy::TemperedStableRejection: return "tempered-stable-rejection";
    case Strategy::DriftOnly: return "drift-only";
    case Strategy::SumOfComponents: return "sum-of-components";
    case Strategy::CompoundPoissonApprox: return "compound-poisson";
  }
  return "unknown";
}

SubordinatorSampler SubordinatorSampler::exact_stable(const BernsteinSpec& spec) {
  require_family(spec.family() == Family::StablePow, spec, "exact-stable");
  return {spec, Strategy::ExactStable};
}

SubordinatorSampler SubordinatorSampler::exact_gamma(const BernsteinSpec& spec) {
  const bool log1p_lambda =
      (spec.family() == Family::GeometricStable || spec.family() == Family::LogStable) &&
      spec.alpha() == 1.0;
  require_family(log1p_lambda, spec, "exact-gamma");
  return {spec, Strategy::ExactGamma};
}

SubordinatorSampler SubordinatorSampler::tempered_stable(const BernsteinSpec& spec) {
  require_family(spec.family() == Family::Relativistic, spec, "tempered-stable-rejection");
  return {spec, Strategy::TemperedStableRejection};
}

SubordinatorSampler SubordinatorSampler::drift_only(const BernsteinSpec& spec) {
  require_family(spec.family() == Family::Linear, spec, "drift-only");
  return {spec, Strategy::DriftOnly};
}

SubordinatorSampler SubordinatorSampler::sum_of_components(
    const BernsteinSpec& spec, std::vector<SubordinatorSampler> components) {
  require_family(spec.family() == Family::MixedStable, spec, "sum-of-components");
  if (components.empty()) throw ArgumentError("sum-of-components: no components");
  for (const double lam : {1e-3, 1e-1, 1.0, 10.0, 1e3}) {
    double sum = 0.0;
    for (const auto& c : components) sum += eval(c.spec(), lam);
    const double target = eval(spec, lam);
    if (std::abs(sum - target) > 1e-12 * target)
      throw ArgumentError("sum-of-components: component exponents do not add up to " +
                          spec.describe());
  }
  SubordinatorSampler s{spec, Strategy::SumOfComponents};
  s.components_ = std::move(components);
  return s;
}

SubordinatorSampler SubordinatorSampler::compound_poisson(const BernsteinSpec& spec, double eps) {
  if (!(eps > 0.0)) throw ArgumentError("compound-poisson: eps must be positive");
  if (!spec.has_levy_density())
    throw ArgumentError("compound-poisson: " + spec.describe() + " carries no Levy density");
  SubordinatorSampler s{spec, Strategy::CompoundPoissonApprox};
  auto density = [spec](double x) { return spec.levy_density(x); };
  s.eps_ = eps;
  s.jumps_ = std::make_shared<const TailJumpSampler>(density, eps, kInfinity);
  s.drift_compensation_ = integrate_near_zero([&](double x) { return x * density(x); }, eps);
  return s;
}

SubordinatorSampler SubordinatorSampler::for_spec(const BernsteinSpec& spec, double default_eps) {
  switch (spec.family()) {
    case Family::StablePow:
      return exact_stable(spec);
    case Family::MixedStable:
      return sum_of_components(spec, {exact_stable(BernsteinSpec::stable_pow(spec.alpha())),
                                      exact_stable(BernsteinSpec::stable_pow(spec.beta()))});
    case Family::Relativistic:
      return tempered_stable(spec);
    case Family::Linear:
      return drift_only(spec);
    case Family::LogStable:
    case Family::GeometricStable:
      if (spec.alpha() == 1.0) return exact_gamma(spec);
      break;
    default:
      break;
  }
  if (spec.has_levy_density()) return compound_poisson(spec, default_eps);
  throw ArgumentError("no sampling strategy available for " + spec.describe());
}

SubordinatorSampler SubordinatorSampler::from_name(const BernsteinSpec& spec,
                                                   const std::string& name, double eps) {
  if (name == "exact-stable") return exact_stable(spec);
  if (name == "exact-gamma") return exact_gamma(spec);
  if (name == "tempered-stable-rejection") return tempered_stable(spec);
  if (name == "drift-only") return drift_only(spec);
  if (name == "sum-of-components") {
    require_family(spec.family() == Family::MixedStable, spec, "sum-of-components");
    return for_spec(spec);
  }
  if (name == "compound-poisson") return compound_poisson(spec, eps);
  if (name == "auto" || name.empty()) return for_spec(spec, eps);
  throw ArgumentError("unknown sampling strategy '" + name + "'");
}

std::string SubordinatorSampler::describe() const {
  std::string out = strategy_name(strategy_) + "[" + spec_.describe();
  if (strategy_ == Strategy::CompoundPoissonApprox) out += ",eps=" + shortest_repr(eps_);
  return out + "]";
}

double sample_increment(const SubordinatorSampler& sampler, double t, RngStream& rng) {
  if (!(t > 0.0)) throw DomainError("sample_increment: t must be positive");
  const BernsteinSpec& spec = sampler.spec();
  switch (sampler.strategy()) {
    case Strategy::ExactStable:
      return stable_increment(spec.alpha(), t, rng);
    case Strategy::ExactGamma:
      return rng.gamma(t);
    case Strategy::TemperedStableRejection:
      return tempered_increment(spec, t, rng);
    case Strategy::DriftOnly:
      return spec.drift() * t;
    case Strategy::SumOfComponents: {
      double sum = 0.0;
      for (const auto& c : sampler.components()) sum += sample_increment(c, t, rng);
      return sum;
    }
    case Strategy::CompoundPoissonApprox: {
      const std::uint64_t jumps = rng.poisson(t * sampler.jumps_->rate());
      double sum = t * sampler.drift_compensation();
      for (std::uint64_t i = 0; i < jumps; ++i) sum += sampler.jumps_->sample(rng);
      return sum;
    }
  }
  return 0.0;
}

std::vector<double> sample_path(const SubordinatorSampler& sampler, std::span<const double> grid,
                                RngStream& rng) {
  std::vector<double> path;
  path.reserve(grid.size());
  double prev_t = 0.0, value = 0.0;
  for (const double t : grid) {
    if (!(t > prev_t)) throw ArgumentError("sample_path: grid must be strictly increasing and > 0");
    value += sample_increment(sampler, t - prev_t, rng);
    path.push_back(value);
    prev_t = t;
  }
  return path;
}

FirstPassageResult first_passage(const SubordinatorSampler& sampler, double level, double tol,
                                 RngStream& rng, double horizon) {
  if (!(level > 0.0)) throw DomainError("first_passage: level must be positive");
  if (!(tol > 0.0 && tol < 0.5)) throw ArgumentError("first_passage: tol must lie in (0, 0.5)");
  if (!(horizon > 0.0)) throw ArgumentError("first_passage: horizon must be positive");
  FirstPassageResult r;
  if (sampler.strategy() == Strategy::DriftOnly) {
    const double time = level / sampler.spec().drift();
    if (time > horizon) {
      r.time = kInfinity;
      r.lower_time = horizon;
      r.pre_level = sampler.spec().drift() * horizon;
      r.post_level = kInfinity;
      r.censored = true;
      return r;
    }
    r.time = time;
    r.lower_time = time;
    r.pre_level = std::nextafter(level, 0.0);
    r.post_level = level;
    return r;
  }
  // Typical crossing scale; the first grid point sits far below it.
  const double scale = 1.0 / eval(sampler.spec(), 1.0 / level);
  double t = std::min(1e-4 * tol * scale, horizon);
  double prev_t = 0.0, value = 0.0;
  while (true) {
    if (++r.steps > kMaxSteps) throw BudgetError("first_passage: more than 1e9 grid steps");
    const double next = value + sample_increment(sampler, t - prev_t, rng);
    if (next >= level) {
      r.time = t;
      r.lower_time = prev_t;
      r.pre_level = value;
      r.post_level = next;
      r.step = t - prev_t;
      return r;
    }
    value = next;
    if (t >= horizon) {
      r.time = kInfinity;
      r.lower_time = t;
      r.pre_level = value;
      r.post_level = kInfinity;
      r.censored = true;
      return r;
    }
    prev_t = t;
    t = std::min(t * (1.0 + tol), horizon);
  }
}

LaplaceCheck validate_laplace(const SubordinatorSampler& sampler, double lambda, double t,
                              std::uint64_t n, RngStream& rng) {
  if (n < 10'000) throw ArgumentError("validate_laplace: n must be at least 1e4");
  if (!(lambda > 0.0) || !(t > 0.0)) throw DomainError("validate_laplace: lambda, t must be > 0");
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double v = std::exp(-lambda * sample_increment(sampler, t, rng));
    const double d = v - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (v - mean);
  }
  LaplaceCheck c;
  c.mc_mean = mean;
  c.target = std::exp(-t * eval(sampler.spec(), lambda));
  c.std_error = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  // Deterministic strategies have zero spread; allow for rounding in b*t*lambda.
  c.pass = std::abs(c.mc_mean - c.target) <= 3.0 * c.std_error + 1e-14 * c.target;
  return c;
}

CompoundPoissonLevy::CompoundPoissonLevy(std::function<double(double)> density, double support,
                                         double eps)
    : jumps_(density, eps, support) {
  small_variance_ = 2.0 * integrate_near_zero([&](double z) { return z * z * density(z); }, eps);
}

double CompoundPoissonLevy::sample_jump(RngStream& rng) const {
  if (power_alpha_ > 0.0) {
    // One uniform supplies the sign and the inverse-cdf coordinate.
    const double u = rng.uniform();
    const double v = u < 0.5 ? 2.0 * u : 2.0 * u - 1.0;
    const double w = power_lo_ - v * (power_lo_ - power_hi_);
    const double size = power_alpha_ == 1.0 ? 1.0 / w : std::pow(w, -1.0 / power_alpha_);
    return u < 0.5 ? -size : size;
  }
  const double size = jumps_.sample(rng);
  return rng.uniform() < 0.5 ? -size : size;
}

double sample_cp_levy_increment(const CompoundPoissonLevy& levy, double t, RngStream& rng) {
  if (!(t > 0.0)) throw DomainError("sample_cp_levy_increment: t must be positive");
  const std::uint64_t jumps = rng.poisson(t * levy.jump_rate());
  double sum = 0.0;
  for (std::uint64_t i = 0; i < jumps; ++i) sum += levy.sample_jump(rng);
  if (levy.small_jump_variance() > 0.0)
    sum += std::sqrt(t * levy.small_jump_variance()) * rng.normal();
  return sum;
}

CompoundPoissonLevy truncated_stable_levy(double alpha, double c, double eps) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw ArgumentError("truncated stable: alpha in (0,2)");
  if (!(c > 0.0)) throw ArgumentError("truncated stable: c must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("truncated stable: eps must lie in (0,1)");
  CompoundPoissonLevy levy([alpha, c](double z) { return c * std::pow(z, -1.0 - alpha); }, 1.0,
                           eps);
  levy.power_alpha_ = alpha;
  levy.power_lo_ = std::pow(eps, -alpha);
  levy.power_hi_ = 1.0;
  return levy;
}

}  // namespace coupling_lab

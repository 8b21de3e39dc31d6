#include "coupling_lab/coupling.hpp"

#include <cmath>
#include <numbers>

#include "coupling_lab/error.hpp"

namespace coupling_lab {

namespace {

void require_same_size(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty())
    throw ArgumentError("points must be nonempty and of equal dimension");
}

}  // namespace

double distance(std::span<const double> x, std::span<const double> y) {
  require_same_size(x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s);
}

Point reflect(std::span<const double> x, std::span<const double> y, std::span<const double> z) {
  require_same_size(x, y);
  if (z.size() != x.size()) throw ArgumentError("reflect: dimension mismatch");
  double norm2 = 0.0, proj = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    norm2 += d * d;
    proj += (z[i] - 0.5 * (x[i] + y[i])) * d;
  }
  if (norm2 == 0.0) throw DomainError("reflect: x == y gives no mirror hyperplane");
  Point out(z.begin(), z.end());
  const double k = 2.0 * proj / norm2;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] -= k * (x[i] - y[i]);
  return out;
}

double sample_tb(double dist, RngStream& rng) {
  if (dist == 0.0) return 0.0;
  const double z = rng.normal();
  return dist * dist / (8.0 * z * z);
}

double sample_tb(std::span<const double> x, std::span<const double> y, RngStream& rng) {
  return sample_tb(distance(x, y), rng);
}

SurvivalTb survival_tb(double dist, double t) {
  if (!(t > 0.0)) throw DomainError("survival_tb: t must be positive");
  return {std::erf(dist / (4.0 * std::sqrt(t))),
          dist / (2.0 * std::sqrt(std::numbers::pi * t))};
}

SurvivalTb survival_tb(std::span<const double> x, std::span<const double> y, double t) {
  return survival_tb(distance(x, y), t);
}

double brownian_tv(double dist, double t) { return 2.0 * survival_tb(dist, t).probability; }

CouplingDraw sample_tx(const SubordinatorSampler& sampler, std::span<const double> x,
                       std::span<const double> y, double tol, RngStream& rng, double horizon) {
  CouplingDraw draw;
  draw.x.assign(x.begin(), x.end());
  draw.y.assign(y.begin(), y.end());
  draw.tb = sample_tb(x, y, rng);
  if (draw.tb == 0.0) return draw;  // x == y: coupled from the start
  draw.tx = first_passage(sampler, draw.tb, tol, rng, horizon);
  return draw;
}

CoupledPair simulate_coupled_marginals(const SubordinatorSampler& sampler,
                                       std::span<const double> x, std::span<const double> y,
                                       double t, RngStream& rng) {
  if (!(t > 0.0)) throw DomainError("simulate_coupled_marginals: t must be positive");
  const double h = distance(x, y);
  const std::size_t d = x.size();
  CoupledPair pair;
  pair.tb = sample_tb(h, rng);
  const double s = sample_increment(sampler, t, rng);
  pair.subordinator_value = s;
  pair.coupled = s >= pair.tb;

  if (h == 0.0) {
    const double sd = std::sqrt(2.0 * s);
    pair.first.resize(d);
    for (std::size_t i = 0; i < d; ++i) pair.first[i] = x[i] + sd * rng.normal();
    pair.second = pair.first;
    return pair;
  }

  // Unit normal of the mirror hyperplane and the midpoint.
  Point e(d, 0.0), mid(d);
  for (std::size_t i = 0; i < d; ++i) {
    mid[i] = 0.5 * (x[i] + y[i]);
    e[i] = (x[i] - y[i]) / h;
  }

  // Signed distance of B_s from the hyperplane, B started at x.
  double normal = 0.0;
  if (pair.coupled) {
    normal = std::sqrt(2.0 * (s - pair.tb)) * rng.normal();
  } else {
    // |3-d Brownian bridge| from (h/2, 0, 0) at time 0 to the origin at T^B.
    const double tau = pair.tb;
    const double sd = std::sqrt(2.0 * s * (tau - s) / tau);
    const double a = 0.5 * h * (1.0 - s / tau) + sd * rng.normal();
    const double b = sd * rng.normal();
    const double c = sd * rng.normal();
    normal = std::sqrt(a * a + b * b + c * c);
  }

  // Components orthogonal to e are free Gaussians of variance 2s.
  Point perp(d);
  const double sd_free = std::sqrt(2.0 * s);
  if (d > 1) {
    double along = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      perp[i] = sd_free * rng.normal();
      along += perp[i] * e[i];
    }
    for (std::size_t i = 0; i < d; ++i) perp[i] -= along * e[i];
  }
  pair.first.resize(d);
  pair.second.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    pair.first[i] = mid[i] + normal * e[i] + perp[i];
    pair.second[i] = pair.coupled ? pair.first[i] : mid[i] - normal * e[i] + perp[i];
  }
  return pair;
}

CouplingDraw sample_tx_product(std::span<const SubordinatorSampler> samplers,
                               std::span<const double> x, std::span<const double> y, double tol,
                               RngStream& rng, double horizon) {
  require_same_size(x, y);
  if (samplers.size() != x.size())
    throw ArgumentError("sample_tx_product: one sampler per coordinate required");
  CouplingDraw draw;
  draw.x.assign(x.begin(), x.end());
  draw.y.assign(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi[1] = {x[i]}, yi[1] = {y[i]};
    const CouplingDraw one = sample_tx(samplers[i], xi, yi, tol, rng, horizon);
    draw.per_coordinate.push_back(one.time());
    if (i == 0 || one.time() > draw.tx.time) {
      draw.tx = one.tx;
      draw.tb = one.tb;
    }
  }
  return draw;
}

}  // namespace coupling_lab

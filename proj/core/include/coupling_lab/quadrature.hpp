#pragma once

// Globally adaptive Gauss-Kronrod (G7/K15) quadrature on finite intervals.

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace coupling_lab {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  int max_subdivisions = 4000;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gauss_kronrod_panel(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double s = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[i] * s;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * s;
  }
  Panel p{a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
  return p;
}

}  // namespace detail

/// Integrates f over [a, b]. Integrable endpoint singularities are handled by
/// subdivision; the nodes never touch the endpoints.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  QuadratureResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  std::priority_queue<detail::Panel> heap;
  auto first = detail::gauss_kronrod_panel(f, a, b);
  res.evaluations = 15;
  heap.push(first);
  double total = first.value;
  double err = first.error;
  int panels = 1;
  while (true) {
    const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    if (err <= target) {
      res.converged = true;
      break;
    }
    if (panels >= opt.max_subdivisions) break;
    auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    auto left = detail::gauss_kronrod_panel(f, worst.a, mid);
    auto right = detail::gauss_kronrod_panel(f, mid, worst.b);
    res.evaluations += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Resum to shed the drift of incremental updates.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  res.value = total;
  res.error = err;
  if (!res.converged)
    res.converged = err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
  return res;
}

}  // namespace coupling_lab

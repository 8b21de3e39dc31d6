#pragma once

// Truncated Taylor arithmetic. A Jet<N> holds c[k] = g^(k)(x0) / k! for
// k = 0..N, so evaluating a closed form on Jet<N>::variable(x0) yields all
// derivatives up to order N at machine precision.

#include <array>
#include <cmath>
#include <cstddef>

namespace coupling_lab {

template <std::size_t N>
struct Jet {
  std::array<double, N + 1> c{};

  static Jet constant(double v) {
    Jet j;
    j.c[0] = v;
    return j;
  }
  static Jet variable(double x0) {
    Jet j;
    j.c[0] = x0;
    if constexpr (N >= 1) j.c[1] = 1.0;
    return j;
  }

  double value() const { return c[0]; }

  /// k-th derivative at the expansion point.
  double derivative(std::size_t k) const {
    double fact = 1.0;
    for (std::size_t i = 2; i <= k; ++i) fact *= static_cast<double>(i);
    return c[k] * fact;
  }

  Jet& operator+=(const Jet& o) {
    for (std::size_t k = 0; k <= N; ++k) c[k] += o.c[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (std::size_t k = 0; k <= N; ++k) c[k] -= o.c[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
};

template <std::size_t N>
Jet<N> operator+(Jet<N> a, const Jet<N>& b) { return a += b; }
template <std::size_t N>
Jet<N> operator-(Jet<N> a, const Jet<N>& b) { return a -= b; }
template <std::size_t N>
Jet<N> operator-(Jet<N> a) { return a *= -1.0; }
template <std::size_t N>
Jet<N> operator*(Jet<N> a, double s) { return a *= s; }
template <std::size_t N>
Jet<N> operator*(double s, Jet<N> a) { return a *= s; }
template <std::size_t N>
Jet<N> operator+(Jet<N> a, double s) {
  a.c[0] += s;
  return a;
}
template <std::size_t N>
Jet<N> operator+(double s, Jet<N> a) { return a + s; }
template <std::size_t N>
Jet<N> operator-(Jet<N> a, double s) {
  a.c[0] -= s;
  return a;
}
template <std::size_t N>
Jet<N> operator/(Jet<N> a, double s) { return a *= (1.0 / s); }

template <std::size_t N>
Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r;
  for (std::size_t k = 0; k <= N; ++k)
    for (std::size_t j = 0; j <= k; ++j) r.c[k] += a.c[j] * b.c[k - j];
  return r;
}

template <std::size_t N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r;
  for (std::size_t k = 0; k <= N; ++k) {
    double acc = a.c[k];
    for (std::size_t j = 1; j <= k; ++j) acc -= b.c[j] * r.c[k - j];
    r.c[k] = acc / b.c[0];
  }
  return r;
}

template <std::size_t N>
Jet<N> exp(const Jet<N>& a) {
  Jet<N> r;
  r.c[0] = std::exp(a.c[0]);
  for (std::size_t k = 1; k <= N; ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j)
      acc += static_cast<double>(j) * a.c[j] * r.c[k - j];
    r.c[k] = acc / static_cast<double>(k);
  }
  return r;
}

/// exp(a) - 1 with full relative precision in the constant term.
template <std::size_t N>
Jet<N> expm1(const Jet<N>& a) {
  Jet<N> r = exp(a);
  r.c[0] = std::expm1(a.c[0]);
  return r;
}

namespace detail {
// log of the series b, with b.c[0] > 0; l0 supplied by the caller.
template <std::size_t N>
Jet<N> log_series(const Jet<N>& b, double l0) {
  Jet<N> r;
  r.c[0] = l0;
  for (std::size_t k = 1; k <= N; ++k) {
    double acc = b.c[k];
    for (std::size_t j = 1; j < k; ++j)
      acc -= static_cast<double>(j) * r.c[j] * b.c[k - j] / static_cast<double>(k);
    r.c[k] = acc / b.c[0];
  }
  return r;
}
}  // namespace detail

template <std::size_t N>
Jet<N> log(const Jet<N>& a) {
  return detail::log_series(a, std::log(a.c[0]));
}

template <std::size_t N>
Jet<N> log1p(const Jet<N>& a) {
  return detail::log_series(a + 1.0, std::log1p(a.c[0]));
}

template <std::size_t N>
Jet<N> pow(const Jet<N>& a, double p) {
  Jet<N> r;
  r.c[0] = std::pow(a.c[0], p);
  for (std::size_t k = 1; k <= N; ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j)
      acc += ((p + 1.0) * static_cast<double>(j) - static_cast<double>(k)) * a.c[j] *
             r.c[k - j];
    r.c[k] = acc / (static_cast<double>(k) * a.c[0]);
  }
  return r;
}

}  // namespace coupling_lab

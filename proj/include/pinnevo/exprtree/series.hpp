#pragma once

#include <array>
#include <cmath>

#include "pinnevo/exprtree/operators.hpp"

namespace pinnevo::exprtree {

/// Value plus K first-order tangents (forward mode over activation parameters).
template <int K>
struct Dual {
  double v = 0;
  std::array<double, K> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit lift of constants
};

template <int K>
inline Dual<K> operator+(const Dual<K>& a, const Dual<K>& b) {
  Dual<K> r(a.v + b.v);
  for (int i = 0; i < K; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}

template <int K>
inline Dual<K> operator-(const Dual<K>& a, const Dual<K>& b) {
  Dual<K> r(a.v - b.v);
  for (int i = 0; i < K; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}

template <int K>
inline Dual<K> operator-(const Dual<K>& a) {
  Dual<K> r(-a.v);
  for (int i = 0; i < K; ++i) r.d[i] = -a.d[i];
  return r;
}

template <int K>
inline Dual<K> operator*(const Dual<K>& a, const Dual<K>& b) {
  Dual<K> r(a.v * b.v);
  for (int i = 0; i < K; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}

template <int K>
inline Dual<K> operator*(double s, const Dual<K>& a) {
  Dual<K> r(s * a.v);
  for (int i = 0; i < K; ++i) r.d[i] = s * a.d[i];
  return r;
}

template <int K>
inline Dual<K> operator/(const Dual<K>& a, const Dual<K>& b) {
  const double q = a.v / b.v;
  Dual<K> r(q);
  for (int i = 0; i < K; ++i) r.d[i] = (a.d[i] - q * b.d[i]) / b.v;
  return r;
}

/// Truncated Taylor expansion in the activation input: c[k] = f^(k)(x) / k!.
template <class S>
struct Taylor3 {
  std::array<S, 4> c{};
};

template <class S>
inline Taylor3<S> operator+(const Taylor3<S>& a, const Taylor3<S>& b) {
  return {{a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2], a.c[3] + b.c[3]}};
}

template <class S>
inline Taylor3<S> operator-(const Taylor3<S>& a, const Taylor3<S>& b) {
  return {{a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2], a.c[3] - b.c[3]}};
}

template <class S>
inline Taylor3<S> operator*(const Taylor3<S>& a, const Taylor3<S>& b) {
  const auto& x = a.c;
  const auto& y = b.c;
  return {{x[0] * y[0], x[0] * y[1] + x[1] * y[0], x[0] * y[2] + x[1] * y[1] + x[2] * y[0],
           x[0] * y[3] + x[1] * y[2] + x[2] * y[1] + x[3] * y[0]}};
}

template <class S>
inline Taylor3<S> operator/(const Taylor3<S>& a, const Taylor3<S>& b) {
  const auto& x = a.c;
  const auto& y = b.c;
  Taylor3<S> q;
  q.c[0] = x[0] / y[0];
  q.c[1] = (x[1] - y[1] * q.c[0]) / y[0];
  q.c[2] = (x[2] - y[1] * q.c[1] - y[2] * q.c[0]) / y[0];
  q.c[3] = (x[3] - y[1] * q.c[2] - y[2] * q.c[1] - y[3] * q.c[0]) / y[0];
  return q;
}

template <class S>
inline Taylor3<S> scale(const S& s, const Taylor3<S>& a) {
  return {{s * a.c[0], s * a.c[1], s * a.c[2], s * a.c[3]}};
}

inline double value_of(double s) { return s; }
template <int K>
inline double value_of(const Dual<K>& s) {
  return s.v;
}

namespace detail {

// g^(k)(a0) lifted to the coefficient type, using g^(k+1) for the tangent part.
inline double lift(const std::array<double, 5>& g, int k, double) { return g[k]; }

template <int K>
inline Dual<K> lift(const std::array<double, 5>& g, int k, const Dual<K>& a0) {
  Dual<K> r(g[k]);
  for (int i = 0; i < K; ++i) r.d[i] = g[k + 1] * a0.d[i];
  return r;
}

}  // namespace detail

/// Composition g(a(x)) by Faa di Bruno, truncated at third order.
template <class S>
inline Taylor3<S> compose(UnaryOp op, const Taylor3<S>& a) {
  const auto g = derivatives(op, value_of(a.c[0]));
  const S g0 = detail::lift(g, 0, a.c[0]);
  const S g1 = detail::lift(g, 1, a.c[0]);
  const S g2 = detail::lift(g, 2, a.c[0]);
  const S g3 = detail::lift(g, 3, a.c[0]);
  const S& a1 = a.c[1];
  const S& a2 = a.c[2];
  const S& a3 = a.c[3];
  const S a1sq = a1 * a1;
  Taylor3<S> r;
  r.c[0] = g0;
  r.c[1] = g1 * a1;
  r.c[2] = g1 * a2 + 0.5 * (g2 * a1sq);
  r.c[3] = g1 * a3 + g2 * (a1 * a2) + (1.0 / 6.0) * (g3 * (a1sq * a1));
  return r;
}

template <class S>
inline Taylor3<S> combine(BinaryOp op, const Taylor3<S>& a, const Taylor3<S>& b) {
  switch (op) {
    case BinaryOp::add: return a + b;
    case BinaryOp::sub: return a - b;
    case BinaryOp::mul: return a * b;
    case BinaryOp::div: return a / b;
    case BinaryOp::max: return value_of(b.c[0]) > value_of(a.c[0]) ? b : a;
    case BinaryOp::min: return value_of(b.c[0]) < value_of(a.c[0]) ? b : a;
  }
  return a;
}

}  // namespace pinnevo::exprtree

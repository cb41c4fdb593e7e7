#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>

namespace pinnevo::exprtree {

/// Unary operators of the activation library, in table order.
enum class UnaryOp : std::uint8_t {
  identity,          // x
  negate,            // -x
  reciprocal,        // x^-1
  square,            // x^2
  exp,               // e^x
  exp_plus_one,      // e^x + 1
  exp_neg_plus_one,  // e^-x + 1
  exp_minus_one,     // e^x - 1
  exp_sum,           // e^x + e^-x
  exp_diff,          // e^x - e^-x
  sin,
  sinh,
  asinh,
  cos,
  cosh,
  tanh,
  atan,
  erf,
  erfc,
  sigmoid,
  softsign,
  swish,  // fixed swish, x * sigmoid(x)
  softplus,
};

enum class BinaryOp : std::uint8_t { add, sub, mul, div, max, min };

inline constexpr int kUnaryCount = 23;
inline constexpr int kBinaryCount = 6;

inline constexpr std::array<std::string_view, kUnaryCount> kUnaryNames = {
    "id",      "neg",    "inv",   "sq",    "exp",   "expp1",    "expnp1", "expm1",
    "expsum",  "expdiff", "sin",  "sinh",  "asinh", "cos",      "cosh",   "tanh",
    "atan",    "erf",    "erfc",  "sigmoid", "softsign", "swish", "softplus"};

inline constexpr std::array<std::string_view, kBinaryCount> kBinarySymbols = {"+", "-", "*", "/",
                                                                              "max", "min"};

constexpr std::string_view name(UnaryOp op) { return kUnaryNames[static_cast<int>(op)]; }
constexpr std::string_view name(BinaryOp op) { return kBinarySymbols[static_cast<int>(op)]; }
constexpr bool is_infix(BinaryOp op) { return op != BinaryOp::max && op != BinaryOp::min; }

inline std::optional<UnaryOp> unary_from_name(std::string_view s) {
  for (int i = 0; i < kUnaryCount; ++i)
    if (kUnaryNames[i] == s) return static_cast<UnaryOp>(i);
  return std::nullopt;
}

namespace detail {

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace detail

/// g, g', g'', g''', g'''' of a unary operator at x.
inline std::array<double, 5> derivatives(UnaryOp op, double x) {
  constexpr double kTwoOverSqrtPi = 1.1283791670955126;
  switch (op) {
    case UnaryOp::identity: return {x, 1, 0, 0, 0};
    case UnaryOp::negate: return {-x, -1, 0, 0, 0};
    case UnaryOp::reciprocal: {
      const double r = 1.0 / x, r2 = r * r;
      return {r, -r2, 2 * r2 * r, -6 * r2 * r2, 24 * r2 * r2 * r};
    }
    case UnaryOp::square: return {x * x, 2 * x, 2, 0, 0};
    case UnaryOp::exp: {
      const double e = std::exp(x);
      return {e, e, e, e, e};
    }
    case UnaryOp::exp_plus_one: {
      const double e = std::exp(x);
      return {e + 1, e, e, e, e};
    }
    case UnaryOp::exp_neg_plus_one: {
      const double e = std::exp(-x);
      return {e + 1, -e, e, -e, e};
    }
    case UnaryOp::exp_minus_one: {
      const double e = std::exp(x);
      return {std::expm1(x), e, e, e, e};
    }
    case UnaryOp::exp_sum: {
      const double c = 2 * std::cosh(x), s = 2 * std::sinh(x);
      return {c, s, c, s, c};
    }
    case UnaryOp::exp_diff: {
      const double c = 2 * std::cosh(x), s = 2 * std::sinh(x);
      return {s, c, s, c, s};
    }
    case UnaryOp::sin: {
      const double s = std::sin(x), c = std::cos(x);
      return {s, c, -s, -c, s};
    }
    case UnaryOp::cos: {
      const double s = std::sin(x), c = std::cos(x);
      return {c, -s, -c, s, c};
    }
    case UnaryOp::sinh: {
      const double s = std::sinh(x), c = std::cosh(x);
      return {s, c, s, c, s};
    }
    case UnaryOp::cosh: {
      const double s = std::sinh(x), c = std::cosh(x);
      return {c, s, c, s, c};
    }
    case UnaryOp::asinh: {
      const double w = 1 + x * x, q = 1.0 / std::sqrt(w), iw = 1.0 / w;
      const double d1 = q, d2 = -x * q * iw, d3 = (2 * x * x - 1) * q * iw * iw;
      const double d4 = (9 * x - 6 * x * x * x) * q * iw * iw * iw;
      return {std::asinh(x), d1, d2, d3, d4};
    }
    case UnaryOp::tanh: {
      const double t = std::tanh(x), d = 1 - t * t;
      return {t, d, -2 * t * d, d * (6 * t * t - 2), d * t * (16 - 24 * t * t)};
    }
    case UnaryOp::atan: {
      const double iw = 1.0 / (1 + x * x);
      return {std::atan(x), iw, -2 * x * iw * iw, (6 * x * x - 2) * iw * iw * iw,
              (24 * x - 24 * x * x * x) * iw * iw * iw * iw};
    }
    case UnaryOp::erf:
    case UnaryOp::erfc: {
      const double e = kTwoOverSqrtPi * std::exp(-x * x);
      const double sign = op == UnaryOp::erf ? 1.0 : -1.0;
      const double v = op == UnaryOp::erf ? std::erf(x) : std::erfc(x);
      return {v, sign * e, sign * -2 * x * e, sign * (4 * x * x - 2) * e,
              sign * (12 * x - 8 * x * x * x) * e};
    }
    case UnaryOp::sigmoid:
    case UnaryOp::swish:
    case UnaryOp::softplus: {
      const double s = detail::sigmoid(x), d = s * (1 - s);
      const double s2 = d * (1 - 2 * s);
      const double s3 = d * (1 - 6 * s + 6 * s * s);
      const double s4 = s2 * (1 - 6 * s + 6 * s * s) + d * (-6 * d + 12 * s * d);
      if (op == UnaryOp::sigmoid) return {s, d, s2, s3, s4};
      if (op == UnaryOp::softplus) return {detail::softplus(x), s, d, s2, s3};
      return {x * s, s + x * d, 2 * d + x * s2, 3 * s2 + x * s3, 4 * s3 + x * s4};
    }
    case UnaryOp::softsign: {
      const double a = 1 + std::abs(x), ia = 1.0 / a, sg = x < 0 ? -1.0 : 1.0;
      const double i2 = ia * ia;
      return {x * ia, i2, -2 * sg * i2 * ia, 6 * i2 * i2, -24 * sg * i2 * i2 * ia};
    }
  }
  return {};
}

inline double apply(UnaryOp op, double x) {
  switch (op) {
    case UnaryOp::identity: return x;
    case UnaryOp::negate: return -x;
    case UnaryOp::reciprocal: return 1.0 / x;
    case UnaryOp::square: return x * x;
    case UnaryOp::exp: return std::exp(x);
    case UnaryOp::exp_plus_one: return std::exp(x) + 1;
    case UnaryOp::exp_neg_plus_one: return std::exp(-x) + 1;
    case UnaryOp::exp_minus_one: return std::expm1(x);
    case UnaryOp::exp_sum: return 2 * std::cosh(x);
    case UnaryOp::exp_diff: return 2 * std::sinh(x);
    case UnaryOp::sin: return std::sin(x);
    case UnaryOp::sinh: return std::sinh(x);
    case UnaryOp::asinh: return std::asinh(x);
    case UnaryOp::cos: return std::cos(x);
    case UnaryOp::cosh: return std::cosh(x);
    case UnaryOp::tanh: return std::tanh(x);
    case UnaryOp::atan: return std::atan(x);
    case UnaryOp::erf: return std::erf(x);
    case UnaryOp::erfc: return std::erfc(x);
    case UnaryOp::sigmoid: return detail::sigmoid(x);
    case UnaryOp::softsign: return x / (1 + std::abs(x));
    case UnaryOp::swish: return x * detail::sigmoid(x);
    case UnaryOp::softplus: return detail::softplus(x);
  }
  return x;
}

// Ties in max/min resolve to the left operand.
inline double apply(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::add: return a + b;
    case BinaryOp::sub: return a - b;
    case BinaryOp::mul: return a * b;
    case BinaryOp::div: return a / b;
    case BinaryOp::max: return b > a ? b : a;
    case BinaryOp::min: return b < a ? b : a;
  }
  return a;
}

}  // namespace pinnevo::exprtree

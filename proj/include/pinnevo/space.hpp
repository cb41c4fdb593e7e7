#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pinnevo::space {

using BigInt = boost::multiprecision::cpp_int;

/// Ranges and library sizes that determine the search-space size.
struct SpaceConfig {
  int n_min = 3;       // fewest layers
  int n_max = 11;      // most layers
  int n_neu = 16;      // alternative hidden widths (20, 22, ..., 50)
  int unary = 23;      // U
  int binary = 6;      // B
  int max_nodes = 7;   // M_N
  int max_params = 3;  // M_E

  bool operator==(const SpaceConfig&) const = default;
};

inline BigInt fib(int n) {
  if (n < 1) throw std::invalid_argument("fib requires n >= 1");
  BigInt a = 1, b = 1;  // Fib(1), Fib(2)
  for (int i = 2; i < n; ++i) {
    BigInt c = a + b;
    a = std::move(b);
    b = std::move(c);
  }
  return n == 1 ? a : b;
}

inline BigInt binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline BigInt catalan(int b) {
  if (b < 0) throw std::invalid_argument("catalan requires b >= 0");
  return binomial(2 * b, b) / (b + 1);
}

/// Tree shapes with u unary and b binary nodes whose leaves are unary nodes:
/// Cat(b) * C(u + b - 1, 2b).
inline BigInt tree_shape_count(int u, int b) {
  if (u < 0 || b < 0) throw std::invalid_argument("negative node count");
  if (u + b - 1 < 2 * b) return 0;
  return catalan(b) * binomial(u + b - 1, 2 * b);
}

/// Activation trees with exactly m operator nodes, counting operator choices
/// and parameter placements on the 2b + u + 1 edges.
inline BigInt activation_space_term(const SpaceConfig& cfg, int m) {
  if (m < 1) return 0;
  BigInt total = 0;
  for (int b = 0; b <= (m - 1) / 2; ++b) {
    const int u = m - b;
    const int e = 2 * b + u + 1;
    const int ke = std::min(e, cfg.max_params);
    BigInt placements = 0;
    for (int i = 0; i <= ke; ++i) placements += binomial(e, i);
    total += tree_shape_count(u, b) * boost::multiprecision::pow(BigInt(cfg.unary), u) *
             boost::multiprecision::pow(BigInt(cfg.binary), b) * placements;
  }
  return total;
}

/// Sum of the per-m terms for 1 <= m <= M_N.
inline BigInt activation_space(const SpaceConfig& cfg) {
  BigInt total = 0;
  for (int m = 1; m <= cfg.max_nodes; ++m) total += activation_space_term(cfg, m);
  return total;
}

inline BigInt structure_space(const SpaceConfig& cfg) {
  if (cfg.n_min < 1 || cfg.n_max < cfg.n_min || cfg.n_neu < 0)
    throw std::invalid_argument("invalid layer range or width count");
  BigInt sum = 0;
  for (int n = cfg.n_min; n <= cfg.n_max; ++n) sum += fib(2 * n - 1);
  return sum * cfg.n_neu;
}

inline BigInt model_space(const SpaceConfig& cfg) {
  return structure_space(cfg) * activation_space(cfg);
}

/// Model space with the activation factor restricted to trees of exactly m nodes.
inline BigInt model_space_term(const SpaceConfig& cfg, int m) {
  return structure_space(cfg) * activation_space_term(cfg, m);
}

/// Brute-force count of shortcut sets on an n-layer net: sets of intervals
/// [i, j], 0 <= i < j <= n - 1, whose interiors are pairwise disjoint.
inline BigInt enumerate_shortcut_configs(int n) {
  if (n < 1 || n > 16) throw std::invalid_argument("enumeration supports 1 <= n <= 16");
  std::vector<std::pair<int, int>> intervals;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) intervals.emplace_back(i, j);
  // covered[k] marks that layer k (between positions k and k+1) is spanned.
  std::vector<char> covered(n > 1 ? n - 1 : 0, 0);
  BigInt count = 0;
  std::function<void(std::size_t)> go = [&](std::size_t next) {
    ++count;
    for (std::size_t s = next; s < intervals.size(); ++s) {
      auto [i, j] = intervals[s];
      bool free = true;
      for (int k = i; k < j && free; ++k) free = !covered[k];
      if (!free) continue;
      for (int k = i; k < j; ++k) covered[k] = 1;
      go(s + 1);
      for (int k = i; k < j; ++k) covered[k] = 0;
    }
  };
  go(0);
  return count;
}

/// Three-significant-digit scientific notation, e.g. "2.83e05".
inline std::string sci3(const BigInt& v) {
  if (v == 0) return "0.00e00";
  const std::string digits = v.str();
  const int exponent = static_cast<int>(digits.size()) - 1;
  // Round on the leading four digits to avoid double conversion of huge values.
  const long lead = std::stol(digits.substr(0, std::min<std::size_t>(4, digits.size())));
  long three = digits.size() >= 4 ? (lead + 5) / 10 : lead;
  int exp = exponent;
  if (digits.size() < 3) {
    for (std::size_t k = digits.size(); k < 3; ++k) three *= 10;
  }
  if (three >= 1000) {
    three /= 10;
    ++exp;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%ld.%02lde%02d", three / 100, three % 100, exp);
  return buf;
}

}  // namespace pinnevo::space

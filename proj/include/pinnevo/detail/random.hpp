#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pinnevo {

using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Seed of an independent stream keyed by a master seed and integer labels.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = detail::splitmix64(master);
  for (std::uint64_t k : keys) h = detail::splitmix64(h ^ detail::splitmix64(k + 0x632BE59BD9B4E019ULL));
  return h;
}

template <class R>
int uniform_int(R& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

template <class R>
double uniform_real(R& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <class R>
bool bernoulli(R& rng, double p) {
  return uniform_real(rng) < p;
}

}  // namespace pinnevo

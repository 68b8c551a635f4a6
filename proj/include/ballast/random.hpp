#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <cmath>
#include <vector>

namespace ballast {

// Sampling helpers with results fixed by the engine's output alone, so seeded
// runs do not depend on the standard library's distribution implementations.

inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n); n must be positive.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(n));
}

// Standard normal via Box-Muller.
inline double standard_normal(std::mt19937_64& rng) {
  double u1 = unit_uniform(rng);
  while (u1 <= 0.0) u1 = unit_uniform(rng);
  const double u2 = unit_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// Fisher-Yates permutation of 0..n-1.
inline std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
  return idx;
}

}  // namespace ballast

#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "erckit/hash.hpp"

namespace erckit {

// mt19937_64 output is pinned by the standard; everything layered on top of
// it here avoids std distributions, whose output is implementation defined.
using Rng = std::mt19937_64;

/// Derive an independent deterministic stream from a run seed and a purpose
/// tag ("stage2_shuffle", "mix/ratio/1-2", ...).
inline Rng make_rng(std::uint64_t seed, std::string_view stream) {
  std::uint64_t h = fnv1a64(stream);
  h ^= seed + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return Rng(h);
}

/// Uniform draw from [0, n) by rejection sampling; bit-stable everywhere.
inline std::uint64_t bounded(Rng& rng, std::uint64_t n) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t excess = (max % n + 1) % n;  // 2^64 mod n
  const std::uint64_t cutoff = 0 - excess;         // wraps to 0 when excess == 0
  for (;;) {
    std::uint64_t r = rng();
    if (excess == 0 || r < cutoff) return r % n;
  }
}

template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(bounded(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

/// First k positions of a seeded partial Fisher-Yates pass over [0, n):
/// a uniform sample without replacement, in selection order.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k,
                                               Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (k > n) k = n;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(bounded(rng, n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace erckit

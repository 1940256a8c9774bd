#pragma once

#include "gsdie/errors.hpp"
#include "gsdie/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace gsdie {

// SplitMix64. Self-contained so that seeded results are identical across
// standard libraries and platforms (std distributions are not pinned).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform double in (lo, hi].
  double uniform_open_closed(double lo, double hi) {
    return hi - (hi - lo) * uniform01();
  }

  // Uniform integer in [0, n) by rejection, bias-free.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw InputError("SplitMix64::below: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller; the spare draw is discarded.
  double normal() {
    double u1 = uniform01();
    while (u1 == 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

 private:
  std::uint64_t state_;
};

// Independent per-item seed stream, used by Monte-Carlo repeats.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  SplitMix64 rng(base ^ (0x632be59bd9b4e019ULL + index * 0x9e3779b97f4a7c15ULL));
  return rng.next();
}

// Draws `count` distinct elements uniformly from `pool` (partial Fisher-Yates),
// returned sorted ascending so equal sets are bit-identical regardless of the
// draw order.
inline IndexList sample_without_replacement(SplitMix64& rng, IndexList pool,
                                            std::size_t count) {
  if (count > pool.size())
    throw InputError("sample_without_replacement: pool smaller than requested count");
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace gsdie

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "iflh/geometry.hpp"

namespace iflh {

// Deterministic random source used throughout the harness. Everything
// is derived from the raw mt19937_64 word stream with fixed formulas
// (see the README) so a port to another language can reproduce the
// exact same streams from the same seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // 53-bit mantissa uniform in [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // inclusive bounds, unbiased via rejection below the largest multiple
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw InvalidParameter("uniform_int requires lo <= hi");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1u;
    if (span == 0) return lo + static_cast<std::int64_t>(next_u64());  // full 64-bit range
    const std::uint64_t limit = (UINT64_MAX / span) * span;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return lo + static_cast<std::int64_t>(x % span);
  }

  // Box-Muller, consumes exactly two words per call
  double gaussian() {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Vec gaussian_vec(int d) {
    Vec g(d);
    for (int i = 0; i < d; ++i) g[i] = gaussian();
    return g;
  }

  Vec unit_vector(int d) {
    for (;;) {
      Vec g = gaussian_vec(d);
      const double n = g.norm();
      if (n > 1e-12) return g / n;
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace iflh

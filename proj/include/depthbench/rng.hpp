#pragma once

#include <cmath>
#include <cstdint>

namespace depthbench {

// Deterministic 64-bit stream generator (splitmix64 finalizer over an
// incrementing state). Every randomized component in the library draws from
// this generator so that seeded runs replay identically on any platform.
//
// Draw discipline, pinned for external reproducibility:
//   next()              one 64-bit word
//   next_below(n)       one word, mapped to [0, n) by 128-bit multiply-high
//   next_int(lo, hi)    one word, inclusive bounds
//   next_unit()         one word, 53-bit mantissa in [0, 1)
//   next_normal()       two words, Box-Muller (cosine branch)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Multiply-high mapping; bias is O(n / 2^64).
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform integer in [lo, hi], bounds inclusive.
  std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1u;
    return lo + static_cast<std::int64_t>(next_below(span));
  }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Standard normal deviate; consumes exactly two words.
  double next_normal() {
    const double u1 = 1.0 - next_unit();  // (0, 1]
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace depthbench

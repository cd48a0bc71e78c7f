#pragma once

#include <cstdint>
#include <random>

namespace coconet {

/// Deterministic uniform source. std::mt19937_64 output is fully specified
/// by the standard; the double conversion below avoids
/// std::uniform_real_distribution, whose mapping is implementation-defined.
/// Same seed, same sequence, on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Modulo bias is negligible for the small n
  /// used here (n << 2^32).
  int below(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

  /// Random subset of {0, ..., n-1} as a bitmask, n <= 32.
  std::uint32_t subset(int n) {
    const std::uint64_t raw = gen_();
    if (n >= 32) return static_cast<std::uint32_t>(raw);
    return static_cast<std::uint32_t>(raw & ((1ull << n) - 1ull));
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace coconet

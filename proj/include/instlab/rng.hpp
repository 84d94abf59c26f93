#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace ilab {

/// Seeded generator with platform-independent draws (std::uniform_int_distribution
/// is not guaranteed to produce identical streams across standard libraries, so the
/// integer draws are done by hand on top of mt19937_64).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, n), n >= 1. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform integer in [lo, hi] inclusive.
  long long int_range(long long lo, long long hi) {
    return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  /// Uniform double in [0, 1).
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [-1, 1).
  double sym_unit() { return 2.0 * unit() - 1.0; }

  std::complex<double> complex_unit() { return {sym_unit(), sym_unit()}; }

  /// Derive an independent child stream (for per-task seeding).
  Rng fork() { return Rng(eng_() ^ 0x9e3779b97f4a7c15ull); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace ilab

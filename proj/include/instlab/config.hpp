#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ilab {

inline constexpr const char* kToolVersion = "0.1.0";

/// Default relative tolerance for the complex-float backend.
inline constexpr double kDefaultTolerance = 1e-8;

/// Default modulus for the prime-field backend (the Mersenne prime 2^61-1).
inline constexpr std::uint64_t kDefaultPrime = (std::uint64_t{1} << 61) - 1;

// Exit codes used by the CLI: 0 = all assertions pass, 1 = a mathematical
// assertion failed, 2 = invalid input, 3 = numerical non-convergence.
enum class ExitCode : int { Ok = 0, MathFailure = 1, InvalidInput = 2, NoConvergence = 3 };

struct InvalidInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A mathematical assertion that should hold by theorem failed at runtime.
/// Surfacing one of these is a finding, not a crash.
struct MathFindingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Runtime knobs. Environment overrides: INSTLAB_TOLERANCE, INSTLAB_PRIME.
struct Config {
  double tolerance = kDefaultTolerance;
  std::uint64_t prime = kDefaultPrime;

  static Config& get();
  static void load_env();
};

bool is_prime_u64(std::uint64_t n);

}  // namespace ilab

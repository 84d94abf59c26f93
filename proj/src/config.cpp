#include "instlab/config.hpp"

#include <cstdlib>

namespace ilab {

Config& Config::get() {
  static Config cfg;
  return cfg;
}

void Config::load_env() {
  Config& cfg = get();
  if (const char* t = std::getenv("INSTLAB_TOLERANCE")) {
    char* end = nullptr;
    double v = std::strtod(t, &end);
    if (end == t || v <= 0.0) throw InvalidInputError("INSTLAB_TOLERANCE must be a positive real");
    cfg.tolerance = v;
  }
  if (const char* p = std::getenv("INSTLAB_PRIME")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(p, &end, 10);
    if (end == p || !is_prime_u64(v) || v < (1ull << 31))
      throw InvalidInputError("INSTLAB_PRIME must be a prime >= 2^31");
    cfg.prime = v;
  }
}

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

// Deterministic Miller-Rabin for 64-bit integers.
bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 0; i + 1 < s; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

}  // namespace ilab

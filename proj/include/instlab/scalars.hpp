#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <string>
#include <type_traits>

#include "instlab/config.hpp"
#include "instlab/rng.hpp"

namespace ilab {

/// Exact rational scalar (GMP-backed, always canonical).
using Rat = mpq_class;

/// Complex floating-point scalar.
using CD = std::complex<double>;

/// Prime-field scalar. The modulus is process-global (set once at startup);
/// the default is the Mersenne prime 2^61-1, large enough that randomized
/// rank computations agree with the rational ones with probability 1 in
/// practice.
class Fp {
 public:
  Fp() : v_(0) {}
  Fp(long long x) {
    long long m = static_cast<long long>(modulus());
    long long r = x % m;
    if (r < 0) r += m;
    v_ = static_cast<std::uint64_t>(r);
  }
  static Fp from_raw(std::uint64_t v) {
    Fp f;
    f.v_ = v % modulus();
    return f;
  }

  static std::uint64_t modulus() { return Config::get().prime; }

  std::uint64_t raw() const { return v_; }

  friend Fp operator+(Fp a, Fp b) {
    std::uint64_t s = a.v_ + b.v_;
    if (s >= modulus() || s < a.v_) s -= modulus();
    return from_raw_trusted(s);
  }
  friend Fp operator-(Fp a, Fp b) {
    return from_raw_trusted(a.v_ >= b.v_ ? a.v_ - b.v_ : a.v_ + modulus() - b.v_);
  }
  friend Fp operator*(Fp a, Fp b) {
    return from_raw_trusted(static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a.v_) * b.v_) % modulus()));
  }
  friend Fp operator/(Fp a, Fp b) { return a * b.inverse(); }
  Fp operator-() const { return from_raw_trusted(v_ == 0 ? 0 : modulus() - v_); }
  Fp& operator+=(Fp o) { return *this = *this + o; }
  Fp& operator-=(Fp o) { return *this = *this - o; }
  Fp& operator*=(Fp o) { return *this = *this * o; }
  Fp& operator/=(Fp o) { return *this = *this / o; }
  friend bool operator==(Fp a, Fp b) { return a.v_ == b.v_; }
  friend bool operator!=(Fp a, Fp b) { return a.v_ != b.v_; }

  Fp inverse() const {
    if (v_ == 0) throw InvalidInputError("Fp: division by zero");
    // extended Euclid on (v, p)
    long long t = 0, nt = 1;
    long long r = static_cast<long long>(modulus()), nr = static_cast<long long>(v_);
    while (nr != 0) {
      long long q = r / nr;
      long long tmp = t - q * nt;
      t = nt;
      nt = tmp;
      tmp = r - q * nr;
      r = nr;
      nr = tmp;
    }
    if (t < 0) t += static_cast<long long>(modulus());
    return from_raw_trusted(static_cast<std::uint64_t>(t));
  }

 private:
  static Fp from_raw_trusted(std::uint64_t v) {
    Fp f;
    f.v_ = v;
    return f;
  }
  std::uint64_t v_;
};

// ---- scalar traits -------------------------------------------------------

template <class T>
inline constexpr bool is_exact_v = !std::is_same_v<T, CD>;

template <class T>
T scalar_from_int(long long n) {
  if constexpr (std::is_same_v<T, Rat>) return Rat(static_cast<long>(n));
  else if constexpr (std::is_same_v<T, Fp>) return Fp(n);
  else return CD(static_cast<double>(n), 0.0);
}

template <class T>
bool scalar_is_zero(const T& x) {
  if constexpr (std::is_same_v<T, Rat>) return sgn(x) == 0;
  else if constexpr (std::is_same_v<T, Fp>) return x == Fp();
  else return x == CD(0.0, 0.0);
}

/// Magnitude used for float pivot selection; exact scalars only need a
/// zero/nonzero distinction but a consistent value is convenient.
template <class T>
double scalar_abs(const T& x) {
  if constexpr (std::is_same_v<T, Rat>) return std::abs(x.get_d());
  else if constexpr (std::is_same_v<T, Fp>) return x.raw() == 0 ? 0.0 : 1.0;
  else return std::abs(x);
}

inline CD rat_to_cd(const Rat& x) { return CD(x.get_d(), 0.0); }

/// Reduction mod p; the (tiny) denominators occurring in practice are
/// invertible mod the ~2^61 default prime.
inline Fp rat_to_fp(const Rat& x) {
  const mpz_class& num = x.get_num();
  const mpz_class& den = x.get_den();
  mpz_class p(static_cast<unsigned long>(Fp::modulus() >> 32));
  p <<= 32;
  p += static_cast<unsigned long>(Fp::modulus() & 0xffffffffull);
  mpz_class nm = num % p;
  if (nm < 0) nm += p;
  mpz_class dm = den % p;
  if (dm == 0) throw InvalidInputError("rat_to_fp: denominator divisible by the prime");
  Fp n = Fp::from_raw(nm.get_ui());
  Fp d = Fp::from_raw(dm.get_ui());
  return n / d;
}

/// Parse "p/q" or "p" (canonicalizes; rejects q = 0).
inline Rat rat_parse(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) throw InvalidInputError("bad rational literal: " + s);
  if (r.get_den() == 0) throw InvalidInputError("zero denominator: " + s);
  r.canonicalize();
  return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

/// Random rational with numerator in [-span, span] and denominator in [1, dmax].
inline Rat random_rat(Rng& rng, long long span = 10, long long dmax = 1) {
  long num = static_cast<long>(rng.int_range(-span, span));
  long den = dmax <= 1 ? 1 : static_cast<long>(rng.int_range(1, dmax));
  Rat r(num, den);
  r.canonicalize();
  return r;
}

template <class T>
T random_scalar(Rng& rng, long long span = 10) {
  if constexpr (std::is_same_v<T, Rat>) return random_rat(rng, span);
  else if constexpr (std::is_same_v<T, Fp>) return Fp(rng.int_range(-span, span));
  else return rng.complex_unit();
}

}  // namespace ilab

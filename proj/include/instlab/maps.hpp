#pragma once

#include "instlab/floatops.hpp"
#include "instlab/matrix.hpp"
#include "instlab/tensors.hpp"

namespace ilab {

/// beta: the (4k) x (2k+2) matrix flat(A) . J; column l is the coefficient
/// vector of the contraction of A with h_l through the symplectic form.
template <class T>
Mat<T> symplectic_pairing(const ATensor<T>& t) {
  return t.flat() * sympl_gram<T>(t.k);
}

/// epsilon: the (2k+2) x (4k) matrix flat(A)^T; column (i,j) evaluates A on
/// f_i (x) b_j.
template <class T>
Mat<T> evaluation_map(const ATensor<T>& t) {
  return t.flat().transpose();
}

/// beta applied to one h, reshaped to the 4 x k covector-pair grid.
template <class T>
Mat<T> beta_apply(const ATensor<T>& t, const Mat<T>& h) {
  Mat<T> v = symplectic_pairing(t) * h;
  Mat<T> out(4, static_cast<std::size_t>(t.k));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < t.k; ++j)
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          v(static_cast<std::size_t>(i * t.k + j), 0);
  return out;
}

/// epsilon applied to a 4 x k vector-pair grid; returns a column in C^{2k+2}.
template <class T>
Mat<T> epsilon_apply(const ATensor<T>& t, const Mat<T>& fb) {
  Mat<T> v(static_cast<std::size_t>(4 * t.k), 1);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < t.k; ++j)
      v(static_cast<std::size_t>(i * t.k + j), 0) =
          fb(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return evaluation_map(t) * v;
}

enum class QuadricMode { Coefficient, MatrixOfForms };

/// gamma: the quadratic monad condition. The value is the collection of
/// quadrics (F(x) J F(x)^T)_{rs}, r < s; its vanishing says the monad
/// sequence is a complex. Both evaluation modes return the same symmetric
/// quadric matrices (the test suite calibrates and asserts the agreement
/// constant once per charge).
template <class T>
SymForm<T> monad_quadric(const ATensor<T>& t, QuadricMode mode = QuadricMode::MatrixOfForms) {
  const int k = t.k, n = t.h_dim();
  SymForm<T> out(k);
  if (mode == QuadricMode::MatrixOfForms) {
    Mat<T> p = symplectic_pairing(t) * t.flat().transpose();  // 4k x 4k
    auto at = [&](int m, int r, int nn, int s) -> const T& {
      return p(static_cast<std::size_t>(m * k + r), static_cast<std::size_t>(nn * k + s));
    };
    T half = scalar_from_int<T>(1) / scalar_from_int<T>(2);
    for (int r = 0; r < k; ++r)
      for (int s = r + 1; s < k; ++s) {
        Mat<T>& q = out.quads[wedge_index(r, s, k)];
        for (int m = 0; m < 4; ++m)
          for (int nn = m; nn < 4; ++nn) {
            T v = (at(m, r, nn, s) + at(nn, r, m, s)) * half;
            q(static_cast<std::size_t>(m), static_cast<std::size_t>(nn)) = v;
            q(static_cast<std::size_t>(nn), static_cast<std::size_t>(m)) = v;
          }
      }
    return out;
  }
  // Coefficient mode: the defining sum over all pairs of coefficient terms,
  // with the 1/2 of the quadratic map and the symmetric split of f_i* f_{i'}*.
  Mat<T> j = sympl_gram<T>(k);
  T quarter = scalar_from_int<T>(1) / scalar_from_int<T>(4);
  for (int i = 0; i < 4; ++i)
    for (int jj = 0; jj < k; ++jj)
      for (int l = 0; l < n; ++l) {
        const T& a1 = t.at(i, jj, l);
        if (scalar_is_zero(a1)) continue;
        for (int i2 = 0; i2 < 4; ++i2)
          for (int j2 = 0; j2 < k; ++j2) {
            if (j2 == jj) continue;
            int r = jj < j2 ? jj : j2, s = jj < j2 ? j2 : jj;
            T sign = scalar_from_int<T>(jj < j2 ? 1 : -1);
            Mat<T>& q = out.quads[wedge_index(r, s, k)];
            for (int l2 = 0; l2 < n; ++l2) {
              const T& w = j(static_cast<std::size_t>(l), static_cast<std::size_t>(l2));
              if (scalar_is_zero(w)) continue;
              T c = a1 * t.at(i2, j2, l2) * w * sign * quarter;
              q(static_cast<std::size_t>(i), static_cast<std::size_t>(i2)) += c;
              q(static_cast<std::size_t>(i2), static_cast<std::size_t>(i)) += c;
            }
          }
      }
  return out;
}

/// Row index of the quadric coordinate (pair (r,s), monomial (l,p)).
inline std::size_t quadric_coord_index(int r, int s, int l, int p, int k) {
  return wedge_index(r, s, k) * kSymPairCount + static_cast<std::size_t>(sym4_index(l, p));
}

/// d gamma at A: the matrix of B -> gamma(A+B) - gamma(A) - gamma(B) from
/// A-space coordinates to quadric (monomial) coordinates. 5k(k-1) rows by
/// 8k^2+8k columns.
template <class T>
Mat<T> monad_quadric_diff(const ATensor<T>& t) {
  const int k = t.k, n = t.h_dim();
  Mat<T> beta = symplectic_pairing(t);
  Mat<T> out(wedge_count(k) * kSymPairCount, t.dim());
  T half = scalar_from_int<T>(1) / scalar_from_int<T>(2);
  auto b = [&](int m, int r, int l0) -> const T& {
    return beta(static_cast<std::size_t>(m * k + r), static_cast<std::size_t>(l0));
  };
  for (int r = 0; r < k; ++r)
    for (int s = r + 1; s < k; ++s)
      for (auto [l, p] : sym4_pairs()) {
        std::size_t row = quadric_coord_index(r, s, l, p, k);
        T weight = scalar_from_int<T>(l == p ? 1 : 2) * half;
        for (int j0 = 0; j0 < k; ++j0) {
          if (j0 != r && j0 != s) continue;
          for (int i0 = 0; i0 < 4; ++i0)
            for (int l0 = 0; l0 < n; ++l0) {
              T v = scalar_from_int<T>(0);
              if (p == i0 && s == j0) v += b(l, r, l0);
              if (l == i0 && r == j0) v -= b(p, s, l0);
              if (l == i0 && s == j0) v += b(p, r, l0);
              if (p == i0 && r == j0) v -= b(l, s, l0);
              if (!scalar_is_zero(v))
                out(row, static_cast<std::size_t>((i0 * k + j0) * n + l0)) = v * weight;
            }
        }
      }
  return out;
}

/// rho(S, .) applied to a covector pair B (4 x k coefficients of
/// C^{4*} (x) C^{k*}); the result is a 4 x k coefficient array in
/// C^4 (x) C^k. Linear extension of the defining contraction over the
/// coefficient grid of S.
template <class T>
Mat<T> contract(const SymTensor<T>& s, const Mat<T>& b) {
  const int k = s.k;
  Mat<T> out(4, static_cast<std::size_t>(k));
  T four = scalar_from_int<T>(4);
  for (int q = 0; q < k; ++q) {
    for (int j = 0; j < k; ++j) {
      if (j == q) continue;
      Mat<T> blk = s.block_ext(j, q);
      for (int p = 0; p < 4; ++p) {
        T acc = scalar_from_int<T>(0);
        for (int i = 0; i < 4; ++i)
          acc += blk(static_cast<std::size_t>(i), static_cast<std::size_t>(p)) *
                 b(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        out(static_cast<std::size_t>(p), static_cast<std::size_t>(q)) += four * acc;
      }
    }
  }
  return out;
}

/// The 4k x 4k matrix of rho(S, .), rows (p,q) by columns (i,j).
template <class T>
Mat<T> contraction_map(const SymTensor<T>& s) {
  const int k = s.k;
  Mat<T> m(static_cast<std::size_t>(4 * k), static_cast<std::size_t>(4 * k));
  T four = scalar_from_int<T>(4);
  for (int j = 0; j < k; ++j)
    for (int q = 0; q < k; ++q) {
      if (j == q) continue;
      Mat<T> blk = s.block_ext(j, q);
      for (int p = 0; p < 4; ++p)
        for (int i = 0; i < 4; ++i)
          m(static_cast<std::size_t>(p * k + q), static_cast<std::size_t>(i * k + j)) =
              four * blk(static_cast<std::size_t>(i), static_cast<std::size_t>(p));
    }
  return m;
}

/// sigma: k x k grid of symmetric 4 x 4 blocks (block (i,j) at rows
/// 4i..4i+3, cols 4j..4j+3); skew-symmetric as a 4k x 4k matrix.
template <class T>
Mat<T> flattening_sigma(const SymTensor<T>& s) {
  const int k = s.k;
  Mat<T> m(static_cast<std::size_t>(4 * k), static_cast<std::size_t>(4 * k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      m.set_block(static_cast<std::size_t>(4 * i), static_cast<std::size_t>(4 * j), s.block_ext(i, j));
    }
  return m;
}

/// sigma-hat: 4 x 4 grid of skew k x k blocks; the (l,p) block has entries
/// sigma^{ij}_{lp}. A pure entry rearrangement of sigma, also skew.
template <class T>
Mat<T> flattening_sigma_hat(const SymTensor<T>& s) {
  const int k = s.k;
  Mat<T> m(static_cast<std::size_t>(4 * k), static_cast<std::size_t>(4 * k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      Mat<T> blk = s.block_ext(i, j);
      for (int l = 0; l < 4; ++l)
        for (int p = 0; p < 4; ++p)
          m(static_cast<std::size_t>(l * k + i), static_cast<std::size_t>(p * k + j)) =
              blk(static_cast<std::size_t>(l), static_cast<std::size_t>(p));
    }
  return m;
}

/// One k x k block of sigma-hat: entries sigma^{ij}_{lp} over (i,j) at a
/// fixed symmetric position (l,p). Skew.
template <class T>
Mat<T> sigma_hat_block(const SymTensor<T>& s, int l, int p) {
  const int k = s.k;
  Mat<T> m(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          s.block_ext(i, j)(static_cast<std::size_t>(l), static_cast<std::size_t>(p));
    }
  return m;
}

/// rk(S): the common rank of the contraction map and both flattenings
/// (asserted equal; always even since the flattenings are skew).
template <class T>
std::size_t flattening_rank(const SymTensor<T>& s) {
  std::size_t r;
  if constexpr (is_exact_v<T>) {
    r = rank(contraction_map(s));
    if (r != rank(flattening_sigma(s)) || r != rank(flattening_sigma_hat(s)))
      throw MathFindingError("flattening_rank: flattening ranks disagree");
  } else {
    r = rank_svd(contraction_map(s));
  }
  return r;
}

/// xi(A, S): slicewise contraction of A against S; the h-index passes
/// through untouched.
template <class T>
CTensor<T> obstruction_apply(const ATensor<T>& t, const SymTensor<T>& s) {
  const int k = t.k, n = t.h_dim();
  CTensor<T> out(k);
  for (int l = 0; l < n; ++l) {
    Mat<T> r = contract(s, t.slice_h(l));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < k; ++j) out.at(i, j, l) = r(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  return out;
}

/// The (8k^2+8k) x 5k(k-1) matrix of S -> xi(A, S) in grid coordinates.
template <class T>
Mat<T> obstruction_map(const ATensor<T>& t) {
  const int k = t.k;
  const std::size_t sdim = wedge_count(k) * kSymPairCount;
  Mat<T> m(t.dim(), sdim);
  for (std::size_t c = 0; c < sdim; ++c) {
    Mat<T> unit(sdim, 1);
    unit(c, 0) = scalar_from_int<T>(1);
    CTensor<T> col = obstruction_apply(t, SymTensor<T>::from_vec(k, unit));
    for (std::size_t r = 0; r < col.dim(); ++r) m(r, c) = col.vec()(r, 0);
  }
  return m;
}

/// kappa: contraction of a covariant tensor against h through the
/// symplectic form; returns the 4 x k coefficient array.
template <class T>
Mat<T> omega_contract(const CTensor<T>& c, const Mat<T>& h) {
  const int k = c.k, n = c.h_dim();
  Mat<T> jh = sympl_gram<T>(k) * h;
  Mat<T> out(4, static_cast<std::size_t>(k));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < k; ++j) {
      T acc = scalar_from_int<T>(0);
      for (int l = 0; l < n; ++l) acc += c.at(i, j, l) * jh(static_cast<std::size_t>(l), 0);
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = acc;
    }
  return out;
}

/// tau0(A, S, h) = kappa(xi(A, S), h).
template <class T>
Mat<T> triple_contract(const ATensor<T>& t, const SymTensor<T>& s, const Mat<T>& h) {
  return omega_contract(obstruction_apply(t, s), h);
}

/// Symplectic lowering of the h-index of a covariant tensor; pairing the
/// result against A-space coordinates with a plain dot product realizes the
/// invariant pairing between the two spaces.
template <class T>
Mat<T> omega_lower(const CTensor<T>& c) {
  const int k = c.k, n = c.h_dim();
  Mat<T> j = sympl_gram<T>(k);
  Mat<T> v(c.dim(), 1);
  for (int i = 0; i < 4; ++i)
    for (int jj = 0; jj < k; ++jj)
      for (int m = 0; m < n; ++m) {
        T acc = scalar_from_int<T>(0);
        for (int l = 0; l < n; ++l)
          acc += j(static_cast<std::size_t>(m), static_cast<std::size_t>(l)) * c.at(i, jj, l);
        v(static_cast<std::size_t>((i * k + jj) * n + m), 0) = acc;
      }
  return v;
}

/// The two sides of the adjointness identity for one triple: the pairing of
/// dgamma_A(B) against S, and of B against the symplectically lowered
/// xi(A, S). Their ratio is one fixed constant (calibrated by the tests).
template <class T>
std::pair<T, T> adjoint_pairing(const ATensor<T>& a, const ATensor<T>& b, const SymTensor<T>& s) {
  SymForm<T> ab = monad_quadric(a + b) - monad_quadric(a) - monad_quadric(b);
  T lhs = dot(ab.vec(), s.vec());
  T rhs = dot(b.vec(), omega_lower(obstruction_apply(a, s)));
  return {lhs, rhs};
}

}  // namespace ilab

#pragma once

#include <cassert>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "instlab/scalars.hpp"

namespace ilab {

/// Dense row-major matrix over one scalar backend. Values are immutable in
/// spirit: every operation below returns a fresh matrix.
template <class T>
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), e_(rows * cols, scalar_from_int<T>(0)) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = scalar_from_int<T>(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return e_[r * cols_ + c];
  }
  const T& operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return e_[r * cols_ + c];
  }

  bool operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
  }

  bool is_zero() const {
    for (const T& x : e_)
      if (!scalar_is_zero(x)) return false;
    return true;
  }

  bool is_symmetric() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if (!scalar_is_zero(T((*this)(i, j) - (*this)(j, i)))) return false;
    return true;
  }

  /// Skew-symmetry with an exactly-zero diagonal (all backends).
  bool is_skew() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!scalar_is_zero((*this)(i, i))) return false;
      for (std::size_t j = i + 1; j < cols_; ++j)
        if (!scalar_is_zero(T((*this)(i, j) + (*this)(j, i)))) return false;
    }
    return true;
  }

  Mat transpose() const {
    Mat t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  Mat operator*(const Mat& o) const {
    assert(cols_ == o.rows_);
    Mat p(rows_, o.cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t k = 0; k < cols_; ++k) {
        const T& a = (*this)(r, k);
        if (scalar_is_zero(a)) continue;
        for (std::size_t c = 0; c < o.cols_; ++c) p(r, c) += a * o(k, c);
      }
    return p;
  }

  Mat operator+(const Mat& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    Mat s = *this;
    for (std::size_t i = 0; i < e_.size(); ++i) s.e_[i] += o.e_[i];
    return s;
  }

  Mat operator-(const Mat& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    Mat s = *this;
    for (std::size_t i = 0; i < e_.size(); ++i) s.e_[i] -= o.e_[i];
    return s;
  }

  Mat operator-() const {
    Mat s = *this;
    for (auto& x : s.e_) x = -x;
    return s;
  }

  Mat scaled(const T& a) const {
    Mat s = *this;
    for (auto& x : s.e_) x *= a;
    return s;
  }

  Mat col(std::size_t c) const {
    Mat v(rows_, 1);
    for (std::size_t r = 0; r < rows_; ++r) v(r, 0) = (*this)(r, c);
    return v;
  }

  Mat row(std::size_t r) const {
    Mat v(1, cols_);
    for (std::size_t c = 0; c < cols_; ++c) v(0, c) = (*this)(r, c);
    return v;
  }

  Mat block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    assert(r0 + nr <= rows_ && c0 + nc <= cols_);
    Mat b(nr, nc);
    for (std::size_t r = 0; r < nr; ++r)
      for (std::size_t c = 0; c < nc; ++c) b(r, c) = (*this)(r0 + r, c0 + c);
    return b;
  }

  void set_block(std::size_t r0, std::size_t c0, const Mat& b) {
    assert(r0 + b.rows() <= rows_ && c0 + b.cols() <= cols_);
    for (std::size_t r = 0; r < b.rows(); ++r)
      for (std::size_t c = 0; c < b.cols(); ++c) (*this)(r0 + r, c0 + c) = b(r, c);
  }

  double max_abs() const {
    double m = 0.0;
    for (const T& x : e_) m = std::max(m, scalar_abs(x));
    return m;
  }

  const std::vector<T>& data() const { return e_; }
  std::vector<T>& data() { return e_; }

 private:
  std::size_t rows_, cols_;
  std::vector<T> e_;
};

template <class T>
Mat<T> hstack(const Mat<T>& a, const Mat<T>& b) {
  assert(a.rows() == b.rows());
  Mat<T> m(a.rows(), a.cols() + b.cols());
  m.set_block(0, 0, a);
  m.set_block(0, a.cols(), b);
  return m;
}

template <class T>
Mat<T> vstack(const Mat<T>& a, const Mat<T>& b) {
  assert(a.cols() == b.cols());
  Mat<T> m(a.rows() + b.rows(), a.cols());
  m.set_block(0, 0, a);
  m.set_block(a.rows(), 0, b);
  return m;
}

/// Outer product grid of two columns.
template <class T>
Mat<T> outer(const Mat<T>& f, const Mat<T>& b) {
  Mat<T> m(f.rows(), b.rows());
  for (std::size_t i = 0; i < f.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) m(i, j) = f(i, 0) * b(j, 0);
  return m;
}

template <class T>
T dot(const Mat<T>& a, const Mat<T>& b) {
  assert(a.rows() == b.rows() && a.cols() == 1 && b.cols() == 1);
  T s = scalar_from_int<T>(0);
  for (std::size_t r = 0; r < a.rows(); ++r) s += a(r, 0) * b(r, 0);
  return s;
}

// ---- elimination ---------------------------------------------------------

/// In-place reduced row echelon form. Pivoting is deterministic: the first
/// row with a nonzero entry for exact backends, the largest magnitude for
/// complex-float (entries below eps are treated as zero there).
/// Returns the pivot columns.
template <class T>
std::vector<std::size_t> rref_in_place(Mat<T>& m, double eps = 0.0) {
  std::vector<std::size_t> pivots;
  const std::size_t nr = m.rows(), nc = m.cols();
  if constexpr (!is_exact_v<T>) {
    if (eps <= 0.0) eps = Config::get().tolerance * std::max(1.0, m.max_abs());
  }
  std::size_t row = 0;
  for (std::size_t col = 0; col < nc && row < nr; ++col) {
    std::size_t sel = nr;
    if constexpr (is_exact_v<T>) {
      for (std::size_t r = row; r < nr; ++r)
        if (!scalar_is_zero(m(r, col))) {
          sel = r;
          break;
        }
    } else {
      double best = eps;
      for (std::size_t r = row; r < nr; ++r) {
        double a = scalar_abs(m(r, col));
        if (a > best) {
          best = a;
          sel = r;
        }
      }
    }
    if (sel == nr) continue;
    if (sel != row)
      for (std::size_t c = 0; c < nc; ++c) std::swap(m(row, c), m(sel, c));
    T inv = scalar_from_int<T>(1) / m(row, col);
    for (std::size_t c = col; c < nc; ++c) m(row, c) *= inv;
    m(row, col) = scalar_from_int<T>(1);
    for (std::size_t r = 0; r < nr; ++r) {
      if (r == row) continue;
      T f = m(r, col);
      if (scalar_is_zero(f)) continue;
      for (std::size_t c = col; c < nc; ++c) m(r, c) -= f * m(row, c);
      m(r, col) = scalar_from_int<T>(0);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

namespace detail {

/// Fraction-free (Bareiss) elimination on an integer matrix; returns the rank.
inline std::size_t bareiss_rank(std::vector<std::vector<mpz_class>>& a) {
  const std::size_t nr = a.size();
  if (nr == 0) return 0;
  const std::size_t nc = a[0].size();
  mpz_class prev = 1;
  std::size_t row = 0;
  for (std::size_t col = 0; col < nc && row < nr; ++col) {
    std::size_t sel = nr;
    for (std::size_t r = row; r < nr; ++r)
      if (a[r][col] != 0) {
        sel = r;
        break;
      }
    if (sel == nr) continue;
    if (sel != row) std::swap(a[sel], a[row]);
    for (std::size_t r = row + 1; r < nr; ++r) {
      for (std::size_t c = col + 1; c < nc; ++c) {
        mpz_class v = a[row][col] * a[r][c] - a[r][col] * a[row][c];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        a[r][c] = v;
      }
      a[r][col] = 0;
    }
    prev = a[row][col];
    ++row;
  }
  return row;
}

}  // namespace detail

/// Exact row rank. Rationals go through fraction-free elimination on the
/// denominator-cleared integer matrix; the prime field uses plain Gaussian
/// elimination. The complex-float overload lives in floatops (SVD-based).
template <class T>
std::size_t rank(const Mat<T>& m) {
  static_assert(is_exact_v<T>, "float rank is SVD-based, see floatops");
  if constexpr (std::is_same_v<T, Rat>) {
    std::vector<std::vector<mpz_class>> a(m.rows(), std::vector<mpz_class>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
      mpz_class l = 1;
      for (std::size_t c = 0; c < m.cols(); ++c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(r, c).get_den().get_mpz_t());
      for (std::size_t c = 0; c < m.cols(); ++c) {
        mpz_class scaled = m(r, c).get_num() * (l / m(r, c).get_den());
        a[r][c] = scaled;
      }
    }
    return detail::bareiss_rank(a);
  } else {
    Mat<T> w = m;
    return rref_in_place(w).size();
  }
}

/// Basis of the right kernel; one column per free variable of the echelon
/// form, with a unit entry at that variable (deterministic across runs).
template <class T>
std::vector<Mat<T>> kernel_basis(const Mat<T>& m, double eps = 0.0) {
  Mat<T> r = m;
  std::vector<std::size_t> pivots = rref_in_place(r, eps);
  std::vector<bool> is_pivot(m.cols(), false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  std::vector<Mat<T>> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    Mat<T> v(m.cols(), 1);
    v(free, 0) = scalar_from_int<T>(1);
    for (std::size_t p = 0; p < pivots.size(); ++p) v(pivots[p], 0) = -r(p, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Some solution x of Mx = b, or nullopt when the system is inconsistent.
template <class T>
std::optional<Mat<T>> solve_affine(const Mat<T>& m, const Mat<T>& b, double eps = 0.0) {
  if (m.rows() != b.rows() || b.cols() != 1) throw InvalidInputError("solve_affine: shape mismatch");
  Mat<T> aug = hstack(m, b);
  std::vector<std::size_t> pivots = rref_in_place(aug, eps);
  if (!pivots.empty() && pivots.back() == m.cols()) return std::nullopt;
  Mat<T> x(m.cols(), 1);
  for (std::size_t p = 0; p < pivots.size(); ++p) x(pivots[p], 0) = aug(p, m.cols());
  return x;
}

/// Inverse of a square matrix over an exact backend; throws on singular input.
template <class T>
Mat<T> inverse(const Mat<T>& m) {
  static_assert(is_exact_v<T>);
  if (m.rows() != m.cols()) throw InvalidInputError("inverse: not square");
  Mat<T> aug = hstack(m, Mat<T>::identity(m.rows()));
  std::vector<std::size_t> pivots = rref_in_place(aug);
  if (pivots.size() != m.rows()) throw InvalidInputError("inverse: singular matrix");
  return aug.block(0, m.cols(), m.rows(), m.cols());
}

template <class T>
Mat<CD> to_complex(const Mat<T>& m) {
  Mat<CD> c(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if constexpr (std::is_same_v<T, Rat>) c(r, j) = rat_to_cd(m(r, j));
      else c(r, j) = m(r, j);
    }
  return c;
}

inline Mat<Fp> to_fp(const Mat<Rat>& m) {
  Mat<Fp> f(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) f(r, c) = rat_to_fp(m(r, c));
  return f;
}

template <class T>
Mat<T> random_matrix(Rng& rng, std::size_t rows, std::size_t cols, long long span = 10) {
  Mat<T> m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = random_scalar<T>(rng, span);
  return m;
}

}  // namespace ilab

#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "instlab/matrix.hpp"

namespace ilab {

// Fixed bases throughout: f_0..f_3 for C^4, b_0..b_{k-1} for C^k,
// h_0..h_{2k+1} for C^{2k+2}, each with its dual basis. The symplectic form
// on C^{2k+2} pairs h_i with h_{k+1+i}.

/// Gram matrix J of the symplectic form: J = [[0, I],[-I, 0]], J^2 = -I.
template <class T>
Mat<T> sympl_gram(int k) {
  const int n = 2 * k + 2;
  Mat<T> j(n, n);
  for (int i = 0; i < k + 1; ++i) {
    j(i, k + 1 + i) = scalar_from_int<T>(1);
    j(k + 1 + i, i) = scalar_from_int<T>(-1);
  }
  return j;
}

// ---- index bookkeeping ----------------------------------------------------

/// Unordered pairs (l, p) with l <= p over {0..3}, row-major: 10 of them.
inline constexpr int kSymPairCount = 10;

constexpr int sym4_index(int l, int p) {
  // l <= p assumed
  constexpr int off[4] = {0, 4, 7, 9};
  return off[l] + (p - l);
}

constexpr std::array<std::pair<int, int>, kSymPairCount> sym4_pairs() {
  return {{{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}}};
}

inline std::size_t wedge_count(int k) { return static_cast<std::size_t>(k) * (k - 1) / 2; }

/// Lexicographic index of the pair (i, j), i < j, over {0..k-1}.
inline std::size_t wedge_index(int i, int j, int k) {
  return static_cast<std::size_t>(i) * (2 * k - i - 1) / 2 + (j - i - 1);
}

inline std::vector<std::pair<int, int>> wedge_pairs(int k) {
  std::vector<std::pair<int, int>> ps;
  ps.reserve(wedge_count(k));
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) ps.emplace_back(i, j);
  return ps;
}

// ---- the monad datum -------------------------------------------------------

/// Element of C^{4*} (x) C^{k*} (x) C^{2k+2}: the coefficient grid a[i][j][l]
/// of the k x (2k+2) matrix of linear forms F(x)_{j,l} = sum_i a[i][j][l] x_i.
template <class T>
struct ATensor {
  int k = 0;
  std::vector<T> a;  // (i*k + j)*(2k+2) + l

  ATensor() = default;
  explicit ATensor(int kk) : k(kk), a(static_cast<std::size_t>(4 * kk * (2 * kk + 2)), scalar_from_int<T>(0)) {}

  int h_dim() const { return 2 * k + 2; }
  std::size_t dim() const { return a.size(); }  // 8k^2 + 8k

  T& at(int i, int j, int l) { return a[static_cast<std::size_t>((i * k + j) * h_dim() + l)]; }
  const T& at(int i, int j, int l) const {
    return a[static_cast<std::size_t>((i * k + j) * h_dim() + l)];
  }

  /// (4k) x (2k+2) matrix with rows indexed by (i, j).
  Mat<T> flat() const {
    Mat<T> m(static_cast<std::size_t>(4 * k), static_cast<std::size_t>(h_dim()));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < k; ++j)
        for (int l = 0; l < h_dim(); ++l) m(static_cast<std::size_t>(i * k + j), static_cast<std::size_t>(l)) = at(i, j, l);
    return m;
  }

  /// 4 x k slice at a fixed h-index.
  Mat<T> slice_h(int l) const {
    Mat<T> m(4, static_cast<std::size_t>(k));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < k; ++j) m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = at(i, j, l);
    return m;
  }

  /// Monad matrix F(x), k x (2k+2), for a point x in C^4.
  Mat<T> monad_matrix(const Mat<T>& x) const {
    Mat<T> f(static_cast<std::size_t>(k), static_cast<std::size_t>(h_dim()));
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < h_dim(); ++l) {
        T s = scalar_from_int<T>(0);
        for (int i = 0; i < 4; ++i) s += at(i, j, l) * x(static_cast<std::size_t>(i), 0);
        f(static_cast<std::size_t>(j), static_cast<std::size_t>(l)) = s;
      }
    return f;
  }

  Mat<T> vec() const {
    Mat<T> v(dim(), 1);
    for (std::size_t i = 0; i < a.size(); ++i) v(i, 0) = a[i];
    return v;
  }

  static ATensor from_vec(int k, const Mat<T>& v) {
    ATensor t(k);
    for (std::size_t i = 0; i < t.a.size(); ++i) t.a[i] = v(i, 0);
    return t;
  }

  ATensor scaled(const T& c) const {
    ATensor t = *this;
    for (T& x : t.a) x *= c;
    return t;
  }

  ATensor operator+(const ATensor& o) const {
    ATensor t = *this;
    for (std::size_t i = 0; i < a.size(); ++i) t.a[i] += o.a[i];
    return t;
  }

  bool is_zero() const {
    for (const T& x : a)
      if (!scalar_is_zero(x)) return false;
    return true;
  }
};

/// Element of C^4 (x) C^k (x) C^{2k+2} (covariant counterpart of ATensor).
template <class T>
struct CTensor {
  int k = 0;
  std::vector<T> c;

  CTensor() = default;
  explicit CTensor(int kk) : k(kk), c(static_cast<std::size_t>(4 * kk * (2 * kk + 2)), scalar_from_int<T>(0)) {}

  int h_dim() const { return 2 * k + 2; }
  std::size_t dim() const { return c.size(); }

  T& at(int i, int j, int l) { return c[static_cast<std::size_t>((i * k + j) * h_dim() + l)]; }
  const T& at(int i, int j, int l) const {
    return c[static_cast<std::size_t>((i * k + j) * h_dim() + l)];
  }

  Mat<T> vec() const {
    Mat<T> v(dim(), 1);
    for (std::size_t i = 0; i < c.size(); ++i) v(i, 0) = c[i];
    return v;
  }

  bool is_zero() const {
    for (const T& x : c)
      if (!scalar_is_zero(x)) return false;
    return true;
  }
};

// ---- obstruction directions ------------------------------------------------

/// Element of S^2 C^4 (x) Lambda^2 C^k in the coefficient-grid convention
/// S = sum over all (i,j,l,p) of s^{ij}_{lp} f_l f_p (x) b_i /\ b_j, with
/// s^{ij}_{lp} symmetric in (l,p) and skew in (i,j). Stored: one symmetric
/// 4x4 block per pair i < j; the extension s^{ji} = -s^{ij}, s^{ii} = 0 is
/// synthesized on access.
template <class T>
struct SymTensor {
  int k = 0;
  std::vector<Mat<T>> blocks;  // wedge_pairs(k) order, each 4x4 symmetric

  SymTensor() = default;
  explicit SymTensor(int kk) : k(kk), blocks(wedge_count(kk), Mat<T>(4, 4)) {}

  std::size_t dim() const { return wedge_count(k) * kSymPairCount; }  // 5k(k-1)

  const Mat<T>& stored(int i, int j) const { return blocks[wedge_index(i, j, k)]; }
  Mat<T>& stored(int i, int j) { return blocks[wedge_index(i, j, k)]; }

  /// Extended block, defined for any (i, j).
  Mat<T> block_ext(int i, int j) const {
    if (i == j) return Mat<T>(4, 4);
    if (i < j) return stored(i, j);
    return -stored(j, i);
  }

  /// The basis tensor f_l f_p (x) b_i /\ b_j (l <= p, i < j) in grid form.
  static SymTensor basis_term(int k, int l, int p, int i, int j) {
    SymTensor s(k);
    T quarter = scalar_from_int<T>(1) / scalar_from_int<T>(4);
    T half = scalar_from_int<T>(1) / scalar_from_int<T>(2);
    Mat<T>& b = s.stored(i, j);
    if (l == p) {
      b(static_cast<std::size_t>(l), static_cast<std::size_t>(l)) = half;
    } else {
      b(static_cast<std::size_t>(l), static_cast<std::size_t>(p)) = quarter;
      b(static_cast<std::size_t>(p), static_cast<std::size_t>(l)) = quarter;
    }
    return s;
  }

  /// Raw grid coordinates s^{ij}_{lp}, pair-major, l <= p inner.
  Mat<T> vec() const {
    Mat<T> v(dim(), 1);
    std::size_t idx = 0;
    for (const Mat<T>& b : blocks)
      for (auto [l, p] : sym4_pairs()) v(idx++, 0) = b(static_cast<std::size_t>(l), static_cast<std::size_t>(p));
    return v;
  }

  static SymTensor from_vec(int k, const Mat<T>& v) {
    SymTensor s(k);
    std::size_t idx = 0;
    for (Mat<T>& b : s.blocks)
      for (auto [l, p] : sym4_pairs()) {
        b(static_cast<std::size_t>(l), static_cast<std::size_t>(p)) = v(idx, 0);
        b(static_cast<std::size_t>(p), static_cast<std::size_t>(l)) = v(idx, 0);
        ++idx;
      }
    return s;
  }

  SymTensor scaled(const T& c) const {
    SymTensor s = *this;
    for (Mat<T>& b : s.blocks) b = b.scaled(c);
    return s;
  }

  SymTensor operator+(const SymTensor& o) const {
    SymTensor s = *this;
    for (std::size_t i = 0; i < blocks.size(); ++i) s.blocks[i] = s.blocks[i] + o.blocks[i];
    return s;
  }

  bool is_zero() const {
    for (const Mat<T>& b : blocks)
      if (!b.is_zero()) return false;
    return true;
  }
};

/// Element of S^2 C^{4*} (x) Lambda^2 C^{k*} (the codomain of the monad
/// quadric). Per pair r < s it stores the symmetric matrix Q of the quadric
/// G_{rs}(x) = x^T Q x. Coordinates (vec) use monomial coefficients, i.e.
/// the off-diagonal entries are doubled; this is the convention under which
/// the pairing with SymTensor grid coordinates is a plain dot product.
template <class T>
struct SymForm {
  int k = 0;
  std::vector<Mat<T>> quads;  // wedge_pairs(k) order, each 4x4 symmetric

  SymForm() = default;
  explicit SymForm(int kk) : k(kk), quads(wedge_count(kk), Mat<T>(4, 4)) {}

  std::size_t dim() const { return wedge_count(k) * kSymPairCount; }

  Mat<T> vec() const {
    Mat<T> v(dim(), 1);
    std::size_t idx = 0;
    T two = scalar_from_int<T>(2);
    for (const Mat<T>& q : quads)
      for (auto [l, p] : sym4_pairs())
        v(idx++, 0) = l == p ? q(static_cast<std::size_t>(l), static_cast<std::size_t>(l))
                             : two * q(static_cast<std::size_t>(l), static_cast<std::size_t>(p));
    return v;
  }

  SymForm operator-(const SymForm& o) const {
    SymForm s = *this;
    for (std::size_t i = 0; i < quads.size(); ++i) s.quads[i] = s.quads[i] - o.quads[i];
    return s;
  }

  bool is_zero() const {
    for (const Mat<T>& q : quads)
      if (!q.is_zero()) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (const Mat<T>& q : quads) m = std::max(m, q.max_abs());
    return m;
  }
};

// ---- backend conversions ---------------------------------------------------

inline ATensor<CD> to_complex(const ATensor<Rat>& t) {
  ATensor<CD> c(t.k);
  for (std::size_t i = 0; i < t.a.size(); ++i) c.a[i] = rat_to_cd(t.a[i]);
  return c;
}

inline ATensor<Fp> to_fp(const ATensor<Rat>& t) {
  ATensor<Fp> c(t.k);
  for (std::size_t i = 0; i < t.a.size(); ++i) c.a[i] = rat_to_fp(t.a[i]);
  return c;
}

inline SymTensor<CD> to_complex(const SymTensor<Rat>& s) {
  SymTensor<CD> c(s.k);
  for (std::size_t i = 0; i < s.blocks.size(); ++i) c.blocks[i] = to_complex(s.blocks[i]);
  return c;
}

inline SymTensor<Fp> to_fp(const SymTensor<Rat>& s) {
  SymTensor<Fp> c(s.k);
  for (std::size_t i = 0; i < s.blocks.size(); ++i) c.blocks[i] = to_fp(s.blocks[i]);
  return c;
}

template <class T>
ATensor<T> random_atensor(Rng& rng, int k, long long span = 10) {
  ATensor<T> t(k);
  for (T& x : t.a) x = random_scalar<T>(rng, span);
  return t;
}

template <class T>
SymTensor<T> random_sym_tensor(Rng& rng, int k, long long span = 10) {
  SymTensor<T> s(k);
  for (Mat<T>& b : s.blocks) {
    for (int l = 0; l < 4; ++l)
      for (int p = l; p < 4; ++p) {
        T v = random_scalar<T>(rng, span);
        b(static_cast<std::size_t>(l), static_cast<std::size_t>(p)) = v;
        b(static_cast<std::size_t>(p), static_cast<std::size_t>(l)) = v;
      }
  }
  return s;
}

// ---- group action ----------------------------------------------------------

/// Element of GL_4 x GL_k x Sp_{2k+2} acting on all the tensor spaces here.
template <class T>
struct GroupElement {
  Mat<T> g4;  // 4 x 4
  Mat<T> gk;  // k x k
  Mat<T> gs;  // (2k+2) x (2k+2), symplectic

  bool symplectic_exact(int k) const {
    return gs.transpose() * sympl_gram<T>(k) * gs == sympl_gram<T>(k);
  }
};

/// Covector-covector-vector transform of the monad datum:
/// a'[i][j][l] = sum a[i'][j'][l'] (g4^{-1})_{i' i} (gk^{-1})_{j' j} (gs)_{l l'}.
template <class T>
ATensor<T> act(const GroupElement<T>& g, const ATensor<T>& t) {
  static_assert(is_exact_v<T>, "group action is used on exact backends");
  const int k = t.k, n = t.h_dim();
  Mat<T> p4 = inverse(g.g4), pk = inverse(g.gk);
  ATensor<T> out(k);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < n; ++l) {
        T s = scalar_from_int<T>(0);
        for (int i2 = 0; i2 < 4; ++i2)
          for (int j2 = 0; j2 < k; ++j2)
            for (int l2 = 0; l2 < n; ++l2)
              s += t.at(i2, j2, l2) * p4(static_cast<std::size_t>(i2), static_cast<std::size_t>(i)) *
                   pk(static_cast<std::size_t>(j2), static_cast<std::size_t>(j)) *
                   g.gs(static_cast<std::size_t>(l), static_cast<std::size_t>(l2));
        out.at(i, j, l) = s;
      }
  return out;
}

/// Vector-vector transform on S^2 C^4 (x) Lambda^2 C^k.
template <class T>
SymTensor<T> act(const GroupElement<T>& g, const SymTensor<T>& s) {
  const int k = s.k;
  SymTensor<T> out(k);
  for (int i0 = 0; i0 < k; ++i0)
    for (int j0 = i0 + 1; j0 < k; ++j0) {
      Mat<T> acc(4, 4);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          if (i == j) continue;
          T w = g.gk(static_cast<std::size_t>(i0), static_cast<std::size_t>(i)) *
                g.gk(static_cast<std::size_t>(j0), static_cast<std::size_t>(j));
          if (scalar_is_zero(w)) continue;
          acc = acc + (g.g4 * s.block_ext(i, j) * g.g4.transpose()).scaled(w);
        }
      out.stored(i0, j0) = acc;
    }
  return out;
}

/// Vector-vector-vector transform on C^4 (x) C^k (x) C^{2k+2}.
template <class T>
CTensor<T> act(const GroupElement<T>& g, const CTensor<T>& t) {
  const int k = t.k, n = t.h_dim();
  CTensor<T> out(k);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < n; ++l) {
        T s = scalar_from_int<T>(0);
        for (int i2 = 0; i2 < 4; ++i2)
          for (int j2 = 0; j2 < k; ++j2)
            for (int l2 = 0; l2 < n; ++l2)
              s += t.at(i2, j2, l2) * g.g4(static_cast<std::size_t>(i), static_cast<std::size_t>(i2)) *
                   g.gk(static_cast<std::size_t>(j), static_cast<std::size_t>(j2)) *
                   g.gs(static_cast<std::size_t>(l), static_cast<std::size_t>(l2));
        out.at(i, j, l) = s;
      }
  return out;
}

/// Covector-covector transform on S^2 C^{4*} (x) Lambda^2 C^{k*}: quadrics
/// transform by substitution x -> g4^{-1} x, wedge coefficients through
/// gk^{-1}.
template <class T>
SymForm<T> act(const GroupElement<T>& g, const SymForm<T>& f) {
  static_assert(is_exact_v<T>);
  const int k = f.k;
  Mat<T> p4 = inverse(g.g4), pk = inverse(g.gk);
  SymForm<T> out(k);
  auto pairs = wedge_pairs(k);
  for (int r0 = 0; r0 < k; ++r0)
    for (int s0 = r0 + 1; s0 < k; ++s0) {
      Mat<T> acc(4, 4);
      for (auto [r, s] : pairs) {
        T w = pk(static_cast<std::size_t>(r), static_cast<std::size_t>(r0)) *
                  pk(static_cast<std::size_t>(s), static_cast<std::size_t>(s0)) -
              pk(static_cast<std::size_t>(s), static_cast<std::size_t>(r0)) *
                  pk(static_cast<std::size_t>(r), static_cast<std::size_t>(s0));
        if (scalar_is_zero(w)) continue;
        acc = acc + (p4.transpose() * f.quads[wedge_index(r, s, k)] * p4).scaled(w);
      }
      out.quads[wedge_index(r0, s0, k)] = acc;
    }
  return out;
}

/// Transform of a 4 x k coefficient grid of C^{4*} (x) C^{k*}.
template <class T>
Mat<T> act_covector_pair(const GroupElement<T>& g, const Mat<T>& b) {
  static_assert(is_exact_v<T>);
  return inverse(g.g4).transpose() * b * inverse(g.gk);
}

/// Transform of a 4 x k coefficient grid of C^4 (x) C^k.
template <class T>
Mat<T> act_vector_pair(const GroupElement<T>& g, const Mat<T>& b) {
  return g.g4 * b * g.gk.transpose();
}

/// Random exact symplectic matrix: a short word in the elementary symplectic
/// generators [[I,B],[0,I]], [[I,0],[C,I]] (B, C symmetric) and
/// [[U,0],[0,U^{-T}]].
template <class T>
Mat<T> random_symplectic(Rng& rng, int k, long long span = 2) {
  static_assert(is_exact_v<T>);
  const int m = k + 1, n = 2 * k + 2;
  auto sym_block = [&]() {
    Mat<T> b(static_cast<std::size_t>(m), static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        T v = random_scalar<T>(rng, span);
        b(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
        b(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
      }
    return b;
  };
  Mat<T> g = Mat<T>::identity(static_cast<std::size_t>(n));
  for (int step = 0; step < 3; ++step) {
    Mat<T> e = Mat<T>::identity(static_cast<std::size_t>(n));
    int kind = static_cast<int>(rng.below(3));
    if (kind == 0) {
      e.set_block(0, static_cast<std::size_t>(m), sym_block());
    } else if (kind == 1) {
      e.set_block(static_cast<std::size_t>(m), 0, sym_block());
    } else {
      // unimodular-ish U with unit diagonal and one off-diagonal entry
      Mat<T> u = Mat<T>::identity(static_cast<std::size_t>(m));
      if (m > 1) {
        int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
        int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
        if (i != j) u(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = random_scalar<T>(rng, span);
      }
      e.set_block(0, 0, u);
      e.set_block(static_cast<std::size_t>(m), static_cast<std::size_t>(m), inverse(u).transpose());
    }
    g = g * e;
  }
  return g;
}

template <class T>
GroupElement<T> random_group_element(Rng& rng, int k, long long span = 2) {
  static_assert(is_exact_v<T>);
  auto invertible = [&](int n) {
    for (;;) {
      Mat<T> m = random_matrix<T>(rng, static_cast<std::size_t>(n), static_cast<std::size_t>(n), span);
      if (rank(m) == static_cast<std::size_t>(n)) return m;
    }
  };
  GroupElement<T> g{invertible(4), invertible(k), random_symplectic<T>(rng, k, span)};
  return g;
}

}  // namespace ilab

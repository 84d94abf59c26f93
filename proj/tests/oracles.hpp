#pragma once

// Independent reference implementations used only by the tests. These follow
// the defining formulas term by term, deliberately avoiding the closed forms
// and matrix factorizations of the library code they check.

#include "instlab/matrix.hpp"
#include "instlab/tensors.hpp"

namespace oracle {

using namespace ilab;

/// Plain fraction-based Gaussian elimination rank (no Bareiss, no RREF).
inline std::size_t gauss_rank(Mat<Rat> m) {
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
    std::size_t sel = m.rows();
    for (std::size_t r = rank; r < m.rows(); ++r)
      if (sgn(m(r, col)) != 0) {
        sel = r;
        break;
      }
    if (sel == m.rows()) continue;
    for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(rank, c), m(sel, c));
    for (std::size_t r = rank + 1; r < m.rows(); ++r) {
      if (sgn(m(r, col)) == 0) continue;
      Rat f = m(r, col) / m(rank, col);
      for (std::size_t c = col; c < m.cols(); ++c) m(r, c) -= f * m(rank, c);
    }
    ++rank;
  }
  return rank;
}

/// gamma by exact interpolation: evaluate the quadric matrix
/// F(x) J F(x)^T at sample points and solve for the monomial coefficients.
/// Returns the symmetric quadric matrix per wedge pair (r,s).
inline std::vector<Mat<Rat>> quadric_by_interpolation(const ATensor<Rat>& a) {
  const int k = a.k;
  auto pairs4 = sym4_pairs();
  // sample points: enough generic integer vectors in C^4
  std::vector<Mat<Rat>> pts;
  Rng rng(987654);
  while (pts.size() < 12) {
    Mat<Rat> x(4, 1);
    for (int i = 0; i < 4; ++i) x(static_cast<std::size_t>(i), 0) = Rat(static_cast<long>(rng.int_range(-7, 7)));
    pts.push_back(x);
  }
  Mat<Rat> vand(pts.size(), kSymPairCount);
  for (std::size_t r = 0; r < pts.size(); ++r)
    for (int c = 0; c < kSymPairCount; ++c) {
      auto [l, p] = pairs4[static_cast<std::size_t>(c)];
      vand(r, static_cast<std::size_t>(c)) =
          pts[r](static_cast<std::size_t>(l), 0) * pts[r](static_cast<std::size_t>(p), 0);
    }
  Mat<Rat> j = sympl_gram<Rat>(k);
  std::vector<Mat<Rat>> out(wedge_count(k), Mat<Rat>(4, 4));
  for (int r = 0; r < k; ++r)
    for (int s = r + 1; s < k; ++s) {
      Mat<Rat> vals(pts.size(), 1);
      for (std::size_t t = 0; t < pts.size(); ++t) {
        Mat<Rat> f = a.monad_matrix(pts[t]);
        Mat<Rat> g = f * j * f.transpose();
        vals(t, 0) = g(static_cast<std::size_t>(r), static_cast<std::size_t>(s));
      }
      auto sol = solve_affine(vand, vals);
      REQUIRE(sol.has_value());
      Mat<Rat>& q = out[wedge_index(r, s, k)];
      for (int c = 0; c < kSymPairCount; ++c) {
        auto [l, p] = pairs4[static_cast<std::size_t>(c)];
        Rat coeff = (*sol)(static_cast<std::size_t>(c), 0);
        if (l == p) {
          q(static_cast<std::size_t>(l), static_cast<std::size_t>(l)) = coeff;
        } else {
          q(static_cast<std::size_t>(l), static_cast<std::size_t>(p)) = coeff / 2;
          q(static_cast<std::size_t>(p), static_cast<std::size_t>(l)) = coeff / 2;
        }
      }
    }
  return out;
}

/// rho by direct expansion of the defining contraction over every grid
/// tuple of S and every coefficient of the covector pair.
inline Mat<Rat> rho_brute(const SymTensor<Rat>& s, const Mat<Rat>& bstar) {
  const int k = s.k;
  Mat<Rat> out(4, static_cast<std::size_t>(k));
  for (int i2 = 0; i2 < k; ++i2)       // wedge index 1 of the grid
    for (int j2 = 0; j2 < k; ++j2) {   // wedge index 2
      if (i2 == j2) continue;
      Mat<Rat> blk = s.block_ext(i2, j2);
      for (int l = 0; l < 4; ++l)
        for (int p = 0; p < 4; ++p) {
          const Rat& coeff = blk(static_cast<std::size_t>(l), static_cast<std::size_t>(p));
          if (sgn(coeff) == 0) continue;
          for (int i = 0; i < 4; ++i)
            for (int j = 0; j < k; ++j) {
              const Rat& b = bstar(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
              if (sgn(b) == 0) continue;
              // (d_{li} f_p + d_{pi} f_l) (x) (d_{i2 j} b_{j2} - d_{j2 j} b_{i2})
              Rat w = coeff * b;
              auto add = [&](int fout, int bout, const Rat& v) {
                out(static_cast<std::size_t>(fout), static_cast<std::size_t>(bout)) += v;
              };
              if (l == i && i2 == j) add(p, j2, w);
              if (l == i && j2 == j) add(p, i2, -w);
              if (p == i && i2 == j) add(l, j2, w);
              if (p == i && j2 == j) add(l, i2, -w);
            }
        }
    }
  return out;
}

/// xi by direct expansion (h passes through untouched).
inline CTensor<Rat> xi_brute(const ATensor<Rat>& a, const SymTensor<Rat>& s) {
  const int k = a.k, n = a.h_dim();
  CTensor<Rat> out(k);
  for (int l0 = 0; l0 < n; ++l0) {
    Mat<Rat> slice(4, static_cast<std::size_t>(k));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < k; ++j) slice(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = a.at(i, j, l0);
    Mat<Rat> r = rho_brute(s, slice);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < k; ++j) out.at(i, j, l0) = r(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  return out;
}

/// kappa by direct expansion of omega(h_l, h').
inline Mat<Rat> kappa_brute(const CTensor<Rat>& c, const Mat<Rat>& h) {
  const int k = c.k, n = c.h_dim();
  Mat<Rat> j = sympl_gram<Rat>(k);
  Mat<Rat> out(4, static_cast<std::size_t>(k));
  for (int i = 0; i < 4; ++i)
    for (int jj = 0; jj < k; ++jj)
      for (int l = 0; l < n; ++l)
        for (int l2 = 0; l2 < n; ++l2)
          out(static_cast<std::size_t>(i), static_cast<std::size_t>(jj)) +=
              c.at(i, jj, l) * j(static_cast<std::size_t>(l), static_cast<std::size_t>(l2)) *
              h(static_cast<std::size_t>(l2), 0);
  return out;
}

}  // namespace oracle

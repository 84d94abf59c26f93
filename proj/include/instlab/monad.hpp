#pragma once

#include <optional>
#include <string>
#include <utility>

#include "instlab/maps.hpp"

namespace ilab {

/// Evidence for the three instanton conditions of a monad datum:
/// E1 fiberwise surjectivity (probabilistic, with an exact failure witness),
/// E2 the quadric vanishing (exact on exact backends), E3 nondegeneracy of
/// the symplectic pairing (rank 2k+2).
template <class T>
struct MonadCertificate {
  int k = 0;
  bool e2_pass = false;
  bool e2_exact = false;     // checked as exact zero rather than by residual
  double e2_residual = 0.0;  // relative residual on the float backend
  std::size_t e3_rank = 0;
  bool e1_pass = false;
  int e1_samples = 0;
  std::optional<std::pair<Mat<T>, Mat<T>>> e1_witness;  // (f, b), eps(A, f (x) b) = 0
  std::size_t h0K = 0;  // dim ker flat(A)

  bool is_instanton() const {
    return e2_pass && e1_pass && e3_rank == static_cast<std::size_t>(2 * k + 2);
  }
  /// E1 and E2 passing force E3; a certificate violating that is an
  /// internal-error state worth surfacing.
  bool implication_violated() const {
    return e1_pass && e2_pass && e3_rank != static_cast<std::size_t>(2 * k + 2);
  }
};

template <class T>
struct InstantonSample {
  ATensor<T> a;
  MonadCertificate<T> certificate;
  std::string provenance;
  std::uint64_t seed = 0;
};

/// Certify the instanton conditions. E1 draws `e1_samples` random rational
/// directions f and checks that the (2k+2) x k evaluation matrix has full
/// rank; a rank drop produces an exact witness pair. Deterministic in
/// (A, e1_samples, seed).
template <class T>
MonadCertificate<T> certify(const ATensor<T>& a, int e1_samples = 200, std::uint64_t seed = 1);

/// The evaluation matrix of b -> eps(A, f (x) b), one fixed f.
template <class T>
Mat<T> e1_matrix(const ATensor<T>& a, const Mat<T>& f) {
  const int k = a.k, n = a.h_dim();
  Mat<T> m(static_cast<std::size_t>(n), static_cast<std::size_t>(k));
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < k; ++j) {
      T acc = scalar_from_int<T>(0);
      for (int i = 0; i < 4; ++i) acc += a.at(i, j, l) * f(static_cast<std::size_t>(i), 0);
      m(static_cast<std::size_t>(l), static_cast<std::size_t>(j)) = acc;
    }
  return m;
}

/// The banded slice base: F(x) = [P(x) | *] with x1 on the diagonal of the
/// k x (k+1) block and x2 on the superdiagonal.
template <class T>
ATensor<T> slice_base_tensor(int k) {
  ATensor<T> t(k);
  for (int j = 0; j < k; ++j) {
    t.at(0, j, j) = scalar_from_int<T>(1);
    t.at(1, j, j + 1) = scalar_from_int<T>(1);
  }
  return t;
}

/// Exact sampler of the monad variety: the quadric condition restricted to
/// the banded slice is linear in the second block of coefficients, so a
/// random rational point of its kernel is drawn and certified. Bounded
/// retries; nullopt when no draw certifies.
std::optional<InstantonSample<Rat>> generate_slice(int k, std::uint64_t seed, int e1_samples = 200,
                                                   int max_draws = 32);

struct NewtonResult {
  std::optional<InstantonSample<CD>> sample;
  int iterations = 0;
  int restarts = 0;
  double residual = 0.0;
};

/// Gauss-Newton least-squares iteration on the underdetermined quadric
/// system, from a seeded random start (or a perturbation of `start`).
/// Succeeds when ||gamma(A)|| <= 1e-10 ||A||^2 and the float certificate
/// passes.
NewtonResult generate_newton(int k, std::uint64_t seed, int max_iter = 60, int max_restarts = 16,
                             const ATensor<CD>* start = nullptr, int e1_samples = 200);

/// Group action on the monad datum; validates the symplectic factor first.
template <class T>
ATensor<T> group_act(const GroupElement<T>& g, const ATensor<T>& a) {
  static_assert(is_exact_v<T>);
  if (!g.symplectic_exact(a.k))
    throw InvalidInputError("group_act: middle factor is not symplectic");
  return act(g, a);
}

/// h^0 of the restriction to the plane {fstar = 0}: the kernel dimension of
/// the 3k x (2k+2) matrix stacking F(u) over a basis u_1, u_2, u_3 of the
/// plane. The basis is the echelon kernel basis of fstar^T, so the value is
/// reproducible; it is basis-independent anyway.
template <class T>
std::size_t h0_plane(const ATensor<T>& a, const Mat<T>& fstar);

/// The stacked restriction matrix itself (rows (m, j), m over the plane
/// basis).
template <class T>
Mat<T> plane_restriction_matrix(const ATensor<T>& a, const std::vector<Mat<T>>& basis) {
  const int k = a.k, n = a.h_dim();
  Mat<T> m(static_cast<std::size_t>(3 * k), static_cast<std::size_t>(n));
  for (std::size_t bm = 0; bm < basis.size(); ++bm) {
    Mat<T> f = a.monad_matrix(basis[bm]);
    m.set_block(bm * static_cast<std::size_t>(k), 0, f);
  }
  return m;
}

template <class T>
std::vector<Mat<T>> plane_basis(const Mat<T>& fstar) {
  if (fstar.rows() != 4 || fstar.cols() != 1 || fstar.is_zero())
    throw InvalidInputError("plane basis needs a nonzero covector in C^4*");
  return kernel_basis(fstar.transpose());
}

extern template MonadCertificate<Rat> certify(const ATensor<Rat>&, int, std::uint64_t);
extern template MonadCertificate<Fp> certify(const ATensor<Fp>&, int, std::uint64_t);
extern template MonadCertificate<CD> certify(const ATensor<CD>&, int, std::uint64_t);
extern template std::size_t h0_plane(const ATensor<Rat>&, const Mat<Rat>&);
extern template std::size_t h0_plane(const ATensor<CD>&, const Mat<CD>&);

}  // namespace ilab

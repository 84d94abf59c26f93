#pragma once

#include <optional>
#include <vector>

#include "instlab/matrix.hpp"

namespace ilab {

double frob_norm(const Mat<CD>& m);

std::vector<double> singular_values(const Mat<CD>& m);

/// Number of singular values above tol * sigma_max (the complex-float rank).
std::size_t rank_svd(const Mat<CD>& m, double tol = 0.0);

/// Orthonormal basis of the numerical right kernel (singular vectors with
/// sigma <= tol * sigma_max), one column each.
std::vector<Mat<CD>> nullspace_svd(const Mat<CD>& m, double tol = 0.0);

/// Minimal-norm least-squares solution of A x ~ b.
Mat<CD> lstsq_min_norm(const Mat<CD>& a, const Mat<CD>& b);

/// Inverse of a square complex matrix (LU with full pivoting).
Mat<CD> inverse_cd(const Mat<CD>& m);

/// Determinant of a square complex matrix.
CD det_cd(const Mat<CD>& m);

struct SvdFull {
  Mat<CD> u;              // left singular vectors (thin)
  std::vector<double> s;  // descending
  Mat<CD> v;              // right singular vectors (thin), m = u diag(s) v^H
};
SvdFull svd_full(const Mat<CD>& m);

struct EigenPairs {
  std::vector<CD> values;
  Mat<CD> vectors;  // column i belongs to values[i]
};
EigenPairs eigenpairs(const Mat<CD>& m);

/// Roots of a polynomial c[0] + c[1] x + ... + c[n] x^n via the companion
/// matrix of the trimmed polynomial.
std::vector<CD> poly_roots(const std::vector<CD>& coeffs, double tol = 0.0);

struct PencilRoots {
  bool identically_singular = false;
  std::vector<CD> roots;
};

/// All mu with det(R2 - mu R1) = 0, computed by evaluation-interpolation of
/// the determinant and companion eigenvalues; flags the identically-zero
/// determinant.
PencilRoots pencil_roots(const Mat<CD>& r1, const Mat<CD>& r2, double tol = 0.0);

struct CommonEigenvector {
  Mat<CD> f;  // unit vector
  CD eig_u;
  CD eig_v;
  double residual;
};

/// A joint eigenvector of a commuting pair, found by refining an eigenspace
/// of U under V. Throws MathFindingError (carrying the commutator norm) when
/// the inputs do not commute within tolerance.
CommonEigenvector common_eigenvector(const Mat<CD>& u, const Mat<CD>& v, double tol = 0.0);

/// Every joint eigenvector candidate found by the eigenspace refinement,
/// sorted by residual (useful when a particular branch must be tracked).
std::vector<CommonEigenvector> common_eigenvector_candidates(const Mat<CD>& u, const Mat<CD>& v,
                                                             double tol = 0.0);

struct CongruenceNormalForm {
  Mat<CD> t;  // invertible, t^T m t = diag(1,...,1,0,...,0)
  std::size_t rank;
  double residual;
};

/// Congruence normal form of a complex symmetric matrix.
CongruenceNormalForm symmetric_congruence_normalize(const Mat<CD>& m, double tol = 0.0);

/// Skew congruence reduction: invertible t with t^T m t = blockdiag(K, 0)
/// where K is the standard full-rank skew form diag([[0,1],[-1,0]],...).
struct SkewCongruenceForm {
  Mat<CD> t;
  std::size_t rank;  // even
  double residual;
};
SkewCongruenceForm skew_congruence_normalize(const Mat<CD>& m, double tol = 0.0);

}  // namespace ilab

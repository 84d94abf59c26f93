#pragma once

#include <optional>
#include <vector>

#include "instlab/monad.hpp"

namespace ilab {

/// An unstable plane: h^0 of the restriction is positive. The section
/// direction bstar is unique up to scale whenever h0 = 1.
struct PlanePoint {
  Mat<CD> fstar;  // projective point of P^3*
  std::optional<Mat<CD>> bstar;
  std::size_t h0 = 0;
  bool exact_verified = false;  // a nearby rational parameter drops rank exactly
};

struct DimensionProbe {
  int trials = 0;
  int hits = 0;
  bool dim_ge_2 = false;  // requires hits >= ceil(0.8 trials) with trials >= 20
  std::vector<PlanePoint> hit_points;
};

template <class T>
struct UnstableTestResult {
  bool unstable = false;
  std::size_t intersection_dim = 0;  // of Im(beta) with fstar (x) C^{k*}
  std::optional<Mat<T>> bstar;
};

/// Membership of the plane in the unstable locus, decided by one rank
/// computation on the columns of beta extended by the fstar (x) b_j*
/// directions. Independent of the restriction-matrix route.
template <class T>
UnstableTestResult<T> unstable_plane_test(const ATensor<T>& a, const Mat<T>& fstar);

/// All unstable planes on the pencil f*(t) = f0 + t f1: the parameter values
/// where the stacked restriction matrix drops rank, found through the
/// determinant of a randomly row-compressed square submatrix (a univariate
/// polynomial of degree <= k, interpolated and solved by companion
/// eigenvalues). Every hit is re-verified through the restriction matrix;
/// when the exact tensor is supplied, candidate parameters are also snapped
/// to nearby rationals and checked by exact rank.
std::vector<PlanePoint> w_line_probe(const ATensor<CD>& a, const Mat<CD>& f0star,
                                     const Mat<CD>& f1star, const ATensor<Rat>* exact = nullptr,
                                     std::uint64_t seed = 7);

/// Random-pencil incidence probe for the dimension of the unstable locus: a
/// surface meets a generic line in P^{3*}, a curve does not.
DimensionProbe w_dimension_probe(const ATensor<CD>& a, int trials, std::uint64_t seed,
                                 const ATensor<Rat>* exact = nullptr);

struct QuadricFitResult {
  bool underdetermined = false;
  std::array<CD, 10> coeffs{};  // monomial order of sym4_pairs()
  double residual = 0.0;        // max held-out evaluation, normalized
};

/// Least-norm quadric through the plane points (>= 9 required); the last few
/// points are held out for the residual when more than nine are supplied.
QuadricFitResult quadric_fit(const std::vector<PlanePoint>& points);

extern template UnstableTestResult<Rat> unstable_plane_test(const ATensor<Rat>&, const Mat<Rat>&);
extern template UnstableTestResult<CD> unstable_plane_test(const ATensor<CD>&, const Mat<CD>&);

}  // namespace ilab

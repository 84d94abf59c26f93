#pragma once

#include "instlab/floatops.hpp"

namespace ilab {

/// Witness for the stacked skew-pencil statement: a direction v0 whose two
/// images are proportional, R1 v0 = lambda1 u0 and R2 v0 = lambda2 u0 with
/// the stacked image nonzero. ||v0|| = 1.
struct PencilWitness {
  Mat<CD> v0;
  Mat<CD> u0;
  CD lambda1;
  CD lambda2;
  double residual;  // max of the two proportionality defects, relative

  double image_norm() const {
    return std::sqrt(std::norm(lambda1) + std::norm(lambda2)) * frob_norm(u0);
  }
};

/// Constructive solver for a pair of skew-symmetric k x k matrices, not both
/// zero: when R1 is invertible, v0 spans the kernel of R2 - mu0 R1 at a root
/// of the pencil determinant; otherwise R1 is brought to split congruence
/// form and the proof's three sub-cases (nonzero off-block of R2, or
/// recursion on the leading invertible pair) are followed. Every output is
/// re-verified before being returned.
PencilWitness skew_pencil_solve(const Mat<CD>& r1, const Mat<CD>& r2, double tol = 0.0);

}  // namespace ilab

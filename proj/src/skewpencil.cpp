#include "instlab/skewpencil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ilab {

namespace {

/// Direction whose image under m has the largest norm among coordinate
/// directions (adequate at these sizes).
Mat<CD> best_image_direction(const Mat<CD>& m) {
  std::size_t best = 0;
  double bestn = -1.0;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double n = frob_norm(m.col(c));
    if (n > bestn) {
      bestn = n;
      best = c;
    }
  }
  Mat<CD> v(m.cols(), 1);
  v(best, 0) = 1.0;
  return v;
}

/// Right singular direction of the smallest singular value.
Mat<CD> least_singular_direction(const Mat<CD>& m) {
  std::vector<Mat<CD>> all = nullspace_svd(m, 2.0);  // threshold above sigma_max keeps every direction
  return all.back();
}

/// Pfaffian of an even-size skew matrix by recursive expansion (sizes here
/// are at most 4 or 6, so the cost is irrelevant).
CD pfaffian(const Mat<CD>& a) {
  const std::size_t n = a.rows();
  if (n == 0) return 1.0;
  if (n % 2 == 1) return 0.0;
  if (n == 2) return a(0, 1);
  CD sum = 0.0;
  double sign = 1.0;
  for (std::size_t j = 1; j < n; ++j, sign = -sign) {
    Mat<CD> minor(n - 2, n - 2);
    std::size_t rr = 0;
    for (std::size_t r = 1; r < n; ++r) {
      if (r == j) continue;
      std::size_t cc = 0;
      for (std::size_t c = 1; c < n; ++c) {
        if (c == j) continue;
        minor(rr, cc) = a(r, c);
        ++cc;
      }
      ++rr;
    }
    sum += sign * a(0, j) * pfaffian(minor);
  }
  return sum;
}

/// Roots of Pf(R2 - mu R1). The pencil determinant is this polynomial
/// squared, so every determinant root is double; the Pfaffian roots are
/// generically simple and resolve to machine precision.
std::vector<CD> pfaffian_roots(const Mat<CD>& r1, const Mat<CD>& r2) {
  const std::size_t n = r1.rows();
  const std::size_t deg = n / 2;
  const std::size_t npts = deg + 1;
  double radius = std::max(1.0, std::max(r1.max_abs(), r2.max_abs()));
  Mat<CD> vand(npts, npts), rhs(npts, 1);
  for (std::size_t p = 0; p < npts; ++p) {
    double th = 2.0 * 3.14159265358979323846 * static_cast<double>(p) / static_cast<double>(npts) + 0.43;
    CD mu = radius * CD(std::cos(th), std::sin(th));
    CD pw = 1.0;
    for (std::size_t c = 0; c < npts; ++c) {
      vand(p, c) = pw;
      pw *= mu;
    }
    rhs(p, 0) = pfaffian(r2 - r1.scaled(mu));
  }
  Mat<CD> coeff = lstsq_min_norm(vand, rhs);
  std::vector<CD> coeffs;
  for (std::size_t i = 0; i < npts; ++i) coeffs.push_back(coeff(i, 0));
  return poly_roots(coeffs, 1e-12);
}

/// Only the direction v0 comes from the construction; (u0, l1, l2) are the
/// optimal rank-one fit of the stacked image [R1 v0 | R2 v0]. For a
/// mathematically valid direction the defect is the second singular value,
/// which vanishes to machine precision.
struct Fitted {
  Mat<CD> v0, u0;
  CD l1, l2;
  double defect;
};

Fitted refit(const Mat<CD>& r1, const Mat<CD>& r2, Mat<CD> v0) {
  double nv = frob_norm(v0);
  if (nv == 0.0) return {v0, Mat<CD>(r1.rows(), 1), 0.0, 0.0, std::numeric_limits<double>::infinity()};
  v0 = v0.scaled(CD(1.0 / nv, 0.0));
  Mat<CD> stacked = hstack(r1 * v0, r2 * v0);  // k x 2
  SvdFull svd = svd_full(stacked);
  Fitted f;
  f.v0 = v0;
  if (svd.s.empty() || svd.s[0] == 0.0) {
    f.u0 = Mat<CD>(r1.rows(), 1);
    f.l1 = f.l2 = 0.0;
    f.defect = std::numeric_limits<double>::infinity();
    return f;
  }
  f.u0 = svd.u.col(0);
  f.l1 = svd.s[0] * std::conj(svd.v(0, 0));
  f.l2 = svd.s[0] * std::conj(svd.v(1, 0));
  f.defect = svd.s.size() > 1 ? svd.s[1] : 0.0;
  return f;
}

/// det(R1) != 0 path: try every pencil root, keep the best direction. The
/// pencil determinant of a skew pair is a perfect square, so every root is
/// double and its kernel 2-dimensional; the companion roots are only
/// sqrt(machine-eps) accurate. Restricting the pencil to the two least
/// singular directions and solving the resulting 2x2 eigenproblem recovers
/// the kernel combination to machine precision.
Mat<CD> direction_regular(const Mat<CD>& r1, const Mat<CD>& r2) {
  std::vector<CD> roots = pfaffian_roots(r1, r2);
  if (roots.empty()) {
    // fall back to the determinant route
    PencilRoots pr = pencil_roots(r1, r2);
    if (pr.identically_singular || pr.roots.empty())
      throw NonConvergenceError("skew_pencil_solve: no pencil root for an invertible base");
    roots = pr.roots;
  }
  std::sort(roots.begin(), roots.end(),
            [](const CD& a, const CD& b) { return std::abs(a) < std::abs(b); });
  Mat<CD> best;
  double bestd = std::numeric_limits<double>::infinity();
  auto consider = [&](const Mat<CD>& v0) {
    double d = refit(r1, r2, v0).defect;
    if (d < bestd) {
      bestd = d;
      best = v0;
    }
  };
  for (CD mu : roots) {
    std::vector<Mat<CD>> dirs = nullspace_svd(r2 - r1.scaled(mu), 2.0);  // every direction
    std::size_t nd = dirs.size();
    Mat<CD> vsub(r1.rows(), 2);
    vsub.set_block(0, 0, dirs[nd - 1]);
    vsub.set_block(0, 1, dirs[nd - 2]);
    consider(dirs[nd - 1]);
    // the restricted generalized eigenproblem on the near-kernel plane
    Mat<CD> m = lstsq_min_norm(r1 * vsub, r2 * vsub);  // 2 x 2
    EigenPairs ep = eigenpairs(m);
    for (std::size_t c = 0; c < ep.values.size(); ++c) consider(vsub * ep.vectors.col(c));
    if (bestd <= 1e-13) break;
  }
  // a couple of alternating sharpening rounds from the best candidate
  for (int round = 0; round < 3 && bestd > 1e-13; ++round) {
    Fitted f = refit(r1, r2, best);
    if (std::abs(f.l1) < 0.05 * std::max(std::abs(f.l1), std::abs(f.l2))) break;
    consider(least_singular_direction(r2 - r1.scaled(f.l2 / f.l1)));
  }
  return best;
}

Mat<CD> direction_rec(const Mat<CD>& r1, const Mat<CD>& r2, double eps) {
  const std::size_t k = r1.rows();
  const double scale = std::max({r1.max_abs(), r2.max_abs(), 1.0});

  if (r1.max_abs() <= eps * scale) return best_image_direction(r2);  // R1 = 0, R2 != 0
  if (rank_svd(r1, 1e-9) == k) return direction_regular(r1, r2);

  // Split congruence form of R1: t^T R1 t = blockdiag(K, 0), K invertible.
  SkewCongruenceForm nf = skew_congruence_normalize(r1);
  const std::size_t kp = nf.rank;
  Mat<CD> r2n = nf.t.transpose() * r2 * nf.t;

  Mat<CD> vn(k, 1);
  Mat<CD> off = r2n.block(0, kp, kp, k - kp);
  Mat<CD> low = r2n.block(kp, kp, k - kp, k - kp);
  if (k > kp && std::max(off.max_abs(), low.max_abs()) > eps * scale) {
    Mat<CD> vp = best_image_direction(vstack(off, low));
    for (std::size_t i = 0; i < k - kp; ++i) vn(kp + i, 0) = vp(i, 0);
  } else {
    if (kp == 0) throw InvalidInputError("skew_pencil_solve: both matrices are zero");
    Mat<CD> r1n = nf.t.transpose() * r1 * nf.t;
    Mat<CD> vl = direction_regular(r1n.block(0, 0, kp, kp), r2n.block(0, 0, kp, kp));
    for (std::size_t i = 0; i < kp; ++i) vn(i, 0) = vl(i, 0);
  }
  return nf.t * vn;
}

}  // namespace

PencilWitness skew_pencil_solve(const Mat<CD>& r1, const Mat<CD>& r2, double tol) {
  if (r1.rows() != r1.cols() || r2.rows() != r2.cols() || r1.rows() != r2.rows())
    throw InvalidInputError("skew_pencil_solve: square matrices of equal size required");
  const double eps = tol > 0.0 ? tol : Config::get().tolerance;
  const double scale = std::max(r1.max_abs(), r2.max_abs());
  if (scale == 0.0) throw InvalidInputError("skew_pencil_solve: both matrices are zero");
  {
    Mat<CD> a1 = r1 + r1.transpose(), a2 = r2 + r2.transpose();
    if (a1.max_abs() > eps * std::max(1.0, r1.max_abs()) ||
        a2.max_abs() > eps * std::max(1.0, r2.max_abs()))
      throw InvalidInputError("skew_pencil_solve: inputs must be skew-symmetric");
  }

  Fitted f = refit(r1, r2, direction_rec(r1, r2, eps));

  // balance so that max(|l1|, |l2|) = 1
  double lm = std::max(std::abs(f.l1), std::abs(f.l2));
  if (lm > 0.0) {
    f.l1 /= lm;
    f.l2 /= lm;
    f.u0 = f.u0.scaled(CD(lm, 0.0));
  }

  PencilWitness out;
  out.v0 = f.v0;
  out.u0 = f.u0;
  out.lambda1 = f.l1;
  out.lambda2 = f.l2;
  double d1 = frob_norm(r1 * f.v0 - f.u0.scaled(f.l1));
  double d2 = frob_norm(r2 * f.v0 - f.u0.scaled(f.l2));
  out.residual = std::max(d1, d2) / std::max(1.0, scale);
  if (out.residual > 1e-8 || out.image_norm() <= 1e-6 * scale)
    throw NonConvergenceError("skew_pencil_solve: witness verification failed, residual = " +
                              std::to_string(out.residual) + ", image = " +
                              std::to_string(out.image_norm()));
  return out;
}

}  // namespace ilab

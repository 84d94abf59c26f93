#include "instlab/floatops.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ilab {

namespace {

Eigen::MatrixXcd to_eigen(const Mat<CD>& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

Mat<CD> from_eigen(const Eigen::MatrixXcd& e) {
  Mat<CD> m(e.rows(), e.cols());
  for (Eigen::Index r = 0; r < e.rows(); ++r)
    for (Eigen::Index c = 0; c < e.cols(); ++c) m(r, c) = e(r, c);
  return m;
}

double tol_or_default(double tol) { return tol > 0.0 ? tol : Config::get().tolerance; }

}  // namespace

double frob_norm(const Mat<CD>& m) { return to_eigen(m).norm(); }

std::vector<double> singular_values(const Mat<CD>& m) {
  if (m.rows() == 0 || m.cols() == 0) return {};
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m));
  return {svd.singularValues().data(),
          svd.singularValues().data() + svd.singularValues().size()};
}

std::size_t rank_svd(const Mat<CD>& m, double tol) {
  std::vector<double> s = singular_values(m);
  if (s.empty()) return 0;
  double cut = tol_or_default(tol) * s.front();
  std::size_t r = 0;
  for (double v : s)
    if (v > cut) ++r;
  return r;
}

std::vector<Mat<CD>> nullspace_svd(const Mat<CD>& m, double tol) {
  if (m.cols() == 0) return {};
  if (m.rows() == 0) {
    std::vector<Mat<CD>> basis;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      Mat<CD> v(m.cols(), 1);
      v(c, 0) = 1.0;
      basis.push_back(v);
    }
    return basis;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cut = sv.size() ? tol_or_default(tol) * sv(0) : 0.0;
  std::vector<Mat<CD>> basis;
  for (Eigen::Index i = 0; i < svd.matrixV().cols(); ++i) {
    double s = i < sv.size() ? sv(i) : 0.0;
    if (s <= cut) basis.push_back(from_eigen(svd.matrixV().col(i)));
  }
  return basis;
}

Mat<CD> lstsq_min_norm(const Mat<CD>& a, const Mat<CD>& b) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
  return from_eigen(svd.solve(to_eigen(b)));
}

Mat<CD> inverse_cd(const Mat<CD>& m) {
  if (m.rows() != m.cols()) throw InvalidInputError("inverse_cd: not square");
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(to_eigen(m));
  if (!lu.isInvertible()) throw InvalidInputError("inverse_cd: singular matrix");
  return from_eigen(lu.inverse());
}

CD det_cd(const Mat<CD>& m) {
  if (m.rows() != m.cols()) throw InvalidInputError("det_cd: not square");
  return to_eigen(m).determinant();
}

SvdFull svd_full(const Mat<CD>& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m), Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFull out;
  out.u = from_eigen(svd.matrixU());
  out.v = from_eigen(svd.matrixV());
  out.s.assign(svd.singularValues().data(),
               svd.singularValues().data() + svd.singularValues().size());
  return out;
}

EigenPairs eigenpairs(const Mat<CD>& m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_eigen(m), true);
  EigenPairs out;
  out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  out.vectors = from_eigen(es.eigenvectors());
  return out;
}

std::vector<CD> poly_roots(const std::vector<CD>& coeffs, double tol) {
  double maxc = 0.0;
  for (const CD& c : coeffs) maxc = std::max(maxc, std::abs(c));
  if (maxc == 0.0) return {};
  double cut = tol_or_default(tol) * maxc;
  std::size_t deg = coeffs.size();
  while (deg > 0 && std::abs(coeffs[deg - 1]) <= cut) --deg;
  if (deg <= 1) return {};
  --deg;  // actual degree
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (std::size_t i = 0; i + 1 < deg; ++i) comp(i + 1, i) = 1.0;
  for (std::size_t i = 0; i < deg; ++i) comp(i, deg - 1) = -coeffs[i] / coeffs[deg];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

PencilRoots pencil_roots(const Mat<CD>& r1, const Mat<CD>& r2, double tol) {
  if (r1.rows() != r1.cols() || r2.rows() != r2.cols() || r1.rows() != r2.rows())
    throw InvalidInputError("pencil_roots: square matrices of equal size required");
  const std::size_t n = r1.rows();
  if (n == 0) return {};
  // det(R2 - mu R1) has degree <= n; sample on a circle and interpolate.
  const std::size_t npts = n + 1;
  double radius = std::max(1.0, std::max(r1.max_abs(), r2.max_abs()));
  Eigen::MatrixXcd vand(npts, npts);
  Eigen::VectorXcd vals(npts);
  Eigen::MatrixXcd e1 = to_eigen(r1), e2 = to_eigen(r2);
  for (std::size_t p = 0; p < npts; ++p) {
    double th = 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(npts) + 0.37;
    CD mu = radius * CD(std::cos(th), std::sin(th));
    CD pw = 1.0;
    for (std::size_t c = 0; c < npts; ++c) {
      vand(p, c) = pw;
      pw *= mu;
    }
    vals(p) = (e2 - mu * e1).determinant();
  }
  Eigen::VectorXcd coeff = vand.fullPivLu().solve(vals);
  std::vector<CD> coeffs(coeff.data(), coeff.data() + coeff.size());

  // Zero test at the determinant's own scale (entries live at ~radius^n).
  double scale = std::pow(radius, static_cast<double>(n));
  double maxc = 0.0;
  for (const CD& c : coeffs) maxc = std::max(maxc, std::abs(c));
  PencilRoots out;
  if (maxc <= tol_or_default(tol) * scale * static_cast<double>(npts)) {
    out.identically_singular = true;
    return out;
  }
  out.roots = poly_roots(coeffs, tol);
  return out;
}

std::vector<CommonEigenvector> common_eigenvector_candidates(const Mat<CD>& u, const Mat<CD>& v,
                                                             double tol) {
  if (u.rows() != u.cols() || v.rows() != v.cols() || u.rows() != v.rows())
    throw InvalidInputError("common_eigenvector: square matrices of equal size required");
  const double eps = tol_or_default(tol);
  const std::size_t n = u.rows();
  if (n == 0) throw InvalidInputError("common_eigenvector: empty matrices");
  Eigen::MatrixXcd eu = to_eigen(u), ev = to_eigen(v);
  const double nu = std::max(eu.norm(), 1.0), nv = std::max(ev.norm(), 1.0);
  const double comm = (eu * ev - ev * eu).norm();
  if (comm > eps * nu * nv)
    throw MathFindingError("common_eigenvector: inputs do not commute, ||[U,V]|| = " +
                           std::to_string(comm));

  auto residual_of = [&](const Eigen::VectorXcd& f, CD lu, CD lv) {
    double ru = (eu * f - lu * f).norm() / nu;
    double rv = (ev * f - lv * f).norm() / nv;
    return std::max(ru, rv);
  };

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(eu, true);
  double cscale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());

  std::vector<CommonEigenvector> found;
  std::vector<bool> used(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    // Cluster the spectrum of U; each cluster spans a V-invariant subspace.
    std::vector<std::size_t> cluster;
    for (std::size_t j = 0; j < n; ++j)
      if (!used[j] && std::abs(es.eigenvalues()(j) - es.eigenvalues()(i)) <= 1e-6 * cscale)
        cluster.push_back(j);
    for (std::size_t j : cluster) used[j] = true;

    Eigen::MatrixXcd basis(n, cluster.size());
    for (std::size_t c = 0; c < cluster.size(); ++c)
      basis.col(c) = es.eigenvectors().col(cluster[c]);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(basis);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, cluster.size());
    Eigen::MatrixXcd vc = q.adjoint() * ev * q;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es2(vc, true);
    for (Eigen::Index c = 0; c < es2.eigenvectors().cols(); ++c) {
      Eigen::VectorXcd f = q * es2.eigenvectors().col(c);
      if (f.norm() < 1e-12) continue;
      f.normalize();
      CD lu = f.adjoint() * (eu * f);
      CD lv = f.adjoint() * (ev * f);
      double res = residual_of(f, lu, lv);
      if (res <= 10.0 * eps) {
        CommonEigenvector ce;
        ce.f = from_eigen(f);
        ce.eig_u = lu;
        ce.eig_v = lv;
        ce.residual = res;
        found.push_back(std::move(ce));
      }
    }
  }
  std::sort(found.begin(), found.end(),
            [](const CommonEigenvector& a, const CommonEigenvector& b) {
              return a.residual < b.residual;
            });
  return found;
}

CommonEigenvector common_eigenvector(const Mat<CD>& u, const Mat<CD>& v, double tol) {
  std::vector<CommonEigenvector> cands = common_eigenvector_candidates(u, v, tol);
  if (cands.empty())
    throw MathFindingError("common_eigenvector: no joint eigenvector within tolerance");
  return cands.front();
}

CongruenceNormalForm symmetric_congruence_normalize(const Mat<CD>& m, double tol) {
  if (!m.is_symmetric()) {
    // allow float noise: check relative asymmetry before rejecting
    double asym = 0.0, scale = std::max(1.0, m.max_abs());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) asym = std::max(asym, std::abs(m(i, j) - m(j, i)));
    if (m.rows() != m.cols() || asym > tol_or_default(tol) * scale)
      throw InvalidInputError("symmetric_congruence_normalize: input is not symmetric");
  }
  const std::size_t n = m.rows();
  const double eps = tol_or_default(tol) * std::max(1.0, m.max_abs());
  Eigen::MatrixXcd a = to_eigen(m);
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Identity(n, n);

  // Lagrange reduction over C: create a diagonal pivot (borrowing from an
  // off-diagonal entry when the diagonal is numerically zero), scale it to 1
  // by a complex square root, clear its row/column, recurse.
  std::vector<std::size_t> done;  // columns of t holding finished pivots
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) active.push_back(i);
  while (!active.empty()) {
    // best diagonal pivot among active columns
    std::size_t piv = active.size();
    double bestd = eps;
    for (std::size_t ai = 0; ai < active.size(); ++ai) {
      double d = std::abs(a(active[ai], active[ai]));
      if (d > bestd) {
        bestd = d;
        piv = ai;
      }
    }
    if (piv == active.size()) {
      // no usable diagonal: borrow from the largest off-diagonal pair
      std::size_t bi = active.size(), bj = active.size();
      double besto = eps;
      for (std::size_t ai = 0; ai < active.size(); ++ai)
        for (std::size_t aj = ai + 1; aj < active.size(); ++aj) {
          double o = std::abs(a(active[ai], active[aj]));
          if (o > besto) {
            besto = o;
            bi = ai;
            bj = aj;
          }
        }
      if (bi == active.size()) break;  // remaining block is numerically zero
      std::size_t i = active[bi], j = active[bj];
      // column op x_i += x_j (and the matching row op): new a_ii = a_ii + 2 a_ij + a_jj
      a.col(i) += a.col(j);
      a.row(i) += a.row(j);
      t.col(i) += t.col(j);
      piv = bi;
    }
    std::size_t p = active[piv];
    CD d = a(p, p);
    CD s = CD(1.0, 0.0) / std::sqrt(d);
    a.col(p) *= s;
    a.row(p) *= s;
    t.col(p) *= s;
    // clear the pivot row/column against the other active columns
    for (std::size_t ai = 0; ai < active.size(); ++ai) {
      std::size_t q = active[ai];
      if (q == p) continue;
      CD f = a(p, q);  // a(p,p) is 1 now
      if (std::abs(f) == 0.0) continue;
      a.col(q) -= f * a.col(p);
      a.row(q) -= f * a.row(p);
      t.col(q) -= f * t.col(p);
    }
    done.push_back(p);
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(piv));
  }

  // Permute finished pivots first so the normal form is diag(1,..,1,0,..,0).
  std::vector<std::size_t> order = done;
  for (std::size_t i : active) order.push_back(i);
  Eigen::MatrixXcd perm = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t c = 0; c < n; ++c) perm(order[c], c) = 1.0;
  Eigen::MatrixXcd tp = t * perm;

  Eigen::MatrixXcd target = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < done.size(); ++i) target(i, i) = 1.0;
  double residual = (tp.transpose() * to_eigen(m) * tp - target).norm();

  CongruenceNormalForm out;
  out.t = from_eigen(tp);
  out.rank = done.size();
  out.residual = residual;
  return out;
}

SkewCongruenceForm skew_congruence_normalize(const Mat<CD>& m, double tol) {
  if (m.rows() != m.cols()) throw InvalidInputError("skew_congruence_normalize: not square");
  const std::size_t n = m.rows();
  const double eps = tol_or_default(tol) * std::max(1.0, m.max_abs());
  Eigen::MatrixXcd a = to_eigen(m);
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Identity(n, n);

  std::vector<std::size_t> done, active;
  for (std::size_t i = 0; i < n; ++i) active.push_back(i);
  while (active.size() >= 2) {
    std::size_t bi = active.size(), bj = active.size();
    double best = eps;
    for (std::size_t ai = 0; ai < active.size(); ++ai)
      for (std::size_t aj = ai + 1; aj < active.size(); ++aj) {
        double v = std::abs(a(active[ai], active[aj]));
        if (v > best) {
          best = v;
          bi = ai;
          bj = aj;
        }
      }
    if (bi == active.size()) break;
    std::size_t i = active[bi], j = active[bj];
    CD s = CD(1.0, 0.0) / a(i, j);  // scale column j so a(i,j) = 1
    a.col(j) *= s;
    a.row(j) *= s;
    t.col(j) *= s;
    for (std::size_t ai = 0; ai < active.size(); ++ai) {
      std::size_t q = active[ai];
      if (q == i || q == j) continue;
      CD fi = a(i, q);  // clear against a(i,j) = 1 via column j
      if (std::abs(fi) != 0.0) {
        a.col(q) -= fi * a.col(j);
        a.row(q) -= fi * a.row(j);
        t.col(q) -= fi * t.col(j);
      }
      CD fj = a(j, q);  // clear against a(j,i) = -1 via column i
      if (std::abs(fj) != 0.0) {
        a.col(q) += fj * a.col(i);
        a.row(q) += fj * a.row(i);
        t.col(q) += fj * t.col(i);
      }
    }
    done.push_back(i);
    done.push_back(j);
    // erase j first (larger index in `active`)
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bi));
  }

  std::vector<std::size_t> order = done;
  for (std::size_t i : active) order.push_back(i);
  Eigen::MatrixXcd perm = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t c = 0; c < n; ++c) perm(order[c], c) = 1.0;
  Eigen::MatrixXcd tp = t * perm;

  Eigen::MatrixXcd target = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t p = 0; p + 1 < done.size(); p += 2) {
    target(p, p + 1) = 1.0;
    target(p + 1, p) = -1.0;
  }
  double residual = (tp.transpose() * to_eigen(m) * tp - target).norm();

  SkewCongruenceForm out;
  out.t = from_eigen(tp);
  out.rank = done.size();
  out.residual = residual;
  return out;
}

}  // namespace ilab

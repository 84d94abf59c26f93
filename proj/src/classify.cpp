#include "instlab/classify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace ilab {

namespace {

double tol_or_default(double tol) { return tol > 0.0 ? tol : Config::get().tolerance; }

double tensor_scale(const SymTensor<CD>& s) {
  double m = 0.0;
  for (const Mat<CD>& b : s.blocks) m = std::max(m, b.max_abs());
  return std::max(m, 1e-300);
}

void projective_normalize(Mat<CD>& v) {
  std::size_t best = 0;
  double bn = -1.0;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    double a = std::abs(v(i, 0));
    if (a > bn) {
      bn = a;
      best = i;
    }
  }
  if (bn > 0.0) v = v.scaled(CD(1.0, 0.0) / v(best, 0));
}

double point_residual(const SymTensor<CD>& s, const Mat<CD>& fstar, const Mat<CD>& bstar) {
  double nf = frob_norm(fstar), nb = frob_norm(bstar);
  if (nf == 0.0 || nb == 0.0) return std::numeric_limits<double>::infinity();
  return frob_norm(contract(s, outer(fstar, bstar))) / (tensor_scale(s) * nf * nb);
}

/// The leading-block normal form: a b-basis change placing the maximal-rank
/// pair contraction in the (0,1) block, then an f-congruence turning that
/// block into diag(1,..,1,0,..,0).
struct Normalized {
  SymTensor<CD> s;   // transformed tensor
  Mat<CD> t4;        // f-congruence: blocks map to t4^T . block . t4
  Mat<Rat> gk;       // b-basis change
  int r = 0;
};

/// Pull a vanishing point of the normalized tensor back to the original.
VanishingPoint pull_back_point(const Normalized& nf, const SymTensor<CD>& original,
                               const Mat<CD>& fstar2, const Mat<CD>& bstar2) {
  VanishingPoint p;
  p.fstar = nf.t4 * fstar2;
  p.bstar = to_complex(nf.gk).transpose() * bstar2;
  projective_normalize(p.fstar);
  projective_normalize(p.bstar);
  p.residual = point_residual(original, p.fstar, p.bstar);
  return p;
}

Normalized normalize_leading(const SymTensor<Rat>& s, const PairRankResult& pr) {
  GroupElement<Rat> gb{Mat<Rat>::identity(4), pr.basis_change,
                       Mat<Rat>::identity(static_cast<std::size_t>(2 * s.k + 2))};
  SymTensor<Rat> sb = act(gb, s);
  CongruenceNormalForm cnf = symmetric_congruence_normalize(to_complex(sb.stored(0, 1)));
  if (cnf.rank != static_cast<std::size_t>(pr.r))
    throw MathFindingError("normalize_leading: congruence rank disagrees with the pair rank");
  GroupElement<CD> gf{cnf.t.transpose(), Mat<CD>::identity(static_cast<std::size_t>(s.k)),
                      Mat<CD>::identity(static_cast<std::size_t>(2 * s.k + 2))};
  Normalized out;
  out.s = act(gf, to_complex(sb));
  out.t4 = cnf.t;
  out.gk = pr.basis_change;
  out.r = pr.r;
  return out;
}

/// After a maximal-rank normalization every block must vanish on the
/// (l, p >= r) corner; a violation means the sampled pair rank was not
/// maximal.
bool corner_vanishes(const SymTensor<CD>& s, int r, double tol) {
  double scale = tensor_scale(s);
  for (int i = 0; i < s.k; ++i)
    for (int j = i + 1; j < s.k; ++j) {
      const Mat<CD>& b = s.stored(i, j);
      for (int l = r; l < 4; ++l)
        for (int p = r; p < 4; ++p)
          if (std::abs(b(static_cast<std::size_t>(l), static_cast<std::size_t>(p))) > tol * scale)
            return false;
    }
  return true;
}

Mat<CD> best_column_direction(const Mat<CD>& m) {
  std::size_t best = 0;
  double bn = -1.0;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double n = frob_norm(m.col(c));
    if (n > bn) {
      bn = n;
      best = c;
    }
  }
  Mat<CD> v(m.cols(), 1);
  v(best, 0) = 1.0;
  return v;
}

}  // namespace

PairRankResult max_pair_rank(const SymTensor<Rat>& s, int repetitions, std::uint64_t seed) {
  if (repetitions < 1) throw InvalidInputError("max_pair_rank: repetitions must be >= 1");
  const int k = s.k;
  Rng rng(seed);
  int best_r = -1;
  Mat<Rat> bc1, bc2;
  for (int rep = 0; rep < repetitions; ++rep) {
    Mat<Rat> c1 = random_matrix<Rat>(rng, static_cast<std::size_t>(k), 1, 5);
    Mat<Rat> c2 = random_matrix<Rat>(rng, static_cast<std::size_t>(k), 1, 5);
    Mat<Rat> m(4, 4);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        if (i == j) continue;
        Rat w = c1(static_cast<std::size_t>(i), 0) * c2(static_cast<std::size_t>(j), 0);
        if (sgn(w) == 0) continue;
        m = m + s.block_ext(i, j).scaled(w);
      }
    int r = static_cast<int>(rank(m));
    if (r > best_r) {
      // the two rows must be extendable to a basis
      Mat<Rat> two = hstack(c1, c2).transpose();
      if (r > 0 && rank(two) < 2) continue;
      best_r = r;
      bc1 = c1;
      bc2 = c2;
    }
  }
  PairRankResult out;
  out.r = best_r < 0 ? 0 : best_r;
  // complete (c1, c2) to an invertible basis change with unit rows
  Mat<Rat> g(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
  std::size_t filled = 0;
  if (out.r > 0) {
    for (int c = 0; c < k; ++c) {
      g(0, static_cast<std::size_t>(c)) = bc1(static_cast<std::size_t>(c), 0);
      g(1, static_cast<std::size_t>(c)) = bc2(static_cast<std::size_t>(c), 0);
    }
    filled = 2;
  }
  for (int e = 0; e < k && filled < static_cast<std::size_t>(k); ++e) {
    Mat<Rat> trial = g;
    trial(filled, static_cast<std::size_t>(e)) = 1;
    if (rank(trial.block(0, 0, filled + 1, static_cast<std::size_t>(k))) == filled + 1) {
      g = trial;
      ++filled;
    }
  }
  if (filled < static_cast<std::size_t>(k)) g = Mat<Rat>::identity(static_cast<std::size_t>(k));
  out.basis_change = g;
  return out;
}

VanishingPoint commuting_pencil_point(const SymTensor<CD>& sn, const std::array<CD, 3>& b345,
                                      const VanishingPoint* near, double tol) {
  if (sn.k != 5) throw InvalidInputError("commuting_pencil_point: charge 5 required");
  if (std::abs(b345[0]) + std::abs(b345[1]) + std::abs(b345[2]) == 0.0)
    throw InvalidInputError("commuting_pencil_point: zero tail direction");
  const double eps = tol_or_default(tol);
  Mat<CD> u(4, 4), v(4, 4);
  for (int t = 0; t < 3; ++t) {
    u = u + sn.stored(0, 2 + t).scaled(b345[static_cast<std::size_t>(t)]);
    v = v + sn.stored(1, 2 + t).scaled(b345[static_cast<std::size_t>(t)]);
  }
  std::vector<CommonEigenvector> cands = common_eigenvector_candidates(u, v, eps);
  if (cands.empty())
    throw NonConvergenceError("commuting_pencil_point: no joint eigenvector found");
  if (near != nullptr) {
    auto proj_dist = [&](const Mat<CD>& f) {
      CD ip = 0.0;
      for (std::size_t i = 0; i < 4; ++i) ip += std::conj(f(i, 0)) * near->fstar(i, 0);
      double nf = frob_norm(f) * frob_norm(near->fstar);
      return nf == 0.0 ? 1.0 : 1.0 - std::abs(ip) / nf;
    };
    std::sort(cands.begin(), cands.end(), [&](const CommonEigenvector& a, const CommonEigenvector& b) {
      return proj_dist(a.f) < proj_dist(b.f);
    });
  }
  for (const CommonEigenvector& ce : cands) {
    // block-row 0 of the flattening gives b1* f* + U f* = 0, block-row 1
    // gives -b0* f* + V f* = 0
    Mat<CD> bstar(5, 1);
    bstar(0, 0) = ce.eig_v;
    bstar(1, 0) = -ce.eig_u;
    bstar(2, 0) = b345[0];
    bstar(3, 0) = b345[1];
    bstar(4, 0) = b345[2];
    double res = point_residual(sn, ce.f, bstar);
    if (res <= 100.0 * eps) {
      VanishingPoint p;
      p.fstar = ce.f;
      p.bstar = bstar;
      projective_normalize(p.fstar);
      projective_normalize(p.bstar);
      p.residual = res;
      return p;
    }
  }
  throw NonConvergenceError("commuting_pencil_point: no eigenvector candidate verified");
}

VanishingPoint dependent_rows_point(const SymTensor<Rat>& s, const Mat<Rat>& n1,
                                    const Mat<Rat>& n2, double tol) {
  if (s.k != 5) throw InvalidInputError("dependent_rows_point: charge 5 required");
  const double eps = tol_or_default(tol);

  // move the line to the span of the first two dual coordinates
  Mat<Rat> g(5, 5);
  for (int c = 0; c < 5; ++c) {
    g(0, static_cast<std::size_t>(c)) = n1(static_cast<std::size_t>(c), 0);
    g(1, static_cast<std::size_t>(c)) = n2(static_cast<std::size_t>(c), 0);
  }
  std::size_t filled = 2;
  if (rank(g.block(0, 0, 2, 5)) < 2)
    throw InvalidInputError("dependent_rows_point: the two covectors do not span a line");
  for (int e = 0; e < 5 && filled < 5; ++e) {
    Mat<Rat> trial = g;
    trial(filled, static_cast<std::size_t>(e)) = 1;
    if (rank(trial.block(0, 0, filled + 1, 5)) == filled + 1) {
      g = trial;
      ++filled;
    }
  }

  PairRankResult pr;
  pr.r = 3;
  pr.basis_change = g;
  GroupElement<Rat> gb{Mat<Rat>::identity(4), g, Mat<Rat>::identity(12)};
  SymTensor<Rat> sb = act(gb, s);
  if (rank(sb.stored(0, 1)) != 3)
    throw InvalidInputError("dependent_rows_point: line is not generic for this tensor");
  Normalized nf = normalize_leading(s, pr);
  if (!corner_vanishes(nf.s, 3, 1e-6))
    throw MathFindingError("dependent_rows_point: corner does not vanish, pair rank is not 3");

  // the two distinguished flattening rows (f-index 3 in the first two block
  // rows) must be dependent; their kernel gives the b*-coefficients on N.
  // Dependence is measured against the tensor's own scale: both rows
  // vanishing is the (valid) degenerate form of it.
  Mat<CD> sig = flattening_sigma(nf.s);
  Mat<CD> rows(20, 2);
  for (std::size_t c = 0; c < 20; ++c) {
    rows(c, 0) = sig(3, c);
    rows(c, 1) = sig(7, c);
  }
  double sscale = tensor_scale(nf.s);
  SvdFull rsvd = svd_full(rows);
  Mat<CD> beta(2, 1);
  if (rsvd.s.empty() || rsvd.s[0] <= 1e-9 * sscale) {
    // both rows vanish: any coefficient pair works, and weighting both line
    // generators keeps the point moving with the full two-parameter family
    beta(0, 0) = 1.0;
    beta(1, 0) = 1.0;
  } else if (rsvd.s.size() > 1 && rsvd.s[1] <= 1e-7 * sscale) {
    beta(0, 0) = rsvd.v(0, 1);
    beta(1, 0) = rsvd.v(1, 1);
  } else {
    throw MathFindingError("dependent_rows_point: distinguished rows are independent");
  }

  Mat<CD> f2(4, 1);
  f2(3, 0) = 1.0;
  Mat<CD> b2(5, 1);
  b2(0, 0) = beta(0, 0);
  b2(1, 0) = beta(1, 0);
  VanishingPoint p = pull_back_point(nf, to_complex(s), f2, b2);
  if (p.residual > 100.0 * eps)
    throw NonConvergenceError("dependent_rows_point: verification failed, residual = " +
                              std::to_string(p.residual));
  return p;
}

namespace {

/// Finite-difference parameter Jacobian of a two-parameter point family; the
/// second singular value certifies two independent motion directions.
template <class F>
double family_jacobian_sigma2(F&& family, double s0, double t0, double h) {
  VanishingPoint c = family(s0, t0, nullptr);
  VanishingPoint ps = family(s0 + h, t0, &c), ms = family(s0 - h, t0, &c);
  VanishingPoint pt = family(s0, t0 + h, &c), mt = family(s0, t0 - h, &c);
  auto chart = [&](const VanishingPoint& p) {
    // both components are normalized to unit max entry at the center's slot
    std::vector<CD> coords;
    std::size_t fi = 0, bi = 0;
    double bf = -1.0, bb = -1.0;
    for (std::size_t i = 0; i < 4; ++i)
      if (std::abs(c.fstar(i, 0)) > bf) {
        bf = std::abs(c.fstar(i, 0));
        fi = i;
      }
    for (std::size_t i = 0; i < p.bstar.rows(); ++i)
      if (std::abs(c.bstar(i, 0)) > bb) {
        bb = std::abs(c.bstar(i, 0));
        bi = i;
      }
    CD fs = p.fstar(fi, 0), bs = p.bstar(bi, 0);
    if (std::abs(fs) < 1e-14 || std::abs(bs) < 1e-14) throw NonConvergenceError("chart degenerate");
    for (std::size_t i = 0; i < 4; ++i) coords.push_back(p.fstar(i, 0) / fs);
    for (std::size_t i = 0; i < p.bstar.rows(); ++i) coords.push_back(p.bstar(i, 0) / bs);
    return coords;
  };
  std::vector<CD> cps = chart(ps), cms = chart(ms), cpt = chart(pt), cmt = chart(mt);
  Mat<CD> jac(2, cps.size());
  for (std::size_t i = 0; i < cps.size(); ++i) {
    jac(0, i) = (cps[i] - cms[i]) / (2.0 * h);
    jac(1, i) = (cpt[i] - cmt[i]) / (2.0 * h);
  }
  std::vector<double> sv = singular_values(jac);
  return sv.size() > 1 ? sv[1] : 0.0;
}

LocusCertificate locus_from_family(
    const std::function<VanishingPoint(double, double, const VanishingPoint*)>& family,
    int npoints, double h = 1e-5) {
  LocusCertificate cert;
  int side = 5;
  while (side * side < npoints) ++side;
  double lo = -1.0, hi = 1.0;
  for (int a = 0; a < side && static_cast<int>(cert.points.size()) < npoints; ++a)
    for (int b = 0; b < side && static_cast<int>(cert.points.size()) < npoints; ++b) {
      double sv = lo + (hi - lo) * a / (side - 1);
      double tv = lo + (hi - lo) * b / (side - 1);
      try {
        cert.points.push_back(family(sv, tv, nullptr));
      } catch (const std::exception&) {
        // degenerate parameter; the grid has spares
      }
    }
  const std::array<std::pair<double, double>, 3> centers = {{{0.3, 0.7}, {-0.55, 0.15}, {0.85, -0.4}}};
  for (auto [s0, t0] : centers) {
    try {
      cert.jacobian_sigma2 = family_jacobian_sigma2(family, s0, t0, h);
    } catch (const std::exception&) {
      continue;
    }
    if (cert.jacobian_sigma2 > 1e-6) break;
  }
  cert.dim_ge_2 = static_cast<int>(cert.points.size()) >= std::min(npoints, 20) &&
                  cert.jacobian_sigma2 > 1e-6;
  return cert;
}

LocusCertificate locus_pair4(const SymTensor<Rat>& s, const PairRankResult& pr, int npoints) {
  Normalized nf = normalize_leading(s, pr);  // r = 4 leaves no corner to check
  SymTensor<CD> scd = to_complex(s);
  auto family = [nf, scd](double sv, double tv, const VanishingPoint* near) {
    std::array<CD, 3> b345 = {CD(1.0, 0.0), CD(sv, 0.0), CD(tv, 0.0)};
    VanishingPoint p2 = commuting_pencil_point(nf.s, b345, near);
    // p2 is already normalized; track branches in normalized coordinates,
    // then pull back
    VanishingPoint p = pull_back_point(nf, scd, p2.fstar, p2.bstar);
    if (p.residual > 1e-6)
      throw NonConvergenceError("locus point failed verification against the original tensor");
    // keep the normalized-coordinate data for branch tracking
    p.fstar = p2.fstar;
    p.bstar = p2.bstar;
    return p;
  };
  // build with normalized-coordinate points for the Jacobian, then pull all
  // points back for the certificate
  LocusCertificate raw = locus_from_family(family, npoints);
  LocusCertificate cert;
  cert.jacobian_sigma2 = raw.jacobian_sigma2;
  for (const VanishingPoint& p2 : raw.points)
    cert.points.push_back(pull_back_point(nf, scd, p2.fstar, p2.bstar));
  cert.dim_ge_2 = raw.dim_ge_2;
  for (const VanishingPoint& p : cert.points)
    if (p.residual > 1e-6) cert.dim_ge_2 = false;
  return cert;
}

LocusCertificate locus_pair3(const SymTensor<Rat>& s, int npoints, std::uint64_t seed) {
  Rng rng(seed);
  // a two-parameter family of lines through two moving rational covectors
  Mat<Rat> n1 = random_matrix<Rat>(rng, 5, 1, 5), n2 = random_matrix<Rat>(rng, 5, 1, 5);
  Mat<Rat> d1 = random_matrix<Rat>(rng, 5, 1, 5), d2 = random_matrix<Rat>(rng, 5, 1, 5);
  auto family = [&](double sv, double tv, const VanishingPoint*) {
    // rational parameters keep the pipeline exact until the final float steps
    Rat rs(static_cast<long>(std::lround(sv * 65536.0)), 65536L);
    Rat rt(static_cast<long>(std::lround(tv * 65536.0)), 65536L);
    Mat<Rat> m1 = n1 + d1.scaled(rs);
    Mat<Rat> m2 = n2 + d2.scaled(rt);
    return dependent_rows_point(s, m1, m2);
  };
  return locus_from_family(family, npoints, 1.0 / 256.0);
}

SymClassification rank_one_witness(const SymTensor<Rat>& s, std::size_t rk, int r0,
                                   std::uint64_t seed) {
  SymTensor<CD> scd = to_complex(s);
  double scale = tensor_scale(scd);
  for (int attempt = 0; attempt < 8; ++attempt) {
    PairRankResult pr = max_pair_rank(s, 50, seed + static_cast<std::uint64_t>(attempt) * 7919);
    if (pr.r != r0) continue;  // resample; the max is attained generically
    Normalized nf;
    try {
      nf = normalize_leading(s, pr);
    } catch (const MathFindingError&) {
      continue;
    }
    if (!corner_vanishes(nf.s, nf.r, 1e-6)) continue;

    auto h = [&](int l, int p) { return sigma_hat_block(nf.s, l, p); };
    // candidate supports: a single nonzero block of the stacked covector,
    // paired with the two skew blocks it meets
    struct Cand {
      int slot;
      bool direct;
    };
    const std::array<Cand, 4> cands = {{{2, false}, {3, false}, {1, false}, {0, true}}};
    for (const Cand& cand : cands) {
      Mat<CD> b2(4, static_cast<std::size_t>(s.k));
      if (cand.direct) {
        Mat<CD> h00 = h(0, 0);
        if (h00.max_abs() <= 1e-9 * scale) continue;
        Mat<CD> v = best_column_direction(h00);
        for (int i = 0; i < s.k; ++i) b2(0, static_cast<std::size_t>(i)) = v(static_cast<std::size_t>(i), 0);
      } else {
        Mat<CD> h0 = h(0, cand.slot), h1 = h(1, cand.slot);
        if (std::max(h0.max_abs(), h1.max_abs()) <= 1e-9 * scale) continue;
        Mat<CD> v;
        try {
          v = skew_pencil_solve(h0, h1).v0;
        } catch (const std::exception&) {
          continue;
        }
        for (int i = 0; i < s.k; ++i)
          b2(static_cast<std::size_t>(cand.slot), static_cast<std::size_t>(i)) =
              v(static_cast<std::size_t>(i), 0);
      }
      // pull the covector pair back and verify the rank-one image on the
      // original tensor
      Mat<CD> bstar = nf.t4 * b2 * to_complex(nf.gk);
      Mat<CD> image = contract(scd, bstar);
      SvdFull svd = svd_full(image);
      if (svd.s.empty()) continue;
      double sv1 = svd.s[0], sv2 = svd.s.size() > 1 ? svd.s[1] : 0.0;
      if (sv1 <= 1e-6 * scale || sv2 > 1e-7 * sv1) continue;
      SymClassification out;
      out.rk = rk;
      out.r = r0;
      out.kind = SCaseKind::RankOneImage;
      out.rank_one_bstar = bstar;
      out.image_sv1 = sv1;
      out.image_sv2 = sv2;
      out.f0 = svd.u.col(0).scaled(CD(sv1, 0.0));
      Mat<CD> b0(svd.v.rows(), 1);
      for (std::size_t i = 0; i < svd.v.rows(); ++i) b0(i, 0) = std::conj(svd.v(i, 0));
      out.b0 = b0;
      return out;
    }
  }
  throw MathFindingError("classify: no rank-one image witness found in the pair-rank <= 2 case");
}

}  // namespace

SymClassification classify(const SymTensor<Rat>& s, std::uint64_t seed) {
  const int k = s.k;
  if (k < 2 || k > 5) throw InvalidInputError("classify: charge must be in 2..5");
  std::size_t rk = flattening_rank(s);
  if (rk < 2 || rk > static_cast<std::size_t>(2 * k - 2))
    throw InvalidInputError("classify: flattening rank out of the classified range");

  PairRankResult pr = max_pair_rank(s, 50, seed);
  if (pr.r <= 2) return rank_one_witness(s, rk, pr.r, seed);

  if (pr.r == 3 && rk == 6) {
    // exact kernel of f* -> (rho(S, f* (x) b_j*))_j
    const std::size_t out_dim = static_cast<std::size_t>(4 * k);
    Mat<Rat> kmat(out_dim * static_cast<std::size_t>(k), 4);
    for (int i = 0; i < 4; ++i) {
      Mat<Rat> ei(4, 1);
      ei(static_cast<std::size_t>(i), 0) = 1;
      for (int j = 0; j < k; ++j) {
        Mat<Rat> ej(static_cast<std::size_t>(k), 1);
        ej(static_cast<std::size_t>(j), 0) = 1;
        Mat<Rat> im = contract(s, outer(ei, ej));
        for (int p = 0; p < 4; ++p)
          for (int q = 0; q < k; ++q)
            kmat(static_cast<std::size_t>(j) * out_dim + static_cast<std::size_t>(p * k + q),
                 static_cast<std::size_t>(i)) = im(static_cast<std::size_t>(p), static_cast<std::size_t>(q));
      }
    }
    std::vector<Mat<Rat>> kern = kernel_basis(kmat);
    if (kern.empty())
      throw MathFindingError("classify: rank 6 with pair rank 3 but no annihilating covector");
    Mat<Rat> f0 = kern.front();
    for (int j = 0; j < k; ++j) {
      Mat<Rat> ej(static_cast<std::size_t>(k), 1);
      ej(static_cast<std::size_t>(j), 0) = 1;
      if (!contract(s, outer(f0, ej)).is_zero())
        throw MathFindingError("classify: annihilating covector failed exact verification");
    }
    SymClassification out;
    out.rk = rk;
    out.r = pr.r;
    out.kind = SCaseKind::AnnihilatingCovector;
    out.annihilator = f0;
    return out;
  }

  if (k == 5 && rk == 8 && (pr.r == 4 || pr.r == 3)) {
    LocusCertificate cert = pr.r == 4 ? locus_pair4(s, pr, 25) : locus_pair3(s, 25, seed ^ 0xabcdef);
    if (!cert.dim_ge_2)
      throw MathFindingError("classify: rank 8 case failed to certify a 2-dimensional locus");
    SymClassification out;
    out.rk = rk;
    out.r = pr.r;
    out.kind = SCaseKind::LargeVanishingLocus;
    out.locus = std::move(cert);
    return out;
  }

  throw MathFindingError("classify: (pair rank, flattening rank) = (" + std::to_string(pr.r) + ", " +
                         std::to_string(rk) + ") does not match any case");
}

VanishingProbe vanishing_locus_probe(const SymTensor<Rat>& s, int trials, std::uint64_t seed) {
  VanishingProbe probe;
  probe.trials = trials;
  if (s.is_zero()) {
    // everything vanishes; any affine family certifies
    Rng rng(seed);
    Mat<Rat> f0 = random_matrix<Rat>(rng, 4, 1, 5), df = random_matrix<Rat>(rng, 4, 1, 5);
    Mat<Rat> b0 = random_matrix<Rat>(rng, static_cast<std::size_t>(s.k), 1, 5);
    Mat<Rat> db = random_matrix<Rat>(rng, static_cast<std::size_t>(s.k), 1, 5);
    auto family = [&](double sv, double tv, const VanishingPoint*) {
      VanishingPoint p;
      p.fstar = to_complex(f0) + to_complex(df).scaled(CD(sv, 0.0));
      p.bstar = to_complex(b0) + to_complex(db).scaled(CD(tv, 0.0));
      if (frob_norm(p.fstar) < 1e-9 || frob_norm(p.bstar) < 1e-9)
        throw NonConvergenceError("degenerate family point");
      projective_normalize(p.fstar);
      projective_normalize(p.bstar);
      p.residual = 0.0;
      return p;
    };
    LocusCertificate cert = locus_from_family(family, std::max(trials, 25));
    probe.hits = static_cast<int>(cert.points.size());
    probe.points = std::move(cert.points);
    probe.jacobian_sigma2 = cert.jacobian_sigma2;
    probe.dim_ge_2 = cert.dim_ge_2;
    return probe;
  }

  SymClassification cls = classify(s, seed);
  switch (cls.kind) {
    case SCaseKind::RankOneImage:
      // no two-parameter family from this branch; the witness itself is the
      // only evidence
      probe.hits = 0;
      probe.dim_ge_2 = false;
      return probe;
    case SCaseKind::AnnihilatingCovector: {
      // {f0} x P^{k-1*} sits inside the locus: an affine family in b* alone
      Rng rng(seed + 1);
      Mat<Rat> f0 = *cls.annihilator;
      Mat<Rat> b0 = random_matrix<Rat>(rng, static_cast<std::size_t>(s.k), 1, 5);
      Mat<Rat> d1 = random_matrix<Rat>(rng, static_cast<std::size_t>(s.k), 1, 5);
      Mat<Rat> d2 = random_matrix<Rat>(rng, static_cast<std::size_t>(s.k), 1, 5);
      SymTensor<CD> scd = to_complex(s);
      auto family = [&](double sv, double tv, const VanishingPoint*) {
        Rat rs(static_cast<long>(std::lround(sv * 65536.0)), 65536L);
        Rat rt(static_cast<long>(std::lround(tv * 65536.0)), 65536L);
        Mat<Rat> b = b0 + d1.scaled(rs) + d2.scaled(rt);
        if (!contract(s, outer(f0, b)).is_zero())
          throw MathFindingError("annihilator family failed an exact evaluation");
        VanishingPoint p;
        p.fstar = to_complex(f0);
        p.bstar = to_complex(b);
        if (frob_norm(p.bstar) < 1e-12) throw NonConvergenceError("degenerate family point");
        projective_normalize(p.fstar);
        projective_normalize(p.bstar);
        p.residual = point_residual(scd, p.fstar, p.bstar);
        return p;
      };
      LocusCertificate cert = locus_from_family(family, std::max(trials, 25), 1.0 / 256.0);
      probe.hits = static_cast<int>(cert.points.size());
      probe.points = std::move(cert.points);
      probe.jacobian_sigma2 = cert.jacobian_sigma2;
      probe.dim_ge_2 = cert.dim_ge_2;
      return probe;
    }
    case SCaseKind::LargeVanishingLocus: {
      const LocusCertificate& cert = *cls.locus;
      probe.hits = static_cast<int>(cert.points.size());
      probe.points = cert.points;
      probe.jacobian_sigma2 = cert.jacobian_sigma2;
      probe.dim_ge_2 = cert.dim_ge_2;
      return probe;
    }
  }
  return probe;
}

// ---- generators ------------------------------------------------------------

namespace {

Mat<Rat> random_sym_rank(Rng& rng, int n, int r, long long span) {
  Mat<Rat> q(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int t = 0; t < r; ++t) {
    Mat<Rat> v = random_matrix<Rat>(rng, static_cast<std::size_t>(n), 1, span);
    q = q + (v * v.transpose()).scaled(Rat(rng.below(2) ? 1 : -1));
  }
  return q;
}

/// Skew k x k with rank exactly 2 supported on the given index pair
/// directions.
Mat<Rat> random_wedge(Rng& rng, int k, long long span) {
  for (;;) {
    Mat<Rat> x = random_matrix<Rat>(rng, static_cast<std::size_t>(k), 1, span);
    Mat<Rat> y = random_matrix<Rat>(rng, static_cast<std::size_t>(k), 1, span);
    Mat<Rat> w = x * y.transpose() - y * x.transpose();
    if (rank(w) == 2) return w;
  }
}

Mat<Rat> coordinate_wedge(int k, int i, int j) {
  Mat<Rat> w(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
  w(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = 1;
  w(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = -1;
  return w;
}

SymTensor<Rat> from_kron_terms(int k, const std::vector<std::pair<Mat<Rat>, Mat<Rat>>>& terms) {
  SymTensor<Rat> s(k);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      Mat<Rat> acc(4, 4);
      for (const auto& [w, q] : terms) {
        const Rat& c = w(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        if (sgn(c) != 0) acc = acc + q.scaled(c);
      }
      s.stored(i, j) = acc;
    }
  return s;
}

}  // namespace

SymTensor<Rat> random_low_pair_rank(int k, int r, std::uint64_t seed) {
  if (k < 2 || r < 1 || r > 2) throw InvalidInputError("random_low_pair_rank: bad parameters");
  Rng rng(seed);
  for (int attempt = 0; attempt < 40; ++attempt) {
    Mat<Rat> q = random_sym_rank(rng, 4, r, 4);
    Mat<Rat> w = random_wedge(rng, k, 4);
    SymTensor<Rat> s = from_kron_terms(k, {{w, q}});
    if (flattening_rank(s) != static_cast<std::size_t>(2 * r)) continue;
    if (max_pair_rank(s, 25, rng.next_u64()).r != r) continue;
    return s;
  }
  throw NonConvergenceError("random_low_pair_rank: retry budget exhausted");
}

SymTensor<Rat> random_rank6(int k, std::uint64_t seed) {
  if (k < 4 || k > 5) throw InvalidInputError("random_rank6: charge must be 4 or 5");
  Rng rng(seed);
  for (int attempt = 0; attempt < 40; ++attempt) {
    Mat<Rat> q = random_sym_rank(rng, 4, 3, 4);
    if (rank(q) != 3) continue;
    Mat<Rat> w = random_wedge(rng, k, 4);
    SymTensor<Rat> s = from_kron_terms(k, {{w, q}});
    if (flattening_rank(s) != 6) continue;
    if (max_pair_rank(s, 25, rng.next_u64()).r != 3) continue;
    return s;
  }
  throw NonConvergenceError("random_rank6: retry budget exhausted");
}

SymTensor<Rat> random_rank8_pair4(std::uint64_t seed) {
  Rng rng(seed);
  const int k = 5;
  for (int attempt = 0; attempt < 40; ++attempt) {
    // six pairwise-commuting symmetric blocks as polynomials in one matrix
    Mat<Rat> d = random_sym_rank(rng, 4, 4, 3);
    auto poly = [&]() {
      Mat<Rat> m = Mat<Rat>::identity(4).scaled(random_rat(rng, 3));
      m = m + d.scaled(random_rat(rng, 3));
      m = m + (d * d).scaled(random_rat(rng, 2));
      return m;
    };
    SymTensor<Rat> s(k);
    s.stored(0, 1) = Mat<Rat>::identity(4);
    Mat<Rat> a2 = poly(), a3 = poly(), a4 = poly();
    Mat<Rat> b2 = poly(), b3 = poly(), b4 = poly();
    s.stored(0, 2) = a2;
    s.stored(0, 3) = a3;
    s.stored(0, 4) = a4;
    s.stored(1, 2) = b2;
    s.stored(1, 3) = b3;
    s.stored(1, 4) = b4;
    const Mat<Rat>* as[3] = {&a2, &a3, &a4};
    const Mat<Rat>* bs[3] = {&b2, &b3, &b4};
    for (int i = 2; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j)
        s.stored(i, j) = (*as[i - 2]) * (*bs[j - 2]) - (*bs[i - 2]) * (*as[j - 2]);
    if (flattening_rank(s) != 8) continue;
    if (max_pair_rank(s, 25, rng.next_u64()).r != 4) continue;
    // disguise the normalized shape with a random exact coordinate change
    GroupElement<Rat> g = random_group_element<Rat>(rng, k, 1);
    SymTensor<Rat> sd = act(g, s);
    if (flattening_rank(sd) != 8) continue;
    return sd;
  }
  throw NonConvergenceError("random_rank8_pair4: retry budget exhausted");
}

SymTensor<Rat> random_rank8_pair3(std::uint64_t seed) {
  Rng rng(seed);
  const int k = 5;
  for (int attempt = 0; attempt < 60; ++attempt) {
    Mat<Rat> rproj = random_matrix<Rat>(rng, 3, 4, 3);
    if (rank(rproj) != 3) continue;
    Mat<Rat> q3 = random_sym_rank(rng, 3, 3, 3);
    if (rank(q3) != 3) continue;
    Mat<Rat> v = random_matrix<Rat>(rng, 3, 1, 3);
    Mat<Rat> a = rproj.transpose() * q3 * rproj;
    Mat<Rat> b = rproj.transpose() * (v * v.transpose()) * rproj;
    Mat<Rat> w1 = random_wedge(rng, k, 3), w2 = random_wedge(rng, k, 3);
    SymTensor<Rat> s = from_kron_terms(k, {{w1, a}, {w2, b}});
    if (flattening_rank(s) != 8) continue;
    if (max_pair_rank(s, 25, rng.next_u64()).r != 3) continue;
    return s;
  }
  throw NonConvergenceError("random_rank8_pair3: retry budget exhausted");
}

SymTensor<Rat> random_sym_of_rank(int k, int target_rank, std::uint64_t seed) {
  if (k < 2 || target_rank < 0 || target_rank % 2 != 0 || target_rank > 4 * k)
    throw InvalidInputError("random_sym_of_rank: bad parameters");
  if (target_rank == 0) return SymTensor<Rat>(k);
  Rng rng(seed);
  std::vector<std::pair<int, int>> fresh;
  for (int i = 0; i + 1 < k; i += 2) fresh.emplace_back(i, i + 1);
  for (int attempt = 0; attempt < 60; ++attempt) {
    std::vector<std::pair<Mat<Rat>, Mat<Rat>>> terms;
    int remaining = target_rank;
    std::size_t pair_at = 0;
    while (remaining > 0) {
      int q = std::min(4, remaining / 2);
      if (q == 0) break;
      Mat<Rat> wedge;
      if (pair_at < fresh.size()) {
        auto [i, j] = fresh[pair_at++];
        wedge = coordinate_wedge(k, i, j);
      } else {
        wedge = random_wedge(rng, k, 3);
      }
      terms.emplace_back(wedge, random_sym_rank(rng, 4, q, 3));
      remaining -= 2 * q;
    }
    if (remaining != 0) continue;
    SymTensor<Rat> s = from_kron_terms(k, terms);
    if (flattening_rank(s) == static_cast<std::size_t>(target_rank)) return s;
  }
  throw InvalidInputError("random_sym_of_rank: target rank unreachable within the retry budget");
}

}  // namespace ilab

#include "instlab/planes.hpp"

#include <algorithm>
#include <cmath>

namespace ilab {

namespace {

template <class T>
std::size_t backend_rank(const Mat<T>& m) {
  if constexpr (is_exact_v<T>) return rank(m);
  else return rank_svd(m);
}

void projective_normalize_cd(Mat<CD>& v) {
  std::size_t best = 0;
  double bn = -1.0;
  for (std::size_t i = 0; i < v.rows(); ++i)
    if (std::abs(v(i, 0)) > bn) {
      bn = std::abs(v(i, 0));
      best = i;
    }
  if (bn > 0.0) v = v.scaled(CD(1.0, 0.0) / v(best, 0));
}

/// Basis completion for the pencil: w1, w2 span the common kernel of the two
/// covectors, w3, w4 complete to a basis of C^4.
struct PencilFrame {
  Mat<CD> w1, w2, w3, w4;
};

PencilFrame pencil_frame(const Mat<CD>& f0, const Mat<CD>& f1) {
  Mat<CD> stacked(2, 4);
  for (int i = 0; i < 4; ++i) {
    stacked(0, static_cast<std::size_t>(i)) = f0(static_cast<std::size_t>(i), 0);
    stacked(1, static_cast<std::size_t>(i)) = f1(static_cast<std::size_t>(i), 0);
  }
  if (rank_svd(stacked, 1e-9) < 2)
    throw InvalidInputError("w_line_probe: pencil covectors are dependent");
  std::vector<Mat<CD>> kern = nullspace_svd(stacked);
  if (kern.size() != 2) throw InvalidInputError("w_line_probe: degenerate pencil kernel");
  PencilFrame fr;
  fr.w1 = kern[0];
  fr.w2 = kern[1];
  // complete with the two coordinate directions most independent of the kernel
  Mat<CD> base = hstack(fr.w1, fr.w2);
  std::vector<Mat<CD>> completion;
  for (int e = 0; e < 4 && completion.size() < 2; ++e) {
    Mat<CD> u(4, 1);
    u(static_cast<std::size_t>(e), 0) = 1.0;
    Mat<CD> trial = base;
    for (const Mat<CD>& c : completion) trial = hstack(trial, c);
    trial = hstack(trial, u);
    if (rank_svd(trial, 1e-9) == trial.cols()) completion.push_back(u);
  }
  if (completion.size() != 2) throw NonConvergenceError("w_line_probe: basis completion failed");
  fr.w3 = completion[0];
  fr.w4 = completion[1];
  return fr;
}

/// The moving plane vector: w3(t) = (f*(t).w4) w3 - (f*(t).w3) w4, linear in
/// t and spanning H(t) together with w1, w2.
Mat<CD> moving_vector(const PencilFrame& fr, const Mat<CD>& f0, const Mat<CD>& f1, CD t) {
  auto pair_with = [&](const Mat<CD>& w) {
    CD a = 0.0;
    for (int i = 0; i < 4; ++i)
      a += (f0(static_cast<std::size_t>(i), 0) + t * f1(static_cast<std::size_t>(i), 0)) *
           w(static_cast<std::size_t>(i), 0);
    return a;
  };
  return fr.w3.scaled(pair_with(fr.w4)) - fr.w4.scaled(pair_with(fr.w3));
}

Mat<CD> restriction_at(const ATensor<CD>& a, const PencilFrame& fr, const Mat<CD>& f0,
                       const Mat<CD>& f1, CD t) {
  std::vector<Mat<CD>> basis = {fr.w1, fr.w2, moving_vector(fr, f0, f1, t)};
  return plane_restriction_matrix(a, basis);
}

/// Exact-rank check at a rational parameter near the float root.
bool exact_snap_check(const ATensor<Rat>& a, const Mat<Rat>& f0, const Mat<Rat>& f1, CD t) {
  if (std::abs(t.imag()) > 1e-7 * (1.0 + std::abs(t))) return false;
  // continued-fraction rationalization with a bounded denominator
  double x = t.real();
  long num = 0, den = 1;
  {
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double v = x;
    for (int it = 0; it < 24; ++it) {
      double fl = std::floor(v);
      long ai = static_cast<long>(fl);
      long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
      if (std::abs(q2) > 1000000) break;
      p0 = p1;
      q0 = q1;
      p1 = p2;
      q1 = q2;
      if (std::abs(v - fl) < 1e-12) break;
      v = 1.0 / (v - fl);
    }
    num = p1;
    den = q1 == 0 ? 1 : q1;
  }
  if (std::abs(x - static_cast<double>(num) / static_cast<double>(den)) > 1e-7 * (1.0 + std::abs(x)))
    return false;
  Rat tr(num, den);
  tr.canonicalize();
  Mat<Rat> fst = f0 + f1.scaled(tr);
  if (fst.is_zero()) return false;
  return h0_plane(a, fst) >= 1;
}

}  // namespace

template <class T>
UnstableTestResult<T> unstable_plane_test(const ATensor<T>& a, const Mat<T>& fstar) {
  if (fstar.rows() != 4 || fstar.cols() != 1 || fstar.is_zero())
    throw InvalidInputError("unstable_plane_test: nonzero covector in C^4* required");
  const int k = a.k;
  Mat<T> beta = symplectic_pairing(a);
  Mat<T> cols(static_cast<std::size_t>(4 * k), static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < 4; ++i)
      cols(static_cast<std::size_t>(i * k + j), static_cast<std::size_t>(j)) =
          fstar(static_cast<std::size_t>(i), 0);
  Mat<T> assembled = hstack(beta, cols);
  std::size_t rb = backend_rank(beta);
  std::size_t ra = backend_rank(assembled);
  UnstableTestResult<T> out;
  out.intersection_dim = rb + static_cast<std::size_t>(k) - ra;
  out.unstable = out.intersection_dim >= 1;
  if (out.unstable) {
    std::vector<Mat<T>> kern;
    if constexpr (is_exact_v<T>) kern = kernel_basis(assembled);
    else kern = nullspace_svd(assembled);
    for (const Mat<T>& v : kern) {
      Mat<T> b(static_cast<std::size_t>(k), 1);
      bool nonzero = false;
      for (int j = 0; j < k; ++j) {
        b(static_cast<std::size_t>(j), 0) = v(static_cast<std::size_t>(2 * k + 2 + j), 0);
        if (!scalar_is_zero(b(static_cast<std::size_t>(j), 0))) nonzero = true;
      }
      if (nonzero) {
        out.bstar = b;
        break;
      }
    }
  }
  return out;
}

std::vector<PlanePoint> w_line_probe(const ATensor<CD>& a, const Mat<CD>& f0star,
                                     const Mat<CD>& f1star, const ATensor<Rat>* exact,
                                     std::uint64_t seed) {
  const int k = a.k;
  const std::size_t full = static_cast<std::size_t>(2 * k + 2);
  PencilFrame fr = pencil_frame(f0star, f1star);
  Rng rng(seed);

  auto verify_hit = [&](CD t) -> std::optional<PlanePoint> {
    Mat<CD> fst = f0star + f1star.scaled(t);
    if (frob_norm(fst) < 1e-9) return std::nullopt;
    std::size_t h0 = static_cast<std::size_t>(a.h_dim()) - rank_svd(restriction_at(a, fr, f0star, f1star, t));
    if (h0 < 1) return std::nullopt;
    PlanePoint p;
    p.fstar = fst;
    projective_normalize_cd(p.fstar);
    p.h0 = h0;
    UnstableTestResult<CD> ut = unstable_plane_test(a, fst);
    if (ut.bstar.has_value()) {
      p.bstar = *ut.bstar;
      projective_normalize_cd(*p.bstar);
    }
    if (exact != nullptr) {
      // rational pencil data is recoverable only when the inputs were exact;
      // snap the parameter and re-check with exact rank
      Mat<Rat> f0r(4, 1), f1r(4, 1);
      bool rational_inputs = true;
      for (int i = 0; i < 4; ++i) {
        CD v0 = f0star(static_cast<std::size_t>(i), 0), v1 = f1star(static_cast<std::size_t>(i), 0);
        if (std::abs(v0.imag()) > 0 || std::abs(v1.imag()) > 0 ||
            v0.real() != std::round(v0.real()) || v1.real() != std::round(v1.real())) {
          rational_inputs = false;
          break;
        }
        f0r(static_cast<std::size_t>(i), 0) = Rat(static_cast<long>(v0.real()));
        f1r(static_cast<std::size_t>(i), 0) = Rat(static_cast<long>(v1.real()));
      }
      if (rational_inputs) p.exact_verified = exact_snap_check(*exact, f0r, f1r, t);
    }
    return p;
  };

  std::vector<PlanePoint> hits;
  // The t-linear part of the restriction matrix has rank <= k, so the
  // determinant of the randomly compressed square matrix has degree <= k in
  // t; interpolate it on a circle and take companion roots.
  const std::size_t npts = static_cast<std::size_t>(k) + 1;
  Mat<CD> compress = random_matrix<CD>(rng, full, static_cast<std::size_t>(3 * k));
  Mat<CD> vand(npts, npts);
  Mat<CD> rhs(npts, 1);
  std::size_t singular_samples = 0;
  for (std::size_t p = 0; p < npts; ++p) {
    double th = 2.0 * 3.14159265358979323846 * static_cast<double>(p) / static_cast<double>(npts) + 0.61;
    CD t = 1.7 * CD(std::cos(th), std::sin(th));
    CD pw = 1.0;
    for (std::size_t c = 0; c < npts; ++c) {
      vand(p, c) = pw;
      pw *= t;
    }
    Mat<CD> m = compress * restriction_at(a, fr, f0star, f1star, t);
    rhs(p, 0) = det_cd(m);
    if (rank_svd(m, 1e-10) < full) ++singular_samples;
  }
  // a degree <= k polynomial vanishing at k+1 sample points is identically
  // zero; rank deficiency at the samples is the scale-free version of that
  if (singular_samples == npts) {
    // singular along the whole pencil: every plane on it is unstable;
    // report a handful of sample parameters
    for (double tv : {0.0, 1.0, -1.0, 0.5, -2.0}) {
      auto p = verify_hit(CD(tv, 0.0));
      if (p.has_value()) hits.push_back(std::move(*p));
    }
    return hits;
  }
  Mat<CD> coeff = lstsq_min_norm(vand, rhs);
  std::vector<CD> coeffs;
  for (std::size_t i = 0; i < npts; ++i) coeffs.push_back(coeff(i, 0));
  std::vector<CD> roots = poly_roots(coeffs, 1e-9);
  std::sort(roots.begin(), roots.end(), [](const CD& x, const CD& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  std::vector<CD> unique_roots;
  for (const CD& r : roots) {
    if (!unique_roots.empty() && std::abs(r - unique_roots.back()) <= 1e-6 * (1.0 + std::abs(r)))
      continue;
    unique_roots.push_back(r);
  }
  for (const CD& t : unique_roots) {
    auto p = verify_hit(t);
    if (p.has_value()) hits.push_back(std::move(*p));
  }
  return hits;
}

DimensionProbe w_dimension_probe(const ATensor<CD>& a, int trials, std::uint64_t seed,
                                 const ATensor<Rat>* exact) {
  if (trials < 1) throw InvalidInputError("w_dimension_probe: trials must be >= 1");
  DimensionProbe probe;
  probe.trials = trials;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    Mat<CD> f0(4, 1), f1(4, 1);
    for (int i = 0; i < 4; ++i) {
      f0(static_cast<std::size_t>(i), 0) = CD(static_cast<double>(rng.int_range(-9, 9)), 0.0);
      f1(static_cast<std::size_t>(i), 0) = CD(static_cast<double>(rng.int_range(-9, 9)), 0.0);
    }
    Mat<CD> stacked(2, 4);
    for (int i = 0; i < 4; ++i) {
      stacked(0, static_cast<std::size_t>(i)) = f0(static_cast<std::size_t>(i), 0);
      stacked(1, static_cast<std::size_t>(i)) = f1(static_cast<std::size_t>(i), 0);
    }
    if (rank_svd(stacked, 1e-9) < 2) {
      --t;
      continue;
    }
    std::vector<PlanePoint> hits = w_line_probe(a, f0, f1, exact, rng.next_u64());
    if (!hits.empty()) {
      ++probe.hits;
      for (PlanePoint& p : hits) probe.hit_points.push_back(std::move(p));
    }
  }
  probe.dim_ge_2 = trials >= 20 && probe.hits * 5 >= trials * 4;
  return probe;
}

QuadricFitResult quadric_fit(const std::vector<PlanePoint>& points) {
  QuadricFitResult out;
  if (points.size() < 9) {
    out.underdetermined = true;
    return out;
  }
  std::size_t held = std::min<std::size_t>(3, points.size() - 9);
  std::size_t nfit = points.size() - held;
  auto pairs4 = sym4_pairs();
  Mat<CD> eval(nfit, kSymPairCount);
  for (std::size_t r = 0; r < nfit; ++r) {
    Mat<CD> x = points[r].fstar;
    double nx = frob_norm(x);
    for (int c = 0; c < kSymPairCount; ++c) {
      auto [l, p] = pairs4[static_cast<std::size_t>(c)];
      eval(r, static_cast<std::size_t>(c)) =
          x(static_cast<std::size_t>(l), 0) * x(static_cast<std::size_t>(p), 0) / (nx * nx);
    }
  }
  SvdFull svd = svd_full(eval);
  // least-norm kernel direction: the right singular vector of the smallest
  // singular value
  std::size_t last = svd.v.cols() - 1;
  Mat<CD> c(kSymPairCount, 1);
  for (int i = 0; i < kSymPairCount; ++i)
    c(static_cast<std::size_t>(i), 0) = svd.v(static_cast<std::size_t>(i), last);
  for (int i = 0; i < kSymPairCount; ++i) out.coeffs[static_cast<std::size_t>(i)] = c(static_cast<std::size_t>(i), 0);

  double res = 0.0;
  std::size_t from = held > 0 ? nfit : 0;
  std::size_t to = held > 0 ? points.size() : nfit;
  for (std::size_t r = from; r < to; ++r) {
    const Mat<CD>& x = points[r].fstar;
    double nx = frob_norm(x);
    CD v = 0.0;
    for (int ci = 0; ci < kSymPairCount; ++ci) {
      auto [l, p] = pairs4[static_cast<std::size_t>(ci)];
      v += out.coeffs[static_cast<std::size_t>(ci)] * x(static_cast<std::size_t>(l), 0) *
           x(static_cast<std::size_t>(p), 0) / (nx * nx);
    }
    res = std::max(res, std::abs(v));
  }
  out.residual = res;
  return out;
}

template UnstableTestResult<Rat> unstable_plane_test(const ATensor<Rat>&, const Mat<Rat>&);
template UnstableTestResult<CD> unstable_plane_test(const ATensor<CD>&, const Mat<CD>&);

}  // namespace ilab

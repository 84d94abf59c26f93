#include "instlab/audit.hpp"

#include <cmath>

namespace ilab {

namespace {

template <class T>
std::size_t backend_rank(const Mat<T>& m) {
  if constexpr (is_exact_v<T>) return rank(m);
  else return rank_svd(m);
}

long long orbit_dim(int k) { return 3ll * k * k + 5 * k + 3; }

}  // namespace

template <class T>
std::pair<std::size_t, long long> tangent_dims(const ATensor<T>& a) {
  const int k = a.k;
  std::size_t tangent = a.dim() - backend_rank(monad_quadric_diff(a));
  return {tangent, static_cast<long long>(tangent) - orbit_dim(k)};
}

template <class T>
CorankResult<T> obstruction_corank(const ATensor<T>& a) {
  const int k = a.k;
  Mat<T> xi = obstruction_map(a);
  CorankResult<T> out;
  std::size_t r = backend_rank(xi);
  out.corank = wedge_count(k) * kSymPairCount - r;
  if (out.corank > 0) {
    std::vector<Mat<T>> kern;
    if constexpr (is_exact_v<T>) kern = kernel_basis(xi);
    else kern = nullspace_svd(xi);
    for (const Mat<T>& v : kern) out.kernel.push_back(SymTensor<T>::from_vec(k, v));
  }
  return out;
}

template <class T>
VanishingChecks composition_vanishing_checks(const ATensor<T>& a, const SymTensor<T>& s) {
  const int k = a.k, n = a.h_dim();
  CTensor<T> xi = obstruction_apply(a, s);
  if constexpr (is_exact_v<T>) {
    if (!xi.is_zero())
      throw InvalidInputError("composition_vanishing_checks: xi(A, S) != 0");
  } else {
    double scale = std::max(1.0, frob_norm(a.vec())) * std::max(1.0, frob_norm(s.vec()));
    if (frob_norm(xi.vec()) > Config::get().tolerance * scale)
      throw InvalidInputError("composition_vanishing_checks: xi(A, S) != 0");
  }

  VanishingChecks out;
  auto is_small = [&](const Mat<T>& m, double scale) {
    if constexpr (is_exact_v<T>) {
      (void)scale;
      return m.is_zero();
    } else {
      double v = frob_norm(m);
      out.max_residual = std::max(out.max_residual, v / std::max(1.0, scale));
      return v <= 100.0 * Config::get().tolerance * std::max(1.0, scale);
    }
  };
  double ascale = 1.0, sscale = 1.0;
  if constexpr (!is_exact_v<T>) {
    ascale = frob_norm(a.vec());
    sscale = frob_norm(s.vec());
  }

  out.tau_all_zero = true;
  for (int l = 0; l < n; ++l) {
    Mat<T> h(static_cast<std::size_t>(n), 1);
    h(static_cast<std::size_t>(l), 0) = scalar_from_int<T>(1);
    if (!is_small(triple_contract(a, s, h), ascale * sscale)) out.tau_all_zero = false;
  }
  out.eps_rho_zero = is_small(evaluation_map(a) * contraction_map(s), ascale * sscale);
  out.rho_beta_zero = is_small(contraction_map(s) * symplectic_pairing(a), ascale * sscale);
  return out;
}

SynthPair synth_obstructed_pair(const SymTensor<Rat>& s, std::uint64_t seed, int e1_samples) {
  if (s.is_zero()) throw InvalidInputError("synth_obstructed_pair: S must be nonzero");
  const int k = s.k, n = 2 * k + 2;
  std::vector<Mat<Rat>> slice_kernel = kernel_basis(contraction_map(s));
  if (slice_kernel.empty())
    throw InvalidInputError("synth_obstructed_pair: the kernel of rho(S, .) is zero");

  Rng rng(seed);
  ATensor<Rat> a(k);
  for (int l = 0; l < n; ++l) {
    for (const Mat<Rat>& basis : slice_kernel) {
      Rat c(static_cast<long>(rng.int_range(-7, 7)));
      if (sgn(c) == 0) continue;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < k; ++j)
          a.at(i, j, l) += c * basis(static_cast<std::size_t>(i * k + j), 0);
    }
  }
  if (!obstruction_apply(a, s).is_zero())
    throw MathFindingError("synth_obstructed_pair: constructed pair violates xi(A, S) = 0");

  SynthPair out;
  out.a = std::move(a);
  out.kernel_dim = slice_kernel.size() * static_cast<std::size_t>(n);
  out.s_rank = flattening_rank(s);
  out.certificate = certify(out.a, e1_samples, rng.next_u64());
  return out;
}

TraceOutcome obstruction_trace(const ATensor<Rat>& a, const SymTensor<Rat>& s,
                               std::uint64_t seed) {
  const int k = a.k;
  if (s.is_zero()) throw InvalidInputError("obstruction_trace: S must be nonzero");
  if (!obstruction_apply(a, s).is_zero())
    throw InvalidInputError("obstruction_trace: xi(A, S) != 0");

  TraceOutcome out;
  out.s_rank = flattening_rank(s);
  out.beta_rank = rank(symplectic_pairing(a));

  // the composition rho(S, .) o beta(A, .) must vanish for any such pair
  if (!(contraction_map(s) * symplectic_pairing(a)).is_zero())
    throw MathFindingError("obstruction_trace: rho o beta does not vanish on a xi-kernel pair");

  if (out.beta_rank < static_cast<std::size_t>(2 * k + 2)) {
    out.kind = TraceCase::E3Failure;
    return out;
  }
  if (out.s_rank > static_cast<std::size_t>(2 * k - 2)) {
    // impossible alongside full beta rank: ker rho contains the (2k+2)-dim
    // image, so rk(S) <= 2k-2
    out.kind = TraceCase::RankContradiction;
    return out;
  }

  SymClassification cls = classify(s, seed);
  switch (cls.kind) {
    case SCaseKind::RankOneImage: {
      out.kind = TraceCase::CaseI;
      // eps(A, .) o rho(S, .) vanishes, so the rank-one image direction is
      // an exact fiberwise-surjectivity failure
      ATensor<CD> acd = to_complex(a);
      Mat<CD> f0 = cls.f0, b0 = cls.b0;
      Mat<CD> img = epsilon_apply(acd, outer(f0, b0));
      double scale = std::max(1.0, frob_norm(acd.vec())) *
                     std::max(1.0, frob_norm(f0) * frob_norm(b0));
      out.witness_residual = frob_norm(img) / scale;
      if (out.witness_residual > 100.0 * Config::get().tolerance)
        throw MathFindingError("obstruction_trace: case I witness failed to annihilate");
      out.surjectivity_witness = std::make_pair(f0, b0);
      return out;
    }
    case SCaseKind::AnnihilatingCovector: {
      out.kind = TraceCase::CaseII;
      out.annihilator = cls.annihilator;
      // dim of M with {f*0} (x) M inside Im(beta): one exact rank
      Mat<Rat> beta = symplectic_pairing(a);
      Mat<Rat> cols(static_cast<std::size_t>(4 * k), static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < 4; ++i)
          cols(static_cast<std::size_t>(i * k + j), static_cast<std::size_t>(j)) =
              (*cls.annihilator)(static_cast<std::size_t>(i), 0);
      std::size_t ra = rank(hstack(beta, cols));
      out.section_dim = out.beta_rank + static_cast<std::size_t>(k) - ra;
      if (out.section_dim < 3)
        throw MathFindingError("obstruction_trace: case II section space has dimension < 3");
      return out;
    }
    case SCaseKind::LargeVanishingLocus: {
      out.kind = TraceCase::CaseIII;
      // equality Im(beta) = ker(rho): containment is the verified
      // composition, and the dimensions match (2k+2 = 4k - rk S)
      out.im_beta_equals_ker_rho =
          static_cast<std::size_t>(4 * k) - out.s_rank == static_cast<std::size_t>(2 * k + 2);
      if (!out.im_beta_equals_ker_rho)
        throw MathFindingError("obstruction_trace: case III dimension mismatch");
      out.locus = vanishing_locus_probe(s, 25, seed ^ 0x5eed);
      if (!out.locus->dim_ge_2)
        throw MathFindingError("obstruction_trace: case III locus failed the dimension probe");
      return out;
    }
  }
  throw MathFindingError("obstruction_trace: unreachable classification state");
}

namespace {

template <class T>
void fill_core(AuditReport& rep, const ATensor<T>& a, const AuditOptions& opt) {
  const int k = a.k;
  MonadCertificate<T> cert = certify(a, opt.e1_samples, opt.seed);
  rep.k = k;
  rep.is_instanton = cert.is_instanton();
  rep.implication_violated = cert.implication_violated();
  rep.e3_rank = cert.e3_rank;
  rep.h0K = cert.h0K;
  auto [tangent, moduli] = tangent_dims(a);
  rep.tangent_dim = tangent;
  rep.moduli_tangent_dim = moduli;
  std::size_t dgamma_rank = a.dim() - tangent;
  CorankResult<T> cr = obstruction_corank(a);
  rep.corank = cr.corank;
  std::size_t xi_rank = wedge_count(k) * kSymPairCount - cr.corank;
  rep.rank_consistency = dgamma_rank == xi_rank;
  rep.smooth = cr.corank == 0;
  rep.rr_shadow = rep.moduli_tangent_dim - static_cast<long long>(rep.corank);
}

void fill_probe(AuditReport& rep, const ATensor<CD>& acd, const AuditOptions& opt,
                const ATensor<Rat>* exact) {
  DimensionProbe probe = w_dimension_probe(acd, opt.probe_trials, opt.seed + 17, exact);
  rep.probe_trials = probe.trials;
  rep.probe_hits = probe.hits;
  rep.probe_dim_ge_2 = probe.dim_ge_2;
  rep.probe_points = probe.hit_points.size();
  if (probe.dim_ge_2 && probe.hit_points.size() >= 9) {
    QuadricFitResult fit = quadric_fit(probe.hit_points);
    rep.quadric_residual = fit.residual;
    rep.quadric_ok = !fit.underdetermined && fit.residual <= 1e-8;
  }
}

}  // namespace

AuditReport audit_rational(const ATensor<Rat>& a, const AuditOptions& opt) {
  AuditReport rep;
  rep.backend = "rational";
  fill_core(rep, a, opt);
  if (opt.run_probe) fill_probe(rep, to_complex(a), opt, &a);
  return rep;
}

AuditReport audit_complex(const ATensor<CD>& a, const AuditOptions& opt, const ATensor<Rat>* exact) {
  AuditReport rep;
  rep.backend = "complex";
  fill_core(rep, a, opt);
  if (opt.run_probe) fill_probe(rep, a, opt, exact);
  return rep;
}

AuditReport audit_prime(const ATensor<Fp>& a, const AuditOptions& opt) {
  AuditReport rep;
  rep.backend = "prime";
  fill_core(rep, a, opt);
  return rep;
}

template std::pair<std::size_t, long long> tangent_dims(const ATensor<Rat>&);
template std::pair<std::size_t, long long> tangent_dims(const ATensor<Fp>&);
template std::pair<std::size_t, long long> tangent_dims(const ATensor<CD>&);
template CorankResult<Rat> obstruction_corank(const ATensor<Rat>&);
template CorankResult<Fp> obstruction_corank(const ATensor<Fp>&);
template CorankResult<CD> obstruction_corank(const ATensor<CD>&);
template VanishingChecks composition_vanishing_checks(const ATensor<Rat>&, const SymTensor<Rat>&);
template VanishingChecks composition_vanishing_checks(const ATensor<CD>&, const SymTensor<CD>&);

}  // namespace ilab

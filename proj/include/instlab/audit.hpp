#pragma once

#include "instlab/classify.hpp"
#include "instlab/planes.hpp"

namespace ilab {

/// Tangent dimension of the instanton variety at A and the induced moduli
/// tangent dimension: dim ker(dgamma at A) minus the group-orbit dimension
/// 3k^2 + 5k + 3. At a smooth point the latter equals 8k - 3.
template <class T>
std::pair<std::size_t, long long> tangent_dims(const ATensor<T>& a);

template <class T>
struct CorankResult {
  std::size_t corank = 0;                // codim of the image of xi(A, .)
  std::vector<SymTensor<T>> kernel;      // obstruction directions S with xi(A,S) = 0
};

/// The corank of the obstruction map S -> xi(A, S); a nonzero value is the
/// obstruction signal (the tangent dimension then exceeds 3k^2 + 13k).
template <class T>
CorankResult<T> obstruction_corank(const ATensor<T>& a);

struct VanishingChecks {
  bool tau_all_zero = false;   // kappa(xi(A,S), h_l) = 0 over the h-basis
  bool eps_rho_zero = false;   // eps(A, .) o rho(S, .) = 0
  bool rho_beta_zero = false;  // rho(S, .) o beta(A, .) = 0
  double max_residual = 0.0;
  bool all() const { return tau_all_zero && eps_rho_zero && rho_beta_zero; }
};

/// Consequence checks for a pair with xi(A, S) = 0: every equivariant
/// trilinear composition through such a pair vanishes; the three named here
/// are the ones the main-theorem trace consumes. Throws when the
/// precondition xi(A, S) = 0 fails.
template <class T>
VanishingChecks composition_vanishing_checks(const ATensor<T>& a, const SymTensor<T>& s);

struct SynthPair {
  ATensor<Rat> a;
  std::size_t kernel_dim = 0;  // of {A : xi(A, S) = 0}
  std::size_t s_rank = 0;
  MonadCertificate<Rat> certificate;  // expected to fail for k <= 5
};

/// A random exact solution A of the linear system xi(A, S) = 0 for a given
/// nonzero S, with diagnostics. Errors when the solution space is zero.
SynthPair synth_obstructed_pair(const SymTensor<Rat>& s, std::uint64_t seed, int e1_samples = 60);

enum class TraceCase {
  CaseI,               // rank-one image: an exact fiberwise-surjectivity failure
  CaseII,              // annihilating covector: a >= 3-dimensional section subspace
  CaseIII,             // the unstable locus coincides with the vanishing locus
  E3Failure,           // rank(beta) < 2k+2: outside the three cases
  RankContradiction,   // rk(S) > 2k-2 against full beta rank
  SmoothNoObstruction  // no nonzero S exists (used by audits of smooth points)
};

struct TraceOutcome {
  TraceCase kind{};
  std::size_t s_rank = 0;
  std::size_t beta_rank = 0;
  // case I evidence
  std::optional<std::pair<Mat<CD>, Mat<CD>>> surjectivity_witness;  // (f0, b0)
  double witness_residual = 0.0;
  // case II evidence
  std::optional<Mat<Rat>> annihilator;
  std::size_t section_dim = 0;  // dim M with {f*0} (x) M inside Im(beta)
  // case III evidence
  bool im_beta_equals_ker_rho = false;
  std::optional<VanishingProbe> locus;
};

/// Executable trace of the smoothness proof's case analysis for a pair with
/// xi(A, S) = 0, S != 0: verify the composition vanishing, check the beta
/// rank, bound rk(S), classify S and emit the per-case contradiction
/// evidence. Every outcome excludes A from the certified instanton set.
TraceOutcome obstruction_trace(const ATensor<Rat>& a, const SymTensor<Rat>& s,
                               std::uint64_t seed = 1);

struct AuditOptions {
  int e1_samples = 200;
  int probe_trials = 20;
  std::uint64_t seed = 1;
  bool run_probe = true;
};

struct AuditReport {
  int k = 0;
  std::string backend;
  bool is_instanton = false;
  bool implication_violated = false;
  std::size_t e3_rank = 0;
  std::size_t h0K = 0;
  std::size_t tangent_dim = 0;
  long long moduli_tangent_dim = 0;
  std::size_t corank = 0;
  bool smooth = false;
  bool rank_consistency = false;  // rank(dgamma) == rank(xi), exact assertion
  long long rr_shadow = 0;        // moduli_tangent_dim - corank, must be 8k-3
  // unstable-plane probe summary
  int probe_trials = 0;
  int probe_hits = 0;
  bool probe_dim_ge_2 = false;
  std::size_t probe_points = 0;
  double quadric_residual = 0.0;
  bool quadric_ok = true;  // meaningful only when the probe reports dim >= 2
};

AuditReport audit_rational(const ATensor<Rat>& a, const AuditOptions& opt = {});
AuditReport audit_complex(const ATensor<CD>& a, const AuditOptions& opt = {},
                          const ATensor<Rat>* exact = nullptr);
AuditReport audit_prime(const ATensor<Fp>& a, const AuditOptions& opt = {});

extern template std::pair<std::size_t, long long> tangent_dims(const ATensor<Rat>&);
extern template std::pair<std::size_t, long long> tangent_dims(const ATensor<Fp>&);
extern template std::pair<std::size_t, long long> tangent_dims(const ATensor<CD>&);
extern template CorankResult<Rat> obstruction_corank(const ATensor<Rat>&);
extern template CorankResult<Fp> obstruction_corank(const ATensor<Fp>&);
extern template CorankResult<CD> obstruction_corank(const ATensor<CD>&);
extern template VanishingChecks composition_vanishing_checks(const ATensor<Rat>&,
                                                             const SymTensor<Rat>&);
extern template VanishingChecks composition_vanishing_checks(const ATensor<CD>&,
                                                             const SymTensor<CD>&);

}  // namespace ilab

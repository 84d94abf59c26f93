#include "instlab/suite.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace ilab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void parallel_for(int jobs, int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(jobs));
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (int i; (i = next.fetch_add(1)) < n;) fn(i);
      } catch (...) {
        errs[static_cast<std::size_t>(w)] = std::current_exception();
        next.store(n);
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

/// Thread-safe failure collector; keeps the first few messages.
class Failures {
 public:
  void add(const std::string& msg) {
    std::lock_guard<std::mutex> lock(mu_);
    ++count_;
    if (messages_.size() < 5) messages_.push_back(msg);
  }
  bool empty() const { return count_ == 0; }
  std::string summary() const {
    if (count_ == 0) return "";
    std::ostringstream os;
    os << count_ << " failure(s): ";
    for (std::size_t i = 0; i < messages_.size(); ++i) {
      if (i) os << " | ";
      os << messages_[i];
    }
    return os.str();
  }

 private:
  mutable std::mutex mu_;
  int count_ = 0;
  std::vector<std::string> messages_;
};

struct SampleSet {
  std::vector<InstantonSample<Rat>> exact;  // per k
  std::vector<InstantonSample<CD>> numeric;
  std::vector<AuditReport> reports;  // exact audits (no probe)
};

struct SuiteState {
  SuiteOptions opt;
  std::map<int, SampleSet> samples;  // by charge
  std::vector<std::pair<int, SynthPair>> synth_pairs;  // collected by criterion 8
  std::mutex mu;
  bool critical = false;
};

std::string k_tag(int k) { return "k=" + std::to_string(k); }

// ---- criterion 1: the headline dimensions ---------------------------------

CriterionResult criterion_theorem(SuiteState& st) {
  auto t0 = Clock::now();
  Failures fails;
  const int per_k = st.opt.quick ? 5 : 5;
  double max_audit_seconds = 0.0;
  std::mutex local_mu;

  std::vector<int> ks;
  for (int k = st.opt.k_min; k <= st.opt.k_max; ++k) ks.push_back(k);
  parallel_for(st.opt.jobs, static_cast<int>(ks.size()), [&](int ki) {
    int k = ks[static_cast<std::size_t>(ki)];
    SampleSet set;
    // exact slice samples on distinct seeds
    for (int i = 0; i < per_k && static_cast<int>(set.exact.size()) < per_k; ++i) {
      auto s = generate_slice(k, st.opt.seed + static_cast<std::uint64_t>(100 * k + i));
      if (s.has_value()) set.exact.push_back(std::move(*s));
    }
    if (static_cast<int>(set.exact.size()) < per_k) {
      fails.add(k_tag(k) + ": only " + std::to_string(set.exact.size()) + " certified slice samples");
    }
    // one numeric sample per charge when the iteration converges in budget
    NewtonResult nr = generate_newton(k, st.opt.seed + static_cast<std::uint64_t>(977 * k),
                                      st.opt.quick ? 40 : 60, st.opt.quick ? 4 : 16);
    if (nr.sample.has_value()) set.numeric.push_back(std::move(*nr.sample));

    AuditOptions aopt;
    aopt.e1_samples = st.opt.quick ? 60 : 200;
    aopt.run_probe = false;
    aopt.seed = st.opt.seed + static_cast<std::uint64_t>(k);
    for (const InstantonSample<Rat>& s : set.exact) {
      auto ta = Clock::now();
      AuditReport rep = audit_rational(s.a, aopt);
      double dt = seconds_since(ta);
      {
        std::lock_guard<std::mutex> lock(local_mu);
        max_audit_seconds = std::max(max_audit_seconds, dt);
      }
      if (!rep.is_instanton) fails.add(k_tag(k) + ": slice sample lost certification");
      if (rep.moduli_tangent_dim != 8 * k - 3)
        fails.add(k_tag(k) + ": moduli tangent " + std::to_string(rep.moduli_tangent_dim));
      if (rep.corank != 0) fails.add(k_tag(k) + ": nonzero corank on a certified sample");
      if (!rep.rank_consistency) fails.add(k_tag(k) + ": rank consistency violated");
      if (rep.implication_violated) fails.add(k_tag(k) + ": E1+E2 without E3");
      if (dt > 10.0) fails.add(k_tag(k) + ": audit took " + std::to_string(dt) + "s");
      // float ranks must agree with the exact ones
      AuditReport flr = audit_complex(to_complex(s.a), aopt);
      if (flr.tangent_dim != rep.tangent_dim || flr.corank != rep.corank ||
          flr.e3_rank != rep.e3_rank)
        fails.add(k_tag(k) + ": float audit disagrees with the exact one");
      set.reports.push_back(std::move(rep));
    }
    for (const InstantonSample<CD>& s : set.numeric) {
      auto ta = Clock::now();
      AuditReport rep = audit_complex(s.a, aopt);
      double dt = seconds_since(ta);
      if (!rep.is_instanton) fails.add(k_tag(k) + ": numeric sample lost certification");
      if (rep.moduli_tangent_dim != 8 * k - 3)
        fails.add(k_tag(k) + ": numeric moduli tangent " + std::to_string(rep.moduli_tangent_dim));
      if (rep.corank != 0) fails.add(k_tag(k) + ": numeric corank nonzero");
      if (dt > 10.0) fails.add(k_tag(k) + ": numeric audit took " + std::to_string(dt) + "s");
      set.reports.push_back(std::move(rep));
    }
    {
      std::lock_guard<std::mutex> lock(st.mu);
      st.samples[k] = std::move(set);
    }
  });

  CriterionResult res;
  res.id = 1;
  res.name = "moduli tangent dimension 8k-3 with zero corank on certified samples";
  res.pass = fails.empty();
  std::ostringstream os;
  int total = 0;
  for (auto& [k, set] : st.samples) total += static_cast<int>(set.exact.size() + set.numeric.size());
  os << total << " samples audited, max audit " << max_audit_seconds << "s";
  if (!fails.empty()) os << "; " << fails.summary();
  res.detail = os.str();
  res.seconds = seconds_since(t0);
  return res;
}

// ---- criterion 2: charge-1 sanity ------------------------------------------

CriterionResult criterion_k1(SuiteState& st) {
  auto t0 = Clock::now();
  Failures fails;
  Rng rng(st.opt.seed + 21);
  int audited = 0;
  for (int i = 0; i < 5; ++i) {
    ATensor<Rat> a = random_atensor<Rat>(rng, 1, 9);
    if (rank(a.flat()) < 4) continue;
    ++audited;
    AuditOptions aopt;
    aopt.e1_samples = 60;
    aopt.run_probe = false;
    AuditReport rep = audit_rational(a, aopt);
    if (!rep.is_instanton) fails.add("k=1 sample failed certification");
    if (rep.moduli_tangent_dim != 5) fails.add("k=1 moduli tangent != 5");
    if (SymTensor<Rat>(1).dim() != 0) fails.add("k=1 obstruction space is not zero-dimensional");
    if (rep.corank != 0) fails.add("k=1 corank nonzero");
  }
  CriterionResult res;
  res.id = 2;
  res.name = "charge-1 sanity: moduli tangent 5 over a zero obstruction space";
  res.pass = fails.empty() && audited >= 3;
  res.detail = std::to_string(audited) + " full-rank samples; " + fails.summary();
  res.seconds = seconds_since(t0);
  return res;
}

// ---- criterion 3: adjointness ----------------------------------------------

CriterionResult criterion_adjointness(SuiteState& st) {
  auto t0 = Clock::now();
  Failures fails;
  const int triples = st.opt.quick ? 20 : 100;
  std::vector<int> ks;
  for (int k = st.opt.k_min; k <= st.opt.k_max; ++k) ks.push_back(k);
  parallel_for(st.opt.jobs, static_cast<int>(ks.size()), [&](int ki) {
    int k = ks[static_cast<std::size_t>(ki)];
    Rng rng(st.opt.seed + static_cast<std::uint64_t>(31 * k));
    std::optional<Rat> constant;
    for (int it = 0; it < triples; ++it) {
      ATensor<Rat> a = random_atensor<Rat>(rng, k, 5);
      ATensor<Rat> b = random_atensor<Rat>(rng, k, 5);
      SymTensor<Rat> s = random_sym_tensor<Rat>(rng, k, 5);
      auto [lhs, rhs] = adjoint_pairing(a, b, s);
      if (sgn(rhs) == 0) {
        if (sgn(lhs) != 0) fails.add(k_tag(k) + ": pairing degenerate on one side only");
        continue;
      }
      Rat c = lhs / rhs;
      if (!constant.has_value()) constant = c;
      else if (c != *constant)
        fails.add(k_tag(k) + ": adjointness constant drifted");
    }
    if (!constant.has_value() || sgn(*constant) == 0)
      fails.add(k_tag(k) + ": no nonzero adjointness constant calibrated");
  });
  // the rank consequence on every audited sample
  for (auto& [k, set] : st.samples)
    for (const AuditReport& rep : set.reports)
      if (!rep.rank_consistency) fails.add(k_tag(k) + ": rank(dgamma) != rank(xi) on an audit");

  CriterionResult res;
  res.id = 3;
  res.name = "adjointness: one exact constant per charge, rank equality on audits";
  res.pass = fails.empty();
  res.detail = std::to_string(triples) + " triples per charge; " + fails.summary();
  res.seconds = seconds_since(t0);
  return res;
}

// ---- criterion 4: the dimension identity -----------------------------------

CriterionResult criterion_rr_shadow(SuiteState& st) {
  auto t0 = Clock::now();
  Failures fails;
  for (auto& [k, set] : st.samples)
    for (const AuditReport& rep : set.reports)
      if (rep.rr_shadow != 8 * k - 3)
        fails.add(k_tag(k) + ": moduli - corank = " + std::to_string(rep.rr_shadow));
  // synthetic obstructed points satisfy the same identity
  int checked = 0;
  {
    std::lock_guard<std::mutex> lock(st.mu);
    for (auto& [k, pair] : st.synth_pairs) {
      if (checked >= 2 * (st.opt.k_max - st.opt.k_min + 1)) break;
      auto [tangent, moduli] = tangent_dims(pair.a);
      (void)tangent;
      CorankResult<Rat> cr = obstruction_corank(pair.a);
      if (cr.corank == 0) fails.add(k_tag(k) + ": synthetic pair lost its obstruction");
      if (moduli - static_cast<long long>(cr.corank) != 8 * k - 3)
        fails.add(k_tag(k) + ": synthetic shadow violated");
      ++checked;
    }
  }
  CriterionResult res;
  res.id = 4;
  res.name = "dimension identity: moduli tangent minus corank equals 8k-3 everywhere";
  res.pass = fails.empty();
  res.detail = std::to_string(checked) + " synthetic points checked; " + fails.summary();
  res.seconds = seconds_since(t0);
  return res;
}

// ---- criterion 5: even flattening rank --------------------------------------

CriterionResult criterion_even_rank(SuiteState& st) {
  auto t0 = Clock::now();
  Failures fails;
  const int per_k = st.opt.quick ? 60 : 500;
  std::vector<std::pair<int, int>> work;
  for (int k = st.opt.k_min; k <= st.opt.k_max; ++k)
    for (int i = 0; i < per_k; ++i) work.emplace_back(k, i);
  parallel_for(st.opt.jobs, static_cast<int>(work.size()), [&](int wi) {
    auto [k, i] = work[static_cast<std::size_t>(wi)];
    Rng rng(st.opt.seed + static_cast<std::uint64_t>(51 * k) * 100000 + static_cast<std::uint64_t>(i));
    SymTensor<Rat> s = random_sym_tensor<Rat>(rng, k, 8);
    std::size_t r1 = rank(contraction_map(s));
    std::size_t r2 = rank(flattening_sigma(s));
    std::size_t r3 = rank(flattening_sigma_hat(s));
    if (r1 != r2 || r2 != r3) fails.add(k_tag(k) + ": flattening ranks disagree");
    if (r1 % 2 != 0) fails.add(k_tag(k) + ": odd flattening rank");
  });
  CriterionResult res;
  res.id = 5;
  res.name = "flattening rank is even and common to the three matrix routes";
  res.pass = fails.empty();
  res.detail = std::to_string(per_k) + " tensors per charge; " + fails.summary();
  res.seconds = seconds_since(t0);
  return res;
}

// ---- criterion 6: the skew-pencil solver -------------------------------------

CriterionResult criterion_pencil(SuiteState& st) {
  auto t0 = Clock::now();
  Failures fails;
  const int per_k = st.opt.quick ? 60 : 500;
  std::atomic<double> worst_residual{0.0};
  std::vector<std::pair<int, int>> work;
  for (int k = st.opt.k_min; k <= st.opt.k_max; ++k)
    for (int i = 0; i < per_k; ++i) work.emplace_back(k, i);
  parallel_for(st.opt.jobs, static_cast<int>(work.size()), [&](int wi) {
    auto [k, i] = work[static_cast<std::size_t>(wi)];
    Rng rng(st.opt.seed + static_cast<std::uint64_t>(61 * k) * 131071 + static_cast<std::uint64_t>(i));
    auto random_skew = [&](std::size_t n) {
      Mat<CD> a = random_matrix<CD>(rng, n, n);
      return a - a.transpose();
    };
    std::size_t n = static_cast<std::size_t>(k);
    Mat<CD> r1, r2;
    if (i % 5 == 1 && n >= 3) {
      // forced-singular base: a smaller block embedded in zeros
      std::size_t kp = 2 * ((n - 1) / 2);
      r1 = Mat<CD>(n, n);
      if (kp >= 2) r1.set_block(0, 0, random_skew(kp));
      r2 = random_skew(n);
    } else if (i % 7 == 2 && n >= 3) {
      // identically singular pencil: both kill the last coordinate
      r1 = Mat<CD>(n, n);
      r2 = Mat<CD>(n, n);
      r1.set_block(0, 0, random_skew(n - 1));
      r2.set_block(0, 0, random_skew(n - 1));
    } else {
      r1 = random_skew(n);
      r2 = random_skew(n);
    }
    if (r1.max_abs() == 0.0 && r2.max_abs() == 0.0) return;
    auto ti = Clock::now();
    try {
      PencilWitness w = skew_pencil_solve(r1, r2);
      double prev = worst_residual.load();
      while (w.residual > prev && !worst_residual.compare_exchange_weak(prev, w.residual)) {
      }
    } catch (const std::exception& e) {
      fails.add(k_tag(k) + ": " + e.what());
    }
    if (seconds_since(ti) > 1.0) fails.add(k_tag(k) + ": pencil instance exceeded 1s");
  });
  CriterionResult res;
  res.id = 6;
  res.name = "skew-pencil solver: verified witnesses on random and singular pencils";
  res.pass = fails.empty();
  std::ostringstream os;
  os << per_k << " pairs per charge, worst residual " << worst_residual.load();
  if (!fails.empty()) os << "; " << fails.summary();
  res.detail = os.str();
  res.seconds = seconds_since(t0);
  return res;
}

// ---- criterion 7: the classifier ---------------------------------------------

CriterionResult criterion_classifier(SuiteState& st) {
  auto t0 = Clock::now();
  Failures fails;
  const int per_case = st.opt.quick ? 10 : 100;

  struct CaseSpec {
    int k;
    std::string name;
    SCaseKind expect;
    std::function<SymTensor<Rat>(std::uint64_t)> make;
  };
  std::vector<CaseSpec> cases;
  for (int k = std::max(2, st.opt.k_min); k <= st.opt.k_max; ++k) {
    cases.push_back({k, k_tag(k) + " pair-rank-1", SCaseKind::RankOneImage,
                     [k](std::uint64_t s) { return random_low_pair_rank(k, 1, s); }});
    if (k >= 3)
      cases.push_back({k, k_tag(k) + " pair-rank-2", SCaseKind::RankOneImage,
                       [k](std::uint64_t s) { return random_low_pair_rank(k, 2, s); }});
    if (k >= 4)
      cases.push_back({k, k_tag(k) + " rank-6", SCaseKind::AnnihilatingCovector,
                       [k](std::uint64_t s) { return random_rank6(k, s); }});
    if (k == 5) {
      cases.push_back({k, "k=5 rank-8 pair-4", SCaseKind::LargeVanishingLocus,
                       [](std::uint64_t s) { return random_rank8_pair4(s); }});
      cases.push_back({k, "k=5 rank-8 pair-3", SCaseKind::LargeVanishingLocus,
                       [](std::uint64_t s) { return random_rank8_pair3(s); }});
    }
  }

  std::vector<std::pair<std::size_t, int>> work;
  for (std::size_t c = 0; c < cases.size(); ++c)
    for (int i = 0; i < per_case; ++i) work.emplace_back(c, i);
  parallel_for(st.opt.jobs, static_cast<int>(work.size()), [&](int wi) {
    auto [ci, i] = work[static_cast<std::size_t>(wi)];
    const CaseSpec& cs = cases[ci];
    std::uint64_t seed = st.opt.seed + 1000003ull * ci + static_cast<std::uint64_t>(i);
    SymTensor<Rat> s;
    try {
      s = cs.make(seed);
    } catch (const std::exception& e) {
      fails.add(cs.name + ": generator failed: " + e.what());
      return;
    }
    SymClassification cls;
    try {
      cls = classify(s, seed ^ 0x517cc1b7);
    } catch (const std::exception& e) {
      fails.add(cs.name + ": classify failed: " + e.what());
      return;
    }
    if (cls.kind != cs.expect) {
      fails.add(cs.name + ": unexpected case");
      return;
    }
    switch (cls.kind) {
      case SCaseKind::RankOneImage: {
        Mat<CD> image = contract(to_complex(s), *cls.rank_one_bstar);
        if (rank_svd(image, 1e-6) != 1) fails.add(cs.name + ": witness image is not rank one");
        break;
      }
      case SCaseKind::AnnihilatingCovector: {
        for (int j = 0; j < s.k; ++j) {
          Mat<Rat> ej(static_cast<std::size_t>(s.k), 1);
          ej(static_cast<std::size_t>(j), 0) = 1;
          if (!contract(s, outer(*cls.annihilator, ej)).is_zero()) {
            fails.add(cs.name + ": annihilator failed an exact evaluation");
            break;
          }
        }
        break;
      }
      case SCaseKind::LargeVanishingLocus: {
        if (!cls.locus->dim_ge_2 || cls.locus->points.size() < 20 ||
            cls.locus->jacobian_sigma2 <= 1e-6)
          fails.add(cs.name + ": locus certificate incomplete");
        for (const VanishingPoint& p : cls.locus->points)
          if (p.residual > 1e-6) {
            fails.add(cs.name + ": unverified locus point");
            break;
          }
        break;
      }
    }
  });

  CriterionResult res;
  res.id = 7;
  res.name = "classifier: correct case with machine-verified witness per instance";
  res.pass = fails.empty();
  res.detail = std::to_string(per_case) + " instances per reachable case; " + fails.summary();
  res.seconds = seconds_since(t0);
  return res;
}

// ---- criterion 8: trace totality ----------------------------------------------

CriterionResult criterion_trace(SuiteState& st) {
  auto t0 = Clock::now();
  Failures fails;
  const int per_k = st.opt.quick ? 8 : 50;
  std::vector<std::pair<int, int>> work;
  for (int k = std::max(2, st.opt.k_min); k <= st.opt.k_max; ++k)
    for (int i = 0; i < per_k; ++i) work.emplace_back(k, i);
  parallel_for(st.opt.jobs, static_cast<int>(work.size()), [&](int wi) {
    auto [k, i] = work[static_cast<std::size_t>(wi)];
    std::uint64_t seed = st.opt.seed + 2000033ull * static_cast<std::uint64_t>(k) +
                         static_cast<std::uint64_t>(i) * 17;
    // cycle the reachable obstruction shapes for this charge
    SymTensor<Rat> s;
    try {
      int flavor = i % (k == 5 ? 5 : (k == 4 ? 3 : (k == 3 ? 2 : 1)));
      if (flavor == 0) s = random_low_pair_rank(k, 1, seed);
      else if (flavor == 1) s = random_low_pair_rank(k, 2, seed);
      else if (flavor == 2) s = random_rank6(k, seed);
      else if (flavor == 3) s = random_rank8_pair4(seed);
      else s = random_rank8_pair3(seed);
    } catch (const std::exception& e) {
      fails.add(k_tag(k) + ": generator failed: " + e.what());
      return;
    }
    SynthPair pair;
    try {
      pair = synth_obstructed_pair(s, seed + 1, 60);
    } catch (const std::exception& e) {
      fails.add(k_tag(k) + ": synthesis failed: " + e.what());
      return;
    }
    if (pair.certificate.is_instanton()) {
      fails.add(k_tag(k) + ": CRITICAL: synthesized obstructed point passed certification");
      std::lock_guard<std::mutex> lock(st.mu);
      st.critical = true;
      return;
    }
    TraceOutcome out;
    try {
      out = obstruction_trace(pair.a, s, seed + 2);
    } catch (const std::exception& e) {
      fails.add(k_tag(k) + ": trace failed: " + e.what());
      return;
    }
    switch (out.kind) {
      case TraceCase::CaseI:
      case TraceCase::CaseII:
      case TraceCase::CaseIII:
      case TraceCase::E3Failure:
      case TraceCase::RankContradiction:
        break;
      default:
        fails.add(k_tag(k) + ": trace terminated outside the case analysis");
    }
    std::lock_guard<std::mutex> lock(st.mu);
    if (st.synth_pairs.size() < 64) st.synth_pairs.emplace_back(k, std::move(pair));
  });
  CriterionResult res;
  res.id = 8;
  res.name = "trace totality: every synthetic obstructed pair lands in a case";
  res.pass = fails.empty();
  res.detail = std::to_string(per_k) + " pairs per charge; " + fails.summary();
  res.seconds = seconds_since(t0);
  return res;
}

// ---- criterion 9: unstable planes -----------------------------------------------

CriterionResult criterion_planes(SuiteState& st) {
  auto t0 = Clock::now();
  Failures fails;
  const int plane_count = st.opt.quick ? 120 : 1000;
  const int agree_count = st.opt.quick ? 60 : 500;
  const int probe_trials = 20;

  std::vector<std::pair<int, const InstantonSample<Rat>*>> exact_work;
  std::vector<std::pair<int, const InstantonSample<CD>*>> cd_work;
  for (auto& [k, set] : st.samples) {
    for (const auto& s : set.exact) exact_work.emplace_back(k, &s);
    for (const auto& s : set.numeric) cd_work.emplace_back(k, &s);
  }

  parallel_for(st.opt.jobs, static_cast<int>(exact_work.size()), [&](int wi) {
    auto [k, sp] = exact_work[static_cast<std::size_t>(wi)];
    const ATensor<Rat>& a = sp->a;
    Rng rng(st.opt.seed + 3000017ull * static_cast<std::uint64_t>(wi));
    for (int i = 0; i < plane_count; ++i) {
      Mat<Rat> fstar(4, 1);
      do {
        for (int c = 0; c < 4; ++c)
          fstar(static_cast<std::size_t>(c), 0) = Rat(static_cast<long>(rng.int_range(-9, 9)));
      } while (fstar.is_zero());
      std::size_t h0 = h0_plane(a, fstar);
      if (h0 > 1) {
        fails.add(k_tag(k) + ": a plane with h0 = " + std::to_string(h0));
        break;
      }
      if (i < agree_count) {
        UnstableTestResult<Rat> ut = unstable_plane_test(a, fstar);
        if (ut.unstable != (h0 >= 1)) {
          fails.add(k_tag(k) + ": unstable test disagrees with the restriction route");
          break;
        }
        if (ut.unstable && ut.intersection_dim != 1) {
          fails.add(k_tag(k) + ": section direction not unique");
          break;
        }
      }
    }
    // pencil probe with per-hit re-verification
    ATensor<CD> acd = to_complex(a);
    DimensionProbe probe = w_dimension_probe(acd, probe_trials, st.opt.seed + static_cast<std::uint64_t>(wi), &a);
    for (const PlanePoint& p : probe.hit_points) {
      if (p.h0 != 1) {
        fails.add(k_tag(k) + ": probe hit with h0 != 1");
        break;
      }
      std::size_t again = h0_plane(acd, p.fstar);
      if (again != p.h0) {
        fails.add(k_tag(k) + ": probe hit failed re-verification");
        break;
      }
      UnstableTestResult<CD> ut = unstable_plane_test(acd, p.fstar);
      if (!ut.unstable || ut.intersection_dim != 1) {
        fails.add(k_tag(k) + ": probe hit without a unique section direction");
        break;
      }
    }
    if (probe.dim_ge_2) {
      if (probe.hit_points.size() < 9) {
        fails.add(k_tag(k) + ": surface verdict with too few points");
      } else {
        QuadricFitResult fit = quadric_fit(probe.hit_points);
        if (fit.underdetermined || fit.residual > 1e-8)
          fails.add(k_tag(k) + ": quadric fit residual " + std::to_string(fit.residual));
      }
      // the smoothness shortcut must agree
      bool smooth_here = false;
      {
        std::lock_guard<std::mutex> lock(st.mu);
        for (const AuditReport& rep : st.samples[k].reports)
          if (rep.backend == "rational" && rep.smooth) smooth_here = true;
      }
      if (!smooth_here) fails.add(k_tag(k) + ": surface verdict on a non-smooth sample");
    }
  });

  parallel_for(st.opt.jobs, static_cast<int>(cd_work.size()), [&](int wi) {
    auto [k, sp] = cd_work[static_cast<std::size_t>(wi)];
    Rng rng(st.opt.seed + 4000037ull * static_cast<std::uint64_t>(wi));
    for (int i = 0; i < plane_count; ++i) {
      Mat<CD> fstar(4, 1);
      do {
        for (int c = 0; c < 4; ++c)
          fstar(static_cast<std::size_t>(c), 0) = CD(static_cast<double>(rng.int_range(-9, 9)), 0.0);
      } while (fstar.is_zero());
      std::size_t h0 = h0_plane(sp->a, fstar);
      if (h0 > 1) {
        fails.add(k_tag(k) + ": numeric sample plane with h0 = " + std::to_string(h0));
        break;
      }
    }
  });

  CriterionResult res;
  res.id = 9;
  res.name = "unstable planes: bounded sections, route agreement, verified hits";
  res.pass = fails.empty();
  res.detail = std::to_string(plane_count) + " planes per sample; " + fails.summary();
  res.seconds = seconds_since(t0);
  return res;
}

// ---- criterion 10: generator soundness -------------------------------------------

CriterionResult criterion_generators(SuiteState& st) {
  auto t0 = Clock::now();
  Failures fails;
  for (auto& [k, set] : st.samples) {
    for (const InstantonSample<Rat>& s : set.exact)
      if (!monad_quadric(s.a).is_zero())
        fails.add(k_tag(k) + ": slice sample violates the quadric exactly");
    for (const InstantonSample<CD>& s : set.numeric) {
      double na = frob_norm(s.a.vec());
      if (frob_norm(monad_quadric(s.a).vec()) > 1e-10 * na * na)
        fails.add(k_tag(k) + ": numeric sample above the residual bound");
    }
  }
  // degenerate draws built from a symmetric factor must be rejected
  Rng rng(st.opt.seed + 5);
  for (int k = std::max(2, st.opt.k_min); k <= st.opt.k_max; ++k) {
    for (int it = 0; it < 3; ++it) {
      ATensor<Rat> a = slice_base_tensor<Rat>(k);
      int m = k + 1;
      Mat<Rat> c(static_cast<std::size_t>(m), static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
          Rat v = random_rat(rng, 6);
          c(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
          c(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
        }
      for (int j = 0; j < k; ++j)
        for (int mm = 0; mm < m; ++mm) {
          a.at(0, j, k + 1 + mm) = c(static_cast<std::size_t>(j), static_cast<std::size_t>(mm));
          a.at(1, j, k + 1 + mm) = c(static_cast<std::size_t>(j + 1), static_cast<std::size_t>(mm));
        }
      if (!monad_quadric(a).is_zero()) {
        fails.add(k_tag(k) + ": symmetric-factor tensor violates the quadric");
        continue;
      }
      MonadCertificate<Rat> cert = certify(a, 40, rng.next_u64());
      if (cert.is_instanton()) fails.add(k_tag(k) + ": degenerate draw was certified");
      if (cert.h0K < static_cast<std::size_t>(k + 1))
        fails.add(k_tag(k) + ": degenerate draw has unexpectedly small kernel");
    }
  }
  CriterionResult res;
  res.id = 10;
  res.name = "generator soundness: exact quadric on slices, bounded residual on newton";
  res.pass = fails.empty();
  res.detail = fails.summary();
  res.seconds = seconds_since(t0);
  return res;
}

}  // namespace

SuiteResult run_acceptance_suite(const SuiteOptions& opt, std::ostream& log) {
  SuiteState st;
  st.opt = opt;
  SuiteResult result;

  auto run = [&](CriterionResult (*fn)(SuiteState&)) {
    CriterionResult res = fn(st);
    log << (res.pass ? "[PASS] " : "[FAIL] ") << "criterion " << res.id << ": " << res.name;
    if (!res.detail.empty()) log << " -- " << res.detail;
    log << "\n" << std::flush;
    result.criteria.push_back(std::move(res));
  };

  run(criterion_theorem);
  run(criterion_k1);
  run(criterion_adjointness);
  // criterion 8 runs before 4 so the synthetic pairs are available
  run(criterion_even_rank);
  run(criterion_pencil);
  run(criterion_classifier);
  run(criterion_trace);
  run(criterion_rr_shadow);
  run(criterion_planes);
  run(criterion_generators);

  std::sort(result.criteria.begin(), result.criteria.end(),
            [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
  result.all_pass = true;
  for (const CriterionResult& c : result.criteria) result.all_pass = result.all_pass && c.pass;
  result.critical_finding = st.critical;
  return result;
}

Json to_json(const SuiteResult& r, bool include_timings) {
  Json j;
  Json arr = Json::array();
  for (const CriterionResult& c : r.criteria) {
    Json jc;
    jc["id"] = c.id;
    jc["name"] = c.name;
    jc["pass"] = c.pass;
    jc["detail"] = c.detail;
    if (include_timings) jc["seconds"] = c.seconds;
    arr.push_back(std::move(jc));
  }
  j["criteria"] = std::move(arr);
  j["all_pass"] = r.all_pass;
  j["critical_finding"] = r.critical_finding;
  return j;
}

}  // namespace ilab

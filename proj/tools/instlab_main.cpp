#include <CLI11.hpp>

#include <chrono>
#include <iostream>

#include "instlab/suite.hpp"

using namespace ilab;

namespace {

Json config_json() {
  Json j;
  j["tolerance"] = Config::get().tolerance;
  j["prime"] = std::to_string(Config::get().prime);
  j["tool_version"] = kToolVersion;
  return j;
}

Json report_envelope(const std::string& command) {
  Json j;
  j["command"] = command;
  j["config"] = config_json();
  return j;
}

void emit_report(const Json& report, const std::string& path) {
  if (path.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    save_json(path, report);
  }
}

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification laboratory for instanton monad data"};
  app.require_subcommand(1);

  bool timings = false;
  app.add_flag("--timings", timings, "include wall-clock timings in reports");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a certified monad datum");
  std::string gen_method = "slice";
  int gen_k = 2;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  int gen_e1 = 200, gen_iter = 60;
  gen->add_option("--method", gen_method, "slice | newton")
      ->check(CLI::IsMember({"slice", "newton"}));
  gen->add_option("--k", gen_k, "charge (1..5)")->required();
  gen->add_option("--seed", gen_seed, "generator seed")->required();
  gen->add_option("--out", gen_out, "output tensor file")->required();
  gen->add_option("--e1-samples", gen_e1);
  gen->add_option("--max-iter", gen_iter);

  // certify
  auto* cert = app.add_subcommand("certify", "check the instanton conditions of a tensor file");
  std::string cert_in, cert_report;
  int cert_e1 = 200;
  std::uint64_t cert_seed = 1;
  cert->add_option("--in", cert_in)->required();
  cert->add_option("--e1-samples", cert_e1);
  cert->add_option("--seed", cert_seed);
  cert->add_option("--report", cert_report, "write the report here instead of stdout");

  // audit
  auto* aud = app.add_subcommand("audit", "tangent, corank and smoothness audit");
  std::string aud_in, aud_report, aud_backend = "rational";
  int aud_k = 0, aud_e1 = 200, aud_trials = 20;
  std::uint64_t aud_seed = 1;
  bool aud_no_probe = false;
  aud->add_option("--in", aud_in, "tensor file (otherwise --k/--seed generate one)");
  aud->add_option("--k", aud_k);
  aud->add_option("--seed", aud_seed);
  aud->add_option("--backend", aud_backend)->check(CLI::IsMember({"rational", "prime", "complex"}));
  aud->add_option("--e1-samples", aud_e1);
  aud->add_option("--trials", aud_trials, "pencil trials for the unstable-plane probe");
  aud->add_flag("--no-probe", aud_no_probe);
  aud->add_option("--report", aud_report);

  // planes
  auto* pl = app.add_subcommand("planes", "unstable-plane dimension probe");
  std::string pl_in, pl_report;
  int pl_trials = 20;
  std::uint64_t pl_seed = 1;
  pl->add_option("--in", pl_in)->required();
  pl->add_option("--trials", pl_trials);
  pl->add_option("--seed", pl_seed);
  pl->add_option("--report", pl_report);

  // classify
  auto* cl = app.add_subcommand("classify", "obstruction-direction trichotomy with witnesses");
  std::string cl_in, cl_report;
  std::uint64_t cl_seed = 1;
  cl->add_option("--in", cl_in, "STensor file")->required();
  cl->add_option("--seed", cl_seed);
  cl->add_option("--report", cl_report);

  // trace
  auto* tr = app.add_subcommand("trace", "case analysis of an obstructed pair");
  std::string tr_a, tr_s, tr_report;
  std::uint64_t tr_seed = 1;
  tr->add_option("--a", tr_a)->required();
  tr->add_option("--s", tr_s)->required();
  tr->add_option("--seed", tr_seed);
  tr->add_option("--report", tr_report);

  // suite
  auto* su = app.add_subcommand("suite", "full acceptance run");
  int su_kmin = 2, su_kmax = 5, su_jobs = 0;
  bool su_quick = false;
  std::uint64_t su_seed = 20260810;
  std::string su_report;
  su->add_option("--k-min", su_kmin);
  su->add_option("--k-max", su_kmax);
  su->add_option("--jobs", su_jobs, "worker count (0 = logical cores)");
  su->add_flag("--quick", su_quick, "reduced counts for development runs");
  su->add_option("--seed", su_seed);
  su->add_option("--report", su_report);

  CLI11_PARSE(app, argc, argv);

  const std::string command = join_args(argc, argv);
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  try {
    Config::load_env();

    if (gen->parsed()) {
      if (gen_method == "slice") {
        auto s = generate_slice(gen_k, gen_seed, gen_e1);
        if (!s.has_value()) {
          std::cerr << "no certified sample within the draw budget\n";
          return static_cast<int>(ExitCode::NoConvergence);
        }
        FileMeta meta{gen_seed, s->provenance, kToolVersion};
        save_json(gen_out, tensor_to_json(s->a, meta));
        std::cerr << "wrote " << gen_out << " (" << s->provenance << ")\n";
      } else {
        NewtonResult nr = generate_newton(gen_k, gen_seed, gen_iter);
        if (!nr.sample.has_value()) {
          std::cerr << "no convergence, final residual " << nr.residual << "\n";
          return static_cast<int>(ExitCode::NoConvergence);
        }
        FileMeta meta{gen_seed, nr.sample->provenance, kToolVersion};
        save_json(gen_out, tensor_to_json(nr.sample->a, meta));
        std::cerr << "wrote " << gen_out << " (" << nr.sample->provenance << ")\n";
      }
      return static_cast<int>(ExitCode::Ok);
    }

    if (cert->parsed()) {
      LoadedATensor in = atensor_from_json(load_json(cert_in));
      Json report = report_envelope(command);
      bool ok = false;
      if (in.rat.has_value()) {
        MonadCertificate<Rat> c = certify(*in.rat, cert_e1, cert_seed);
        report["certificate"] = to_json(c);
        ok = c.is_instanton();
      } else if (in.fp.has_value()) {
        MonadCertificate<Fp> c = certify(*in.fp, cert_e1, cert_seed);
        report["certificate"] = to_json(c);
        ok = c.is_instanton();
      } else {
        MonadCertificate<CD> c = certify(*in.cd, cert_e1, cert_seed);
        report["certificate"] = to_json(c);
        ok = c.is_instanton();
      }
      report["pass"] = ok;
      if (timings) report["seconds"] = elapsed();
      emit_report(report, cert_report);
      return ok ? static_cast<int>(ExitCode::Ok) : static_cast<int>(ExitCode::MathFailure);
    }

    if (aud->parsed()) {
      AuditOptions opt;
      opt.e1_samples = aud_e1;
      opt.probe_trials = aud_trials;
      opt.seed = aud_seed;
      opt.run_probe = !aud_no_probe;
      std::optional<ATensor<Rat>> arat;
      std::optional<ATensor<CD>> acd;
      if (!aud_in.empty()) {
        LoadedATensor in = atensor_from_json(load_json(aud_in));
        if (in.rat.has_value()) arat = in.rat;
        else if (in.cd.has_value()) acd = in.cd;
        else
          throw InvalidInputError(
              "audit: prime-field input files are not supported; use --backend prime on exact input");
      } else {
        if (aud_k < 1) throw InvalidInputError("audit: provide --in or --k");
        auto s = generate_slice(aud_k, aud_seed, opt.e1_samples);
        if (!s.has_value()) {
          std::cerr << "no certified sample within the draw budget\n";
          return static_cast<int>(ExitCode::NoConvergence);
        }
        arat = s->a;
      }
      AuditReport rep;
      if (aud_backend == "rational") {
        if (!arat.has_value()) throw InvalidInputError("audit: the rational backend needs exact input");
        rep = audit_rational(*arat, opt);
      } else if (aud_backend == "prime") {
        if (!arat.has_value()) throw InvalidInputError("audit: the prime backend needs exact input");
        rep = audit_prime(to_fp(*arat), opt);
      } else {
        if (acd.has_value()) rep = audit_complex(*acd, opt);
        else rep = audit_complex(to_complex(*arat), opt, &*arat);
      }
      bool ok = rep.is_instanton && rep.smooth && rep.rank_consistency &&
                rep.rr_shadow == 8ll * rep.k - 3;
      Json report = report_envelope(command);
      report["audit"] = to_json(rep);
      report["pass"] = ok;
      if (timings) report["seconds"] = elapsed();
      emit_report(report, aud_report);
      return ok ? static_cast<int>(ExitCode::Ok) : static_cast<int>(ExitCode::MathFailure);
    }

    if (pl->parsed()) {
      LoadedATensor in = atensor_from_json(load_json(pl_in));
      ATensor<CD> acd = in.as_complex();
      const ATensor<Rat>* exact = in.rat.has_value() ? &*in.rat : nullptr;
      DimensionProbe probe = w_dimension_probe(acd, pl_trials, pl_seed, exact);
      Json report = report_envelope(command);
      report["probe"] = to_json(probe);
      if (probe.dim_ge_2 && probe.hit_points.size() >= 9) {
        QuadricFitResult fit = quadric_fit(probe.hit_points);
        Json jf;
        jf["underdetermined"] = fit.underdetermined;
        jf["residual"] = fit.residual;
        report["quadric_fit"] = std::move(jf);
      }
      report["pass"] = true;
      if (timings) report["seconds"] = elapsed();
      emit_report(report, pl_report);
      return static_cast<int>(ExitCode::Ok);
    }

    if (cl->parsed()) {
      LoadedSymTensor in = sym_tensor_from_json(load_json(cl_in));
      if (!in.rat.has_value())
        throw InvalidInputError("classify: an exact (rational) STensor file is required");
      SymClassification cls = classify(*in.rat, cl_seed);
      Json report = report_envelope(command);
      report["classification"] = to_json(cls);
      report["pass"] = true;
      if (timings) report["seconds"] = elapsed();
      emit_report(report, cl_report);
      return static_cast<int>(ExitCode::Ok);
    }

    if (tr->parsed()) {
      LoadedATensor ina = atensor_from_json(load_json(tr_a));
      LoadedSymTensor ins = sym_tensor_from_json(load_json(tr_s));
      if (!ina.rat.has_value() || !ins.rat.has_value())
        throw InvalidInputError("trace: exact (rational) tensor files are required");
      TraceOutcome out = obstruction_trace(*ina.rat, *ins.rat, tr_seed);
      Json report = report_envelope(command);
      report["trace"] = to_json(out);
      report["pass"] = true;
      if (timings) report["seconds"] = elapsed();
      emit_report(report, tr_report);
      return static_cast<int>(ExitCode::Ok);
    }

    if (su->parsed()) {
      SuiteOptions opt;
      opt.k_min = su_kmin;
      opt.k_max = su_kmax;
      opt.jobs = su_jobs;
      opt.quick = su_quick;
      opt.seed = su_seed;
      if (opt.k_min < 1 || opt.k_max > 5 || opt.k_min > opt.k_max)
        throw InvalidInputError("suite: the charge range must sit inside 1..5");
      SuiteResult result = run_acceptance_suite(opt, std::cerr);
      Json report = report_envelope(command);
      report["suite"] = to_json(result, timings);
      report["pass"] = result.all_pass;
      if (timings) report["seconds"] = elapsed();
      emit_report(report, su_report);
      return result.all_pass ? static_cast<int>(ExitCode::Ok)
                             : static_cast<int>(ExitCode::MathFailure);
    }
  } catch (const InvalidInputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return static_cast<int>(ExitCode::InvalidInput);
  } catch (const NonConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    return static_cast<int>(ExitCode::NoConvergence);
  } catch (const MathFindingError& e) {
    std::cerr << "mathematical assertion failed: " << e.what() << "\n";
    return static_cast<int>(ExitCode::MathFailure);
  }
  return static_cast<int>(ExitCode::Ok);
}

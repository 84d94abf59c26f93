#include "instlab/io.hpp"

#include <fstream>

namespace ilab {

namespace {

Json meta_to_json(const FileMeta& m) {
  Json j;
  j["seed"] = m.seed;
  j["provenance"] = m.provenance;
  j["tool_version"] = m.tool_version;
  return j;
}

FileMeta meta_from_json(const Json& j) {
  FileMeta m;
  if (!j.is_object()) return m;
  if (j.contains("seed")) m.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("provenance")) m.provenance = j["provenance"].get<std::string>();
  if (j.contains("tool_version")) m.tool_version = j["tool_version"].get<std::string>();
  return m;
}

Json scalar_to_json(const Rat& x) { return Json(rat_str(x)); }
Json scalar_to_json(const CD& x) { return Json::array({x.real(), x.imag()}); }

Rat rat_from_json(const Json& j) {
  if (!j.is_string()) throw InvalidInputError("rational entries must be \"p/q\" strings");
  return rat_parse(j.get<std::string>());
}

CD cd_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InvalidInputError("complex entries must be [re, im] pairs");
  return CD(j[0].get<double>(), j[1].get<double>());
}

Fp fp_from_json(const Json& j) {
  if (!j.is_string()) throw InvalidInputError("prime-field entries must be decimal strings");
  const std::string s = j.get<std::string>();
  char* end = nullptr;
  unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') throw InvalidInputError("bad prime-field entry: " + s);
  return Fp::from_raw(v);
}

template <class T>
Json atensor_entries(const ATensor<T>& a) {
  Json rows = Json::array();
  for (int i = 0; i < 4; ++i) {
    Json ji = Json::array();
    for (int j = 0; j < a.k; ++j) {
      Json jl = Json::array();
      for (int l = 0; l < a.h_dim(); ++l) jl.push_back(scalar_to_json(a.at(i, j, l)));
      ji.push_back(std::move(jl));
    }
    rows.push_back(std::move(ji));
  }
  return rows;
}

template <class T>
Json sym_entries(const SymTensor<T>& s) {
  Json blocks = Json::array();
  for (const Mat<T>& b : s.blocks) {
    Json rows = Json::array();
    for (std::size_t l = 0; l < 4; ++l) {
      Json row = Json::array();
      for (std::size_t p = 0; p < 4; ++p) row.push_back(scalar_to_json(b(l, p)));
      rows.push_back(std::move(row));
    }
    blocks.push_back(std::move(rows));
  }
  return blocks;
}

int read_charge(const Json& j) {
  if (!j.contains("k") || !j["k"].is_number_integer())
    throw InvalidInputError("tensor file: missing integer charge \"k\"");
  int k = j["k"].get<int>();
  if (k < 1 || k > 64) throw InvalidInputError("tensor file: charge out of range");
  return k;
}

void expect_kind(const Json& j, const std::string& kind) {
  if (!j.contains("kind") || j["kind"] != kind)
    throw InvalidInputError("tensor file: expected kind \"" + kind + "\"");
}

FieldTag read_field(const Json& j) {
  if (!j.contains("field") || !j["field"].is_string())
    throw InvalidInputError("tensor file: missing \"field\"");
  std::string f = j["field"].get<std::string>();
  if (f == "rational") return FieldTag::Rational;
  if (f == "prime") return FieldTag::Prime;
  if (f == "complex") return FieldTag::Complex;
  throw InvalidInputError("tensor file: unknown field \"" + f + "\"");
}

}  // namespace

std::string field_name(FieldTag f) {
  switch (f) {
    case FieldTag::Rational: return "rational";
    case FieldTag::Prime: return "prime";
    case FieldTag::Complex: return "complex";
  }
  return "?";
}

Json tensor_to_json(const ATensor<Rat>& a, const FileMeta& meta) {
  Json j;
  j["kind"] = "ATensor";
  j["k"] = a.k;
  j["field"] = "rational";
  j["entries"] = atensor_entries(a);
  j["metadata"] = meta_to_json(meta);
  return j;
}

Json tensor_to_json(const ATensor<CD>& a, const FileMeta& meta) {
  Json j;
  j["kind"] = "ATensor";
  j["k"] = a.k;
  j["field"] = "complex";
  j["entries"] = atensor_entries(a);
  j["metadata"] = meta_to_json(meta);
  return j;
}

Json tensor_to_json(const SymTensor<Rat>& s, const FileMeta& meta) {
  Json j;
  j["kind"] = "STensor";
  j["k"] = s.k;
  j["field"] = "rational";
  j["entries"] = sym_entries(s);
  j["metadata"] = meta_to_json(meta);
  return j;
}

Json tensor_to_json(const SymTensor<CD>& s, const FileMeta& meta) {
  Json j;
  j["kind"] = "STensor";
  j["k"] = s.k;
  j["field"] = "complex";
  j["entries"] = sym_entries(s);
  j["metadata"] = meta_to_json(meta);
  return j;
}

LoadedATensor atensor_from_json(const Json& j) {
  expect_kind(j, "ATensor");
  LoadedATensor out;
  out.field = read_field(j);
  out.meta = j.contains("metadata") ? meta_from_json(j["metadata"]) : FileMeta{};
  const int k = read_charge(j);
  const int n = 2 * k + 2;
  if (!j.contains("entries") || !j["entries"].is_array() || j["entries"].size() != 4)
    throw InvalidInputError("ATensor file: entries must be a 4 x k x (2k+2) array");
  auto for_each_entry = [&](auto&& set) {
    for (int i = 0; i < 4; ++i) {
      const Json& ji = j["entries"][static_cast<std::size_t>(i)];
      if (!ji.is_array() || static_cast<int>(ji.size()) != k)
        throw InvalidInputError("ATensor file: entry shape mismatch in the b-index");
      for (int jj = 0; jj < k; ++jj) {
        const Json& jl = ji[static_cast<std::size_t>(jj)];
        if (!jl.is_array() || static_cast<int>(jl.size()) != n)
          throw InvalidInputError("ATensor file: entry shape mismatch in the h-index");
        for (int l = 0; l < n; ++l) set(i, jj, l, jl[static_cast<std::size_t>(l)]);
      }
    }
  };
  switch (out.field) {
    case FieldTag::Rational: {
      ATensor<Rat> a(k);
      for_each_entry([&](int i, int jj, int l, const Json& v) { a.at(i, jj, l) = rat_from_json(v); });
      out.rat = std::move(a);
      break;
    }
    case FieldTag::Prime: {
      if (j.contains("prime")) {
        std::string p = j["prime"].get<std::string>();
        if (p != std::to_string(Fp::modulus()))
          throw InvalidInputError("ATensor file: prime modulus differs from the configured one");
      }
      ATensor<Fp> a(k);
      for_each_entry([&](int i, int jj, int l, const Json& v) { a.at(i, jj, l) = fp_from_json(v); });
      out.fp = std::move(a);
      break;
    }
    case FieldTag::Complex: {
      ATensor<CD> a(k);
      for_each_entry([&](int i, int jj, int l, const Json& v) { a.at(i, jj, l) = cd_from_json(v); });
      out.cd = std::move(a);
      break;
    }
  }
  return out;
}

ATensor<CD> LoadedATensor::as_complex() const {
  if (cd.has_value()) return *cd;
  if (rat.has_value()) return to_complex(*rat);
  throw InvalidInputError("prime-field tensors have no complex image");
}

LoadedSymTensor sym_tensor_from_json(const Json& j) {
  expect_kind(j, "STensor");
  LoadedSymTensor out;
  out.field = read_field(j);
  out.meta = j.contains("metadata") ? meta_from_json(j["metadata"]) : FileMeta{};
  const int k = read_charge(j);
  const std::size_t npairs = wedge_count(k);
  if (!j.contains("entries") || !j["entries"].is_array() || j["entries"].size() != npairs)
    throw InvalidInputError("STensor file: one 4x4 block per index pair required");
  auto load_block = [&](const Json& jb, auto& mat) {
    if (!jb.is_array() || jb.size() != 4) throw InvalidInputError("STensor file: blocks must be 4x4");
    for (std::size_t l = 0; l < 4; ++l) {
      if (!jb[l].is_array() || jb[l].size() != 4)
        throw InvalidInputError("STensor file: blocks must be 4x4");
      for (std::size_t p = 0; p < 4; ++p) {
        if constexpr (std::is_same_v<std::decay_t<decltype(mat(0, 0))>, Rat>)
          mat(l, p) = rat_from_json(jb[l][p]);
        else
          mat(l, p) = cd_from_json(jb[l][p]);
      }
    }
  };
  if (out.field == FieldTag::Rational) {
    SymTensor<Rat> s(k);
    for (std::size_t b = 0; b < npairs; ++b) load_block(j["entries"][b], s.blocks[b]);
    for (const Mat<Rat>& blk : s.blocks)
      if (!blk.is_symmetric()) throw InvalidInputError("STensor file: blocks must be symmetric");
    out.rat = std::move(s);
  } else if (out.field == FieldTag::Complex) {
    SymTensor<CD> s(k);
    for (std::size_t b = 0; b < npairs; ++b) load_block(j["entries"][b], s.blocks[b]);
    out.cd = std::move(s);
  } else {
    throw InvalidInputError("STensor file: unsupported field");
  }
  return out;
}

void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw InvalidInputError(std::string("malformed JSON: ") + e.what());
  }
  return j;
}

template <class T>
Json to_json(const MonadCertificate<T>& c) {
  Json j;
  j["k"] = c.k;
  j["is_instanton"] = c.is_instanton();
  j["e2_status"] = c.e2_pass ? (c.e2_exact ? "exact-zero" : "residual") : "fail";
  j["e2_residual"] = c.e2_residual;
  j["e3_rank"] = c.e3_rank;
  j["e1_status"] = c.e1_pass ? "pass-probabilistic" : "fail";
  j["e1_samples"] = c.e1_samples;
  j["h0K"] = c.h0K;
  j["implication_violated"] = c.implication_violated();
  if (c.e1_witness.has_value()) {
    Json w;
    Json f = Json::array(), b = Json::array();
    for (std::size_t i = 0; i < 4; ++i) {
      if constexpr (std::is_same_v<T, Rat>) f.push_back(rat_str(c.e1_witness->first(i, 0)));
      else if constexpr (std::is_same_v<T, Fp>) f.push_back(std::to_string(c.e1_witness->first(i, 0).raw()));
      else f.push_back(Json::array({c.e1_witness->first(i, 0).real(), c.e1_witness->first(i, 0).imag()}));
    }
    for (std::size_t i = 0; i < c.e1_witness->second.rows(); ++i) {
      if constexpr (std::is_same_v<T, Rat>) b.push_back(rat_str(c.e1_witness->second(i, 0)));
      else if constexpr (std::is_same_v<T, Fp>) b.push_back(std::to_string(c.e1_witness->second(i, 0).raw()));
      else b.push_back(Json::array({c.e1_witness->second(i, 0).real(), c.e1_witness->second(i, 0).imag()}));
    }
    w["f"] = std::move(f);
    w["b"] = std::move(b);
    j["e1_witness"] = std::move(w);
  }
  return j;
}

Json to_json(const AuditReport& r) {
  Json j;
  j["k"] = r.k;
  j["backend"] = r.backend;
  j["is_instanton"] = r.is_instanton;
  j["e3_rank"] = r.e3_rank;
  j["h0K"] = r.h0K;
  j["tangent_dim"] = r.tangent_dim;
  j["moduli_tangent_dim"] = r.moduli_tangent_dim;
  j["xi_corank"] = r.corank;
  j["smooth"] = r.smooth;
  j["rank_consistency"] = r.rank_consistency;
  j["rr_shadow"] = r.rr_shadow;
  j["implication_violated"] = r.implication_violated;
  Json probe;
  probe["trials"] = r.probe_trials;
  probe["hits"] = r.probe_hits;
  probe["verdict"] = r.probe_dim_ge_2 ? "dim>=2" : "dim<=1-likely";
  probe["points"] = r.probe_points;
  if (r.probe_dim_ge_2) {
    probe["quadric_residual"] = r.quadric_residual;
    probe["quadric_ok"] = r.quadric_ok;
  }
  j["w_probe"] = std::move(probe);
  return j;
}

Json to_json(const DimensionProbe& p) {
  Json j;
  j["trials"] = p.trials;
  j["hits"] = p.hits;
  j["verdict"] = p.dim_ge_2 ? "dim>=2" : "dim<=1-likely";
  Json pts = Json::array();
  for (const PlanePoint& pt : p.hit_points) {
    Json q;
    Json f = Json::array();
    for (std::size_t i = 0; i < 4; ++i)
      f.push_back(Json::array({pt.fstar(i, 0).real(), pt.fstar(i, 0).imag()}));
    q["fstar"] = std::move(f);
    q["h0"] = pt.h0;
    q["exact_verified"] = pt.exact_verified;
    if (pt.bstar.has_value()) {
      Json b = Json::array();
      for (std::size_t i = 0; i < pt.bstar->rows(); ++i)
        b.push_back(Json::array({(*pt.bstar)(i, 0).real(), (*pt.bstar)(i, 0).imag()}));
      q["bstar"] = std::move(b);
    }
    pts.push_back(std::move(q));
  }
  j["hit_points"] = std::move(pts);
  return j;
}

Json to_json(const VanishingProbe& p) {
  Json j;
  j["trials"] = p.trials;
  j["hits"] = p.hits;
  j["verdict"] = p.dim_ge_2 ? "dim>=2" : "insufficient";
  j["points"] = p.points.size();
  j["jacobian_sigma2"] = p.jacobian_sigma2;
  return j;
}

Json to_json(const SymClassification& c) {
  Json j;
  j["rk"] = c.rk;
  j["r"] = c.r;
  switch (c.kind) {
    case SCaseKind::RankOneImage:
      j["case"] = "rank-one-image";
      j["image_sv1"] = c.image_sv1;
      j["image_sv2"] = c.image_sv2;
      break;
    case SCaseKind::AnnihilatingCovector: {
      j["case"] = "annihilating-covector";
      Json f = Json::array();
      for (std::size_t i = 0; i < 4; ++i) f.push_back(rat_str((*c.annihilator)(i, 0)));
      j["fstar0"] = std::move(f);
      break;
    }
    case SCaseKind::LargeVanishingLocus:
      j["case"] = "large-vanishing-locus";
      j["points"] = c.locus->points.size();
      j["jacobian_sigma2"] = c.locus->jacobian_sigma2;
      j["dim_ge_2"] = c.locus->dim_ge_2;
      break;
  }
  return j;
}

Json to_json(const TraceOutcome& t) {
  Json j;
  switch (t.kind) {
    case TraceCase::CaseI: j["case"] = "I"; break;
    case TraceCase::CaseII: j["case"] = "II"; break;
    case TraceCase::CaseIII: j["case"] = "III"; break;
    case TraceCase::E3Failure: j["case"] = "e3-failure"; break;
    case TraceCase::RankContradiction: j["case"] = "rank-contradiction"; break;
    case TraceCase::SmoothNoObstruction: j["case"] = "smooth-no-S"; break;
  }
  j["s_rank"] = t.s_rank;
  j["beta_rank"] = t.beta_rank;
  if (t.surjectivity_witness.has_value()) {
    Json f = Json::array(), b = Json::array();
    for (std::size_t i = 0; i < 4; ++i)
      f.push_back(Json::array({t.surjectivity_witness->first(i, 0).real(),
                               t.surjectivity_witness->first(i, 0).imag()}));
    for (std::size_t i = 0; i < t.surjectivity_witness->second.rows(); ++i)
      b.push_back(Json::array({t.surjectivity_witness->second(i, 0).real(),
                               t.surjectivity_witness->second(i, 0).imag()}));
    j["e1_witness"] = Json{{"f0", f}, {"b0", b}, {"residual", t.witness_residual}};
  }
  if (t.annihilator.has_value()) {
    Json f = Json::array();
    for (std::size_t i = 0; i < 4; ++i) f.push_back(rat_str((*t.annihilator)(i, 0)));
    j["fstar0"] = std::move(f);
    j["section_dim"] = t.section_dim;
  }
  if (t.locus.has_value()) {
    j["im_beta_equals_ker_rho"] = t.im_beta_equals_ker_rho;
    j["locus"] = to_json(*t.locus);
  }
  return j;
}

template Json to_json(const MonadCertificate<Rat>&);
template Json to_json(const MonadCertificate<Fp>&);
template Json to_json(const MonadCertificate<CD>&);

}  // namespace ilab

#pragma once

#include <json.hpp>

#include <optional>
#include <string>

#include "instlab/audit.hpp"

namespace ilab {

using Json = nlohmann::ordered_json;

struct FileMeta {
  std::uint64_t seed = 0;
  std::string provenance;
  std::string tool_version = kToolVersion;
};

enum class FieldTag { Rational, Prime, Complex };

std::string field_name(FieldTag f);

// Tensor files are JSON with dense nested entry arrays: rationals as "p/q"
// strings, prime residues as decimal strings next to the modulus, complex
// values as [re, im] pairs. Parse-then-serialize is the identity on
// canonical files.

Json tensor_to_json(const ATensor<Rat>& a, const FileMeta& meta);
Json tensor_to_json(const ATensor<CD>& a, const FileMeta& meta);
Json tensor_to_json(const SymTensor<Rat>& s, const FileMeta& meta);
Json tensor_to_json(const SymTensor<CD>& s, const FileMeta& meta);

struct LoadedATensor {
  FieldTag field{};
  FileMeta meta;
  std::optional<ATensor<Rat>> rat;
  std::optional<ATensor<Fp>> fp;
  std::optional<ATensor<CD>> cd;

  ATensor<CD> as_complex() const;
};

struct LoadedSymTensor {
  FieldTag field{};
  FileMeta meta;
  std::optional<SymTensor<Rat>> rat;
  std::optional<SymTensor<CD>> cd;
};

LoadedATensor atensor_from_json(const Json& j);
LoadedSymTensor sym_tensor_from_json(const Json& j);

void save_json(const std::string& path, const Json& j);
Json load_json(const std::string& path);

// report serialization

template <class T>
Json to_json(const MonadCertificate<T>& c);
Json to_json(const AuditReport& r);
Json to_json(const DimensionProbe& p);
Json to_json(const TraceOutcome& t);
Json to_json(const SymClassification& c);
Json to_json(const VanishingProbe& p);

extern template Json to_json(const MonadCertificate<Rat>&);
extern template Json to_json(const MonadCertificate<Fp>&);
extern template Json to_json(const MonadCertificate<CD>&);

}  // namespace ilab

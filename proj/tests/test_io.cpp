#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "instlab/io.hpp"

using namespace ilab;

TEST_CASE("exact tensor files round-trip bit-faithfully") {
  Rng rng(3001);
  ATensor<Rat> a = random_atensor<Rat>(rng, 5, 9);
  for (Rat& x : a.a) x /= Rat(static_cast<long>(1 + rng.below(7)));
  FileMeta meta{42, "test", kToolVersion};
  Json j = tensor_to_json(a, meta);
  LoadedATensor back = atensor_from_json(j);
  REQUIRE(back.rat.has_value());
  CHECK(back.rat->vec() == a.vec());
  CHECK(back.meta.seed == 42);
  // parse-then-serialize is the identity on canonical files
  CHECK(tensor_to_json(*back.rat, back.meta).dump(2) == j.dump(2));
}

TEST_CASE("obstruction tensor files round-trip with symmetric blocks") {
  Rng rng(3002);
  SymTensor<Rat> s = random_sym_tensor<Rat>(rng, 4, 7);
  FileMeta meta{7, "test", kToolVersion};
  Json j = tensor_to_json(s, meta);
  LoadedSymTensor back = sym_tensor_from_json(j);
  REQUIRE(back.rat.has_value());
  CHECK(back.rat->vec() == s.vec());
}

TEST_CASE("complex tensor files round-trip") {
  Rng rng(3003);
  ATensor<CD> a = random_atensor<CD>(rng, 3);
  Json j = tensor_to_json(a, FileMeta{});
  LoadedATensor back = atensor_from_json(j);
  REQUIRE(back.cd.has_value());
  CHECK(frob_norm(back.cd->vec() - a.vec()) == 0.0);
}

TEST_CASE("shape and content validation rejects malformed files") {
  Rng rng(3004);
  ATensor<Rat> a = random_atensor<Rat>(rng, 4, 5);
  Json j = tensor_to_json(a, FileMeta{});

  Json wrong_k = j;
  wrong_k["k"] = 5;  // header says 5, entries are shaped for 4
  CHECK_THROWS_AS(atensor_from_json(wrong_k), InvalidInputError);

  Json wrong_kind = j;
  wrong_kind["kind"] = "STensor";
  CHECK_THROWS_AS(atensor_from_json(wrong_kind), InvalidInputError);

  Json bad_entry = j;
  bad_entry["entries"][0][0][0] = "1/0";
  CHECK_THROWS_AS(atensor_from_json(bad_entry), InvalidInputError);

  SymTensor<Rat> s = random_sym_tensor<Rat>(rng, 3, 5);
  Json js = tensor_to_json(s, FileMeta{});
  js["entries"][0][0][1] = "99";  // breaks block symmetry
  CHECK_THROWS_AS(sym_tensor_from_json(js), InvalidInputError);
}

TEST_CASE("file save/load through the filesystem") {
  Rng rng(3005);
  ATensor<Rat> a = random_atensor<Rat>(rng, 2, 9);
  std::string path = "/tmp/instlab_io_test.json";
  save_json(path, tensor_to_json(a, FileMeta{11, "roundtrip", kToolVersion}));
  LoadedATensor back = atensor_from_json(load_json(path));
  REQUIRE(back.rat.has_value());
  CHECK(back.rat->vec() == a.vec());
  CHECK_THROWS_AS(load_json("/tmp/instlab_does_not_exist.json"), InvalidInputError);
}

TEST_CASE("report serialization carries the headline fields") {
  auto s = generate_slice(2, 3100);
  REQUIRE(s.has_value());
  AuditOptions opt;
  opt.e1_samples = 40;
  opt.run_probe = false;
  AuditReport rep = audit_rational(s->a, opt);
  Json j = to_json(rep);
  CHECK(j["moduli_tangent_dim"] == 13);
  CHECK(j["xi_corank"] == 0);
  CHECK(j["smooth"] == true);

  Json jc = to_json(s->certificate);
  CHECK(jc["is_instanton"] == true);
  CHECK(jc["e2_status"] == "exact-zero");
}

TEST_CASE("identical inputs serialize to identical bytes") {
  auto s1 = generate_slice(3, 3200);
  auto s2 = generate_slice(3, 3200);
  REQUIRE(s1.has_value());
  REQUIRE(s2.has_value());
  FileMeta meta{3200, s1->provenance, kToolVersion};
  CHECK(tensor_to_json(s1->a, meta).dump() == tensor_to_json(s2->a, meta).dump());
}

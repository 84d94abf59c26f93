#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "instlab/monad.hpp"
#include "oracles.hpp"

using namespace ilab;

TEST_CASE("certify: zero tensor fails E1 and E3 but satisfies E2") {
  MonadCertificate<Rat> c = certify(ATensor<Rat>(2), 5);
  CHECK(c.e2_pass);
  CHECK(c.e2_exact);
  CHECK(c.e3_rank == 0);
  CHECK(!c.e1_pass);
  REQUIRE(c.e1_witness.has_value());
  CHECK(!c.is_instanton());
}

TEST_CASE("certify: k=1 random full-rank tensor is an instanton") {
  Rng rng(211);
  for (int it = 0; it < 5; ++it) {
    ATensor<Rat> a = random_atensor<Rat>(rng, 1, 9);
    if (rank(a.flat()) < 4) continue;
    MonadCertificate<Rat> c = certify(a, 50);
    CHECK(c.e2_pass);  // the wedge codomain is zero at k=1
    CHECK(c.e3_rank == 4);
    CHECK(c.e1_pass);
    CHECK(c.is_instanton());
    CHECK(c.h0K == 0);
  }
}

TEST_CASE("generate_slice: certified samples for every charge, quadric exactly zero") {
  for (int k = 1; k <= 5; ++k) {
    auto s = generate_slice(k, 1000 + static_cast<std::uint64_t>(k));
    REQUIRE_MESSAGE(s.has_value(), "no certified slice sample for k=", k);
    CHECK(s->certificate.is_instanton());
    CHECK(!s->certificate.implication_violated());
    CHECK(monad_quadric(s->a).is_zero());
    CHECK(s->certificate.h0K == 0);
    CHECK(s->certificate.e3_rank == static_cast<std::size_t>(2 * k + 2));
  }
}

TEST_CASE("degenerate draws of the form Q = P C are rejected by certification") {
  Rng rng(223);
  for (int k = 2; k <= 4; ++k) {
    // F = [P | P C] kills the constant sections annihilated by [I | C]
    ATensor<Rat> a = slice_base_tensor<Rat>(k);
    int m = k + 1;
    Mat<Rat> cmat(static_cast<std::size_t>(m), static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        Rat v = random_rat(rng, 5);
        cmat(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
        cmat(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
      }
    for (int j = 0; j < k; ++j)
      for (int mm = 0; mm < m; ++mm) {
        a.at(0, j, k + 1 + mm) = cmat(static_cast<std::size_t>(j), static_cast<std::size_t>(mm));
        a.at(1, j, k + 1 + mm) = cmat(static_cast<std::size_t>(j + 1), static_cast<std::size_t>(mm));
      }
    CHECK(monad_quadric(a).is_zero());  // such tensors do satisfy the quadric
    MonadCertificate<Rat> c = certify(a, 30);
    CHECK(c.h0K >= static_cast<std::size_t>(k + 1));
    CHECK(!c.is_instanton());
  }
}

TEST_CASE("group action: identity, the gram matrix itself, scalars") {
  auto s = generate_slice(2, 77);
  REQUIRE(s.has_value());
  const ATensor<Rat>& a = s->a;
  int k = 2, n = 2 * k + 2;

  GroupElement<Rat> id{Mat<Rat>::identity(4), Mat<Rat>::identity(2), Mat<Rat>::identity(6)};
  CHECK(group_act(id, a).vec() == a.vec());

  GroupElement<Rat> gj{Mat<Rat>::identity(4), Mat<Rat>::identity(2), sympl_gram<Rat>(k)};
  ATensor<Rat> aj = group_act(gj, a);
  MonadCertificate<Rat> cj = certify(aj, 60);
  CHECK(cj.is_instanton());
  CHECK(cj.e3_rank == static_cast<std::size_t>(n));

  ATensor<Rat> al = a.scaled(Rat(7, 3));
  MonadCertificate<Rat> cl = certify(al, 60);
  CHECK(cl.is_instanton());
}

TEST_CASE("group action preserves the certificate pattern for random elements") {
  Rng rng(227);
  auto s = generate_slice(3, 55);
  REQUIRE(s.has_value());
  for (int it = 0; it < 5; ++it) {
    GroupElement<Rat> g = random_group_element<Rat>(rng, 3, 2);
    ATensor<Rat> ga = group_act(g, s->a);
    MonadCertificate<Rat> c = certify(ga, 60, 900 + static_cast<std::uint64_t>(it));
    CHECK(c.is_instanton() == s->certificate.is_instanton());
    CHECK(c.e3_rank == s->certificate.e3_rank);
  }
}

TEST_CASE("group action rejects a non-symplectic middle factor") {
  auto s = generate_slice(2, 78);
  REQUIRE(s.has_value());
  GroupElement<Rat> bad{Mat<Rat>::identity(4), Mat<Rat>::identity(2), Mat<Rat>::identity(6).scaled(Rat(2))};
  CHECK_THROWS_AS(group_act(bad, s->a), InvalidInputError);
}

TEST_CASE("h0_plane: bounded by one on random planes, zero covector rejected") {
  Rng rng(229);
  for (int k = 2; k <= 3; ++k) {
    auto s = generate_slice(k, 300 + static_cast<std::uint64_t>(k));
    REQUIRE(s.has_value());
    for (int it = 0; it < 60; ++it) {
      Mat<Rat> fstar = random_matrix<Rat>(rng, 4, 1, 9);
      if (fstar.is_zero()) continue;
      std::size_t h0 = h0_plane(s->a, fstar);
      CHECK(h0 <= 1);
    }
    CHECK_THROWS_AS(h0_plane(s->a, Mat<Rat>(4, 1)), InvalidInputError);
  }
}

TEST_CASE("h0_plane is independent of the plane basis") {
  Rng rng(233);
  auto s = generate_slice(3, 99);
  REQUIRE(s.has_value());
  for (int it = 0; it < 20; ++it) {
    Mat<Rat> fstar = random_matrix<Rat>(rng, 4, 1, 9);
    if (fstar.is_zero()) continue;
    auto basis = plane_basis(fstar);
    std::size_t h0 = static_cast<std::size_t>(s->a.h_dim()) -
                     rank(plane_restriction_matrix(s->a, basis));
    // re-mix the basis by a random invertible 3x3 change
    Mat<Rat> mix(3, 3);
    do {
      mix = random_matrix<Rat>(rng, 3, 3, 5);
    } while (rank(mix) < 3);
    std::vector<Mat<Rat>> basis2;
    for (int c = 0; c < 3; ++c) {
      Mat<Rat> u(4, 1);
      for (int b = 0; b < 3; ++b)
        u = u + basis[static_cast<std::size_t>(b)].scaled(mix(static_cast<std::size_t>(b), static_cast<std::size_t>(c)));
      basis2.push_back(u);
    }
    std::size_t h0b = static_cast<std::size_t>(s->a.h_dim()) -
                      rank(plane_restriction_matrix(s->a, basis2));
    CHECK(h0 == h0b);
  }
}

TEST_CASE("generate_newton: an exact slice start converges in zero iterations") {
  auto s = generate_slice(2, 44);
  REQUIRE(s.has_value());
  ATensor<CD> start = to_complex(s->a);
  NewtonResult r = generate_newton(2, 5, 60, 0, &start);
  REQUIRE(r.sample.has_value());
  CHECK(r.iterations == 0);
  CHECK(r.sample->certificate.is_instanton());
}

TEST_CASE("generate_newton: k=1 accepts a random start without iteration work") {
  NewtonResult r = generate_newton(1, 17);
  REQUIRE(r.sample.has_value());
  CHECK(r.sample->certificate.e3_rank == 4);
}

TEST_CASE("generate_newton: random starts converge and certify for small charges") {
  for (int k = 2; k <= 3; ++k) {
    NewtonResult r = generate_newton(k, 400 + static_cast<std::uint64_t>(k));
    REQUIRE_MESSAGE(r.sample.has_value(), "newton failed for k=", k, " residual=", r.residual);
    CHECK(r.sample->certificate.e3_rank == static_cast<std::size_t>(2 * k + 2));
    double na = frob_norm(r.sample->a.vec());
    CHECK(frob_norm(monad_quadric(r.sample->a).vec()) <= 1e-10 * na * na);
  }
}

TEST_CASE("an explicit E1 failure carries an exact witness") {
  Rng rng(239);
  ATensor<Rat> a = random_atensor<Rat>(rng, 3, 5);
  for (int i = 0; i < 4; ++i)
    for (int l = 0; l < a.h_dim(); ++l) a.at(i, 0, l) = 0;  // b_1 direction dies
  MonadCertificate<Rat> c = certify(a, 20);
  CHECK(!c.e1_pass);
  REQUIRE(c.e1_witness.has_value());
  auto [f, b] = *c.e1_witness;
  Mat<Rat> fb(4, 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j)
      fb(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          f(static_cast<std::size_t>(i), 0) * b(static_cast<std::size_t>(j), 0);
  CHECK(epsilon_apply(a, fb).is_zero());
}

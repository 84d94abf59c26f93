#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "instlab/planes.hpp"

using namespace ilab;

namespace {

InstantonSample<Rat> sample_for(int k, std::uint64_t seed) {
  auto s = generate_slice(k, seed);
  REQUIRE(s.has_value());
  return *s;
}

}  // namespace

TEST_CASE("unstable test agrees with the restriction-matrix route on random planes") {
  Rng rng(801);
  for (int k = 2; k <= 3; ++k) {
    InstantonSample<Rat> s = sample_for(k, 900 + static_cast<std::uint64_t>(k));
    for (int it = 0; it < 100; ++it) {
      Mat<Rat> fstar = random_matrix<Rat>(rng, 4, 1, 9);
      if (fstar.is_zero()) continue;
      UnstableTestResult<Rat> ut = unstable_plane_test(s.a, fstar);
      std::size_t h0 = h0_plane(s.a, fstar);
      CHECK(ut.unstable == (h0 >= 1));
      if (ut.unstable) {
        CHECK(ut.intersection_dim == 1);  // the section direction is unique
        REQUIRE(ut.bstar.has_value());
      }
    }
  }
}

TEST_CASE("unstable test rejects the zero covector") {
  InstantonSample<Rat> s = sample_for(2, 910);
  CHECK_THROWS_AS(unstable_plane_test(s.a, Mat<Rat>(4, 1)), InvalidInputError);
}

TEST_CASE("line probe finds a seeded unstable plane") {
  // k = 1: every plane is unstable, any pencil lies in the locus
  InstantonSample<Rat> s1 = sample_for(1, 920);
  ATensor<CD> a1 = to_complex(s1.a);
  Mat<CD> f0(4, 1), f1(4, 1);
  f0(0, 0) = 1.0;
  f1(1, 0) = 1.0;
  std::vector<PlanePoint> hits1 = w_line_probe(a1, f0, f1, &s1.a);
  CHECK(!hits1.empty());
  for (const PlanePoint& p : hits1) CHECK(p.h0 == 1);

  // k = 2: find an unstable plane by scanning, then probe a pencil through it
  InstantonSample<Rat> s2 = sample_for(2, 921);
  Rng rng(922);
  std::optional<Mat<Rat>> found;
  for (int it = 0; it < 4000 && !found.has_value(); ++it) {
    Mat<Rat> fstar(4, 1);
    for (int i = 0; i < 4; ++i)
      fstar(static_cast<std::size_t>(i), 0) = Rat(static_cast<long>(rng.int_range(-6, 6)));
    if (fstar.is_zero()) continue;
    if (h0_plane(s2.a, fstar) >= 1) found = fstar;
  }
  REQUIRE_MESSAGE(found.has_value(), "no unstable plane located by scanning");
  ATensor<CD> a2 = to_complex(s2.a);
  Mat<CD> g0 = to_complex(*found);
  Mat<CD> g1(4, 1);
  g1(0, 0) = 1.0;
  g1(2, 0) = -2.0;  // generic second covector
  std::vector<PlanePoint> hits2 = w_line_probe(a2, g0, g1, &s2.a);
  bool recovered = false;
  for (const PlanePoint& p : hits2) {
    // the seeded plane sits at t = 0
    Mat<CD> diff = p.fstar - g0.scaled(p.fstar(0, 0) / std::max(std::abs(g0(0, 0)), 1e-300) /
                                       (g0(0, 0) / std::abs(g0(0, 0))));
    // compare projectively instead
    CD ip = 0.0;
    double n1 = 0.0, n2 = 0.0;
    for (int i = 0; i < 4; ++i) {
      ip += std::conj(p.fstar(static_cast<std::size_t>(i), 0)) * g0(static_cast<std::size_t>(i), 0);
      n1 += std::norm(p.fstar(static_cast<std::size_t>(i), 0));
      n2 += std::norm(g0(static_cast<std::size_t>(i), 0));
    }
    (void)diff;
    if (1.0 - std::abs(ip) / std::sqrt(n1 * n2) < 1e-6) recovered = true;
  }
  CHECK(recovered);
  for (const PlanePoint& p : hits2) {
    CHECK(p.h0 == 1);
    CHECK(p.bstar.has_value());
  }
}

TEST_CASE("dimension probe: surface verdict for k=2, sparse verdict for k=5") {
  InstantonSample<Rat> s2 = sample_for(2, 930);
  ATensor<CD> a2 = to_complex(s2.a);
  DimensionProbe p2 = w_dimension_probe(a2, 20, 931, &s2.a);
  CHECK(p2.dim_ge_2);
  CHECK(p2.hit_points.size() >= 20);
  for (const PlanePoint& p : p2.hit_points) CHECK(p.h0 == 1);

  InstantonSample<Rat> s5 = sample_for(5, 932);
  ATensor<CD> a5 = to_complex(s5.a);
  DimensionProbe p5 = w_dimension_probe(a5, 20, 933, &s5.a);
  CHECK(!p5.dim_ge_2);

  CHECK_THROWS_AS(w_dimension_probe(a2, 0, 1), InvalidInputError);
}

TEST_CASE("quadric fit recovers a synthetic Segre quadric") {
  // points (u, ut, v, vt) sweep the surface x0 x3 - x1 x2 = 0
  std::vector<PlanePoint> pts;
  Rng rng(941);
  for (int it = 0; it < 14; ++it) {
    double u = rng.sym_unit() + 2.0, v = rng.sym_unit() - 2.0, t = rng.sym_unit() * 3.0;
    PlanePoint p;
    p.fstar = Mat<CD>(4, 1);
    p.fstar(0, 0) = u;
    p.fstar(1, 0) = u * t;
    p.fstar(2, 0) = v;
    p.fstar(3, 0) = v * t;
    p.h0 = 1;
    pts.push_back(p);
  }
  QuadricFitResult fit = quadric_fit(pts);
  REQUIRE(!fit.underdetermined);
  CHECK(fit.residual <= 1e-8);
  // the recovered quadric vanishes on fresh surface points
  for (int it = 0; it < 5; ++it) {
    double u = rng.sym_unit() * 2.0 + 3.0, v = rng.sym_unit(), t = rng.sym_unit() - 1.5;
    CD x[4] = {u, u * t, v, v * t};
    CD val = 0.0;
    auto pairs4 = sym4_pairs();
    double nx = 0.0;
    for (auto& xi : x) nx += std::norm(xi);
    for (int c = 0; c < kSymPairCount; ++c) {
      auto [l, p] = pairs4[static_cast<std::size_t>(c)];
      val += fit.coeffs[static_cast<std::size_t>(c)] * x[l] * x[p] / nx;
    }
    CHECK(std::abs(val) <= 1e-7);
  }
}

TEST_CASE("quadric fit is underdetermined below nine points") {
  std::vector<PlanePoint> pts(8);
  for (auto& p : pts) {
    p.fstar = Mat<CD>(4, 1);
    p.fstar(0, 0) = 1.0;
  }
  CHECK(quadric_fit(pts).underdetermined);
}

TEST_CASE("probe hits on a k=2 sample admit a tight quadric fit") {
  InstantonSample<Rat> s2 = sample_for(2, 950);
  ATensor<CD> a2 = to_complex(s2.a);
  DimensionProbe probe = w_dimension_probe(a2, 20, 951, &s2.a);
  REQUIRE(probe.dim_ge_2);
  REQUIRE(probe.hit_points.size() >= 9);
  QuadricFitResult fit = quadric_fit(probe.hit_points);
  REQUIRE(!fit.underdetermined);
  CHECK(fit.residual <= 1e-8);
}

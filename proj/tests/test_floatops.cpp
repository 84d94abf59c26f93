#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "instlab/floatops.hpp"

using namespace ilab;

namespace {

Mat<CD> cmat(std::initializer_list<std::initializer_list<double>> rows) {
  Mat<CD> m(rows.size(), rows.begin()->size());
  std::size_t r = 0;
  for (const auto& row : rows) {
    std::size_t c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

bool has_root_near(const std::vector<CD>& roots, CD z, double tol = 1e-7) {
  for (const CD& r : roots)
    if (std::abs(r - z) < tol) return true;
  return false;
}

}  // namespace

TEST_CASE("pencil_roots: diagonal pencil") {
  auto pr = pencil_roots(Mat<CD>::identity(2), cmat({{2, 0}, {0, 3}}));
  REQUIRE(!pr.identically_singular);
  REQUIRE(pr.roots.size() == 2);
  CHECK(has_root_near(pr.roots, 2.0));
  CHECK(has_root_near(pr.roots, 3.0));
}

TEST_CASE("pencil_roots: proportional skew pair gives a double root") {
  Mat<CD> r1 = cmat({{0, 1}, {-1, 0}});
  auto pr = pencil_roots(r1, r1.scaled(3.0));
  REQUIRE(!pr.identically_singular);
  REQUIRE(pr.roots.size() == 2);
  CHECK(has_root_near(pr.roots, 3.0, 1e-5));
  CHECK(has_root_near(pr.roots, 3.0, 1e-5));
}

TEST_CASE("pencil_roots: zero pencil is identically singular") {
  auto pr = pencil_roots(Mat<CD>(3, 3), Mat<CD>(3, 3));
  CHECK(pr.identically_singular);
}

TEST_CASE("pencil_roots: every root drops the rank") {
  Rng rng(31);
  for (int it = 0; it < 20; ++it) {
    std::size_t n = 2 + rng.below(4);
    Mat<CD> r1 = random_matrix<CD>(rng, n, n), r2 = random_matrix<CD>(rng, n, n);
    auto pr = pencil_roots(r1, r2);
    if (pr.identically_singular) continue;
    for (const CD& mu : pr.roots) {
      Mat<CD> m = r2 - r1.scaled(mu);
      CHECK(rank_svd(m, 1e-6) < n);
    }
  }
}

TEST_CASE("common_eigenvector: diagonal pair picks a coordinate direction") {
  Mat<CD> u = cmat({{1, 0, 0, 0}, {0, 2, 0, 0}, {0, 0, 3, 0}, {0, 0, 0, 4}});
  Mat<CD> v = cmat({{5, 0, 0, 0}, {0, 6, 0, 0}, {0, 0, 7, 0}, {0, 0, 0, 8}});
  auto ce = common_eigenvector(u, v);
  CHECK(ce.residual <= 1e-8);
  CHECK(std::abs(ce.eig_v - (ce.eig_u + 4.0)) < 1e-8);  // pairs (1,5)..(4,8)
}

TEST_CASE("common_eigenvector: V = I accepts any eigenvector of U") {
  Rng rng(37);
  Mat<CD> u = random_matrix<CD>(rng, 5, 5);
  auto ce = common_eigenvector(u, Mat<CD>::identity(5));
  CHECK(ce.residual <= 1e-7);
  CHECK(std::abs(ce.eig_v - 1.0) < 1e-7);
}

TEST_CASE("common_eigenvector: commuting pairs built as polynomials in one matrix") {
  Rng rng(41);
  for (int it = 0; it < 10; ++it) {
    Mat<CD> m = random_matrix<CD>(rng, 4, 4);
    Mat<CD> u = m * m + m.scaled(CD(0.5, 0.25));
    Mat<CD> v = m * m * m - m.scaled(2.0) + Mat<CD>::identity(4);
    auto ce = common_eigenvector(u, v);
    CHECK(ce.residual <= 1e-8);
  }
}

TEST_CASE("common_eigenvector: rejects a non-commuting pair") {
  Mat<CD> u = cmat({{0, 1}, {0, 0}});
  Mat<CD> v = cmat({{0, 0}, {1, 0}});
  CHECK_THROWS_AS(common_eigenvector(u, v), MathFindingError);
}

TEST_CASE("symmetric_congruence_normalize: identity, zero, diag(4,9,0,0)") {
  auto nf = symmetric_congruence_normalize(Mat<CD>::identity(4));
  CHECK(nf.rank == 4);
  CHECK(nf.residual <= 1e-10);

  auto nz = symmetric_congruence_normalize(Mat<CD>(3, 3));
  CHECK(nz.rank == 0);

  Mat<CD> d = cmat({{4, 0, 0, 0}, {0, 9, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}});
  auto nd = symmetric_congruence_normalize(d);
  CHECK(nd.rank == 2);
  CHECK(nd.residual <= 1e-10);
}

TEST_CASE("symmetric_congruence_normalize: random symmetric, rank matches SVD") {
  Rng rng(43);
  for (int it = 0; it < 20; ++it) {
    std::size_t n = 2 + rng.below(4);
    Mat<CD> a = random_matrix<CD>(rng, n, n);
    Mat<CD> m = a + a.transpose();
    auto nf = symmetric_congruence_normalize(m);
    CHECK(nf.rank == rank_svd(m));
    CHECK(nf.residual <= 1e-8 * std::max(1.0, m.max_abs()));
  }
}

TEST_CASE("symmetric_congruence_normalize: rejects non-symmetric input") {
  CHECK_THROWS_AS(symmetric_congruence_normalize(cmat({{0, 1}, {0, 0}})), InvalidInputError);
}

TEST_CASE("skew_congruence_normalize: random skew matrices") {
  Rng rng(47);
  for (int it = 0; it < 20; ++it) {
    std::size_t n = 2 + rng.below(5);
    Mat<CD> a = random_matrix<CD>(rng, n, n);
    Mat<CD> m = a - a.transpose();
    auto nf = skew_congruence_normalize(m);
    CHECK(nf.rank % 2 == 0);
    CHECK(nf.rank == rank_svd(m));
    CHECK(nf.residual <= 1e-8 * std::max(1.0, m.max_abs()));
  }
}

TEST_CASE("nullspace_svd spans the kernel") {
  Rng rng(53);
  Mat<CD> a = random_matrix<CD>(rng, 3, 6);
  auto ns = nullspace_svd(a);
  CHECK(ns.size() == 3);
  for (const auto& v : ns) CHECK(frob_norm(a * v) <= 1e-9 * frob_norm(a));
}

TEST_CASE("poly_roots of (x-1)(x-2)(x-3)") {
  std::vector<CD> c = {-6.0, 11.0, -6.0, 1.0};
  auto roots = poly_roots(c);
  REQUIRE(roots.size() == 3);
  CHECK(has_root_near(roots, 1.0));
  CHECK(has_root_near(roots, 2.0));
  CHECK(has_root_near(roots, 3.0));
}

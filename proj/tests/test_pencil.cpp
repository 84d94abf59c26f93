#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "instlab/skewpencil.hpp"

using namespace ilab;

namespace {

Mat<CD> skew2(double x) {
  Mat<CD> m(2, 2);
  m(0, 1) = x;
  m(1, 0) = -x;
  return m;
}

Mat<CD> random_skew(Rng& rng, std::size_t k) {
  Mat<CD> a = random_matrix<CD>(rng, k, k);
  return a - a.transpose();
}

void check_witness(const Mat<CD>& r1, const Mat<CD>& r2, const PencilWitness& w) {
  double scale = std::max(1.0, std::max(r1.max_abs(), r2.max_abs()));
  CHECK(std::abs(frob_norm(w.v0) - 1.0) < 1e-9);
  CHECK(frob_norm(r1 * w.v0 - w.u0.scaled(w.lambda1)) <= 1e-8 * scale);
  CHECK(frob_norm(r2 * w.v0 - w.u0.scaled(w.lambda2)) <= 1e-8 * scale);
  CHECK(w.image_norm() > 1e-6 * scale);
}

}  // namespace

TEST_CASE("skew pencil: invertible base with zero partner") {
  Mat<CD> r1 = skew2(1.0), r2(2, 2);
  PencilWitness w = skew_pencil_solve(r1, r2);
  check_witness(r1, r2, w);
  CHECK(std::abs(w.lambda2) < 1e-9);  // (l1, l2) ~ (1, 0)
  CHECK(std::abs(w.lambda1) == doctest::Approx(1.0));
}

TEST_CASE("skew pencil: proportional pair recovers the ratio 3") {
  Mat<CD> r1 = skew2(1.0);
  PencilWitness w = skew_pencil_solve(r1, r1.scaled(3.0));
  check_witness(r1, r1.scaled(3.0), w);
  CHECK(std::abs(w.lambda2 / w.lambda1 - 3.0) < 1e-6);
}

TEST_CASE("skew pencil: zero pair is rejected") {
  CHECK_THROWS_AS(skew_pencil_solve(Mat<CD>(3, 3), Mat<CD>(3, 3)), InvalidInputError);
}

TEST_CASE("skew pencil: non-skew input is rejected") {
  Mat<CD> m(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(skew_pencil_solve(m, Mat<CD>(2, 2)), InvalidInputError);
}

TEST_CASE("skew pencil: random pairs of every size, including odd") {
  Rng rng(301);
  for (int it = 0; it < 120; ++it) {
    std::size_t k = 2 + rng.below(4);  // 2..5
    Mat<CD> r1 = random_skew(rng, k), r2 = random_skew(rng, k);
    PencilWitness w = skew_pencil_solve(r1, r2);
    check_witness(r1, r2, w);
  }
}

TEST_CASE("skew pencil: forced-singular base matrices") {
  Rng rng(307);
  for (int it = 0; it < 60; ++it) {
    std::size_t k = 3 + rng.below(3);  // 3..5
    // embed a smaller skew block so the base is singular by construction
    std::size_t kp = 2 * (1 + rng.below(k / 2)) - 2;  // 0, 2, or 4 < k
    Mat<CD> r1(k, k);
    if (kp > 0) {
      Mat<CD> a = random_skew(rng, kp);
      r1.set_block(0, 0, a);
    }
    Mat<CD> r2 = random_skew(rng, k);
    if (r1.max_abs() == 0.0 && r2.max_abs() == 0.0) continue;
    PencilWitness w = skew_pencil_solve(r1, r2);
    check_witness(r1, r2, w);
  }
}

TEST_CASE("skew pencil: identically singular pencils with a common kernel") {
  Rng rng(311);
  for (int it = 0; it < 40; ++it) {
    std::size_t k = 3 + rng.below(3);
    // both matrices kill the last coordinate: det(R2 - mu R1) = 0 identically
    Mat<CD> r1(k, k), r2(k, k);
    Mat<CD> a = random_skew(rng, k - 1), b = random_skew(rng, k - 1);
    r1.set_block(0, 0, a);
    r2.set_block(0, 0, b);
    if (r1.max_abs() == 0.0 && r2.max_abs() == 0.0) continue;
    PencilWitness w = skew_pencil_solve(r1, r2);
    check_witness(r1, r2, w);
  }
}

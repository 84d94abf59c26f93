#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "instlab/classify.hpp"

using namespace ilab;

namespace {

/// Undisguised charge-5 tensor with identity leading block and commuting
/// remaining blocks (the normalized shape of the rank-8, pair-rank-4 case).
SymTensor<Rat> normalized_pair4(std::uint64_t seed) {
  Rng rng(seed);
  Mat<Rat> d(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      Rat v = random_rat(rng, 3);
      d(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
      d(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
    }
  auto poly = [&]() {
    return Mat<Rat>::identity(4).scaled(random_rat(rng, 3)) + d.scaled(random_rat(rng, 3)) +
           (d * d).scaled(random_rat(rng, 2));
  };
  SymTensor<Rat> s(5);
  s.stored(0, 1) = Mat<Rat>::identity(4);
  Mat<Rat> a[3] = {poly(), poly(), poly()};
  Mat<Rat> b[3] = {poly(), poly(), poly()};
  for (int j = 0; j < 3; ++j) {
    s.stored(0, 2 + j) = a[j];
    s.stored(1, 2 + j) = b[j];
  }
  for (int i = 2; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) s.stored(i, j) = a[i - 2] * b[j - 2] - b[i - 2] * a[j - 2];
  return s;
}

bool on_line(const Mat<CD>& bstar, const Mat<Rat>& n1, const Mat<Rat>& n2) {
  Mat<CD> m = hstack(hstack(to_complex(n1), to_complex(n2)), bstar);
  return rank_svd(m, 1e-7) == 2;
}

}  // namespace

TEST_CASE("max_pair_rank on single-term tensors") {
  CHECK(max_pair_rank(SymTensor<Rat>(3)).r == 0);
  CHECK(max_pair_rank(SymTensor<Rat>::basis_term(2, 0, 0, 0, 1)).r == 1);
  CHECK(max_pair_rank(SymTensor<Rat>::basis_term(2, 0, 1, 0, 1)).r == 2);
}

TEST_CASE("max_pair_rank basis change realizes the maximum in the leading block") {
  Rng rng(401);
  for (int it = 0; it < 10; ++it) {
    int k = 3 + static_cast<int>(rng.below(3));
    SymTensor<Rat> s = random_sym_tensor<Rat>(rng, k, 4);
    PairRankResult pr = max_pair_rank(s, 40, rng.next_u64());
    CHECK(rank(pr.basis_change) == static_cast<std::size_t>(k));
    GroupElement<Rat> g{Mat<Rat>::identity(4), pr.basis_change,
                        Mat<Rat>::identity(static_cast<std::size_t>(2 * k + 2))};
    SymTensor<Rat> sb = act(g, s);
    CHECK(rank(sb.stored(0, 1)) == static_cast<std::size_t>(pr.r));
  }
}

TEST_CASE("classification: rank-one image for low pair rank, with verified witness") {
  std::uint64_t seed = 500;
  for (int k = 2; k <= 5; ++k)
    for (int r = 1; r <= (k == 2 ? 1 : 2); ++r) {
      SymTensor<Rat> s = random_low_pair_rank(k, r, seed++);
      CHECK(flattening_rank(s) == static_cast<std::size_t>(2 * r));
      SymClassification cls = classify(s, seed);
      CHECK(cls.kind == SCaseKind::RankOneImage);
      CHECK(cls.r == r);
      REQUIRE(cls.rank_one_bstar.has_value());
      // independent re-verification of the rank-one image
      Mat<CD> image = contract(to_complex(s), *cls.rank_one_bstar);
      CHECK(rank_svd(image, 1e-6) == 1);
      CHECK(frob_norm(image - outer(cls.f0, cls.b0)) <= 1e-6 * std::max(1.0, frob_norm(image)));
    }
}

TEST_CASE("classification: annihilating covector for rank 6, exact evaluations") {
  std::uint64_t seed = 600;
  for (int k = 4; k <= 5; ++k) {
    SymTensor<Rat> s = random_rank6(k, seed++);
    CHECK(flattening_rank(s) == 6);
    SymClassification cls = classify(s, seed);
    CHECK(cls.kind == SCaseKind::AnnihilatingCovector);
    CHECK(cls.r == 3);
    REQUIRE(cls.annihilator.has_value());
    for (int j = 0; j < k; ++j) {
      Mat<Rat> ej(static_cast<std::size_t>(k), 1);
      ej(static_cast<std::size_t>(j), 0) = 1;
      CHECK(contract(s, outer(*cls.annihilator, ej)).is_zero());
    }
  }
}

TEST_CASE("classification: rank 8 with pair rank 4 certifies a 2-dimensional locus") {
  SymTensor<Rat> s = random_rank8_pair4(700);
  CHECK(flattening_rank(s) == 8);
  SymClassification cls = classify(s, 701);
  CHECK(cls.kind == SCaseKind::LargeVanishingLocus);
  CHECK(cls.r == 4);
  REQUIRE(cls.locus.has_value());
  CHECK(cls.locus->dim_ge_2);
  CHECK(cls.locus->points.size() >= 20);
  CHECK(cls.locus->jacobian_sigma2 > 1e-6);
  for (const VanishingPoint& p : cls.locus->points) CHECK(p.residual <= 1e-6);
  // points are pairwise distinct as projective pairs
  int distinct = 0;
  for (std::size_t i = 0; i + 1 < cls.locus->points.size(); ++i) {
    double d = frob_norm(cls.locus->points[i].bstar - cls.locus->points[i + 1].bstar);
    if (d > 1e-4) ++distinct;
  }
  CHECK(distinct >= 20);
}

TEST_CASE("classification: rank 8 with pair rank 3 certifies a 2-dimensional locus") {
  SymTensor<Rat> s = random_rank8_pair3(710);
  CHECK(flattening_rank(s) == 8);
  SymClassification cls = classify(s, 711);
  CHECK(cls.kind == SCaseKind::LargeVanishingLocus);
  CHECK(cls.r == 3);
  REQUIRE(cls.locus.has_value());
  CHECK(cls.locus->dim_ge_2);
  CHECK(cls.locus->points.size() >= 20);
  for (const VanishingPoint& p : cls.locus->points) CHECK(p.residual <= 1e-6);
}

TEST_CASE("classify rejects tensors outside the assumed rank range") {
  Rng rng(720);
  SymTensor<Rat> zero(3);
  CHECK_THROWS_AS(classify(zero, 1), InvalidInputError);
  // a generic k=2 tensor has flattening rank 4 > 2k-2 = 2
  for (int it = 0; it < 5; ++it) {
    SymTensor<Rat> s = random_sym_tensor<Rat>(rng, 2, 5);
    if (flattening_rank(s) <= 2) continue;
    CHECK_THROWS_AS(classify(s, 1), InvalidInputError);
    break;
  }
}

TEST_CASE("commuting pencil point: single-matrix tail direction") {
  SymTensor<Rat> s = normalized_pair4(730);
  SymTensor<CD> sn = to_complex(s);
  VanishingPoint p = commuting_pencil_point(sn, {CD(1, 0), CD(0, 0), CD(0, 0)});
  CHECK(p.residual <= 1e-7);
  // tail of b* is proportional to (1, 0, 0)
  CHECK(std::abs(p.bstar(3, 0)) <= 1e-7);
  CHECK(std::abs(p.bstar(4, 0)) <= 1e-7);
}

TEST_CASE("commuting pencil point rejects a non-commuting tensor") {
  SymTensor<Rat> s(5);
  s.stored(0, 1) = Mat<Rat>::identity(4);
  Mat<Rat> e11(4, 4), e12(4, 4);
  e11(0, 0) = 1;
  e12(0, 1) = 1;
  e12(1, 0) = 1;
  s.stored(0, 2) = e11;
  s.stored(1, 2) = e12;  // [e11, e12] != 0
  CHECK_THROWS_AS(commuting_pencil_point(to_complex(s), {CD(1, 0), CD(0, 0), CD(0, 0)}),
                  MathFindingError);
}

TEST_CASE("dependent rows point: verified points on twenty random lines") {
  SymTensor<Rat> s = random_rank8_pair3(740);
  Rng rng(741);
  int found = 0;
  std::vector<Mat<CD>> bs;
  for (int it = 0; it < 20; ++it) {
    Mat<Rat> n1 = random_matrix<Rat>(rng, 5, 1, 7);
    Mat<Rat> n2 = random_matrix<Rat>(rng, 5, 1, 7);
    VanishingPoint p;
    try {
      p = dependent_rows_point(s, n1, n2);
    } catch (const InvalidInputError&) {
      continue;  // non-generic line
    }
    CHECK(p.residual <= 1e-6);
    CHECK(on_line(p.bstar, n1, n2));
    bs.push_back(p.bstar);
    ++found;
  }
  CHECK(found >= 18);
  // the witnesses vary with the line
  int moved = 0;
  for (std::size_t i = 0; i + 1 < bs.size(); ++i)
    if (frob_norm(bs[i] - bs[i + 1]) > 1e-4) ++moved;
  CHECK(moved >= static_cast<int>(bs.size()) - 2);
}

TEST_CASE("dependent rows point rejects a pair-rank-4 tensor") {
  SymTensor<Rat> s = normalized_pair4(750);
  Rng rng(751);
  Mat<Rat> n1 = random_matrix<Rat>(rng, 5, 1, 7), n2 = random_matrix<Rat>(rng, 5, 1, 7);
  CHECK_THROWS_AS(dependent_rows_point(s, n1, n2), InvalidInputError);
}

TEST_CASE("vanishing locus probe: zero tensor, annihilator family, rank-2 tensor") {
  VanishingProbe pz = vanishing_locus_probe(SymTensor<Rat>(5), 25, 760);
  CHECK(pz.dim_ge_2);
  CHECK(pz.hits >= 20);

  SymTensor<Rat> s6 = random_rank6(4, 761);
  VanishingProbe p6 = vanishing_locus_probe(s6, 25, 762);
  CHECK(p6.dim_ge_2);
  for (const VanishingPoint& p : p6.points) CHECK(p.residual <= 1e-10);

  SymTensor<Rat> s2 = random_low_pair_rank(3, 1, 763);
  VanishingProbe p2 = vanishing_locus_probe(s2, 25, 764);
  CHECK(!p2.dim_ge_2);
  CHECK(p2.hits == 0);
}

TEST_CASE("classification is total on the admissible rank range") {
  std::uint64_t seed = 4000;
  for (int k = 2; k <= 5; ++k)
    for (int target = 2; target <= 2 * k - 2; target += 2)
      for (int it = 0; it < 3; ++it) {
        SymTensor<Rat> s = random_sym_of_rank(k, target, seed++);
        SymClassification cls = classify(s, seed);
        // exactly one of the three cases, each carrying its witness
        int witnesses = (cls.rank_one_bstar.has_value() ? 1 : 0) +
                        (cls.annihilator.has_value() ? 1 : 0) + (cls.locus.has_value() ? 1 : 0);
        CHECK(witnesses == 1);
      }
}

TEST_CASE("random_sym_of_rank reaches every even target in the classified range") {
  std::uint64_t seed = 770;
  for (int k = 2; k <= 5; ++k)
    for (int target = 0; target <= 2 * k - 2; target += 2) {
      SymTensor<Rat> s = random_sym_of_rank(k, target, seed++);
      CHECK(flattening_rank(s) == static_cast<std::size_t>(target));
    }
  CHECK_THROWS_AS(random_sym_of_rank(3, 3, 1), InvalidInputError);
}

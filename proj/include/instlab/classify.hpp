#pragma once

#include <optional>
#include <vector>

#include "instlab/maps.hpp"
#include "instlab/skewpencil.hpp"

namespace ilab {

/// A point of the vanishing locus {(f*, b*) : rho(S, f* (x) b*) = 0},
/// projectively normalized, with the verified residual against the original
/// (un-normalized) tensor.
struct VanishingPoint {
  Mat<CD> fstar;  // 4 x 1
  Mat<CD> bstar;  // k x 1
  double residual = 0.0;
};

/// Dimension-two certificate for the vanishing locus: a verified point
/// family with two independent motion directions (finite-difference
/// parameter Jacobian of rank 2).
struct LocusCertificate {
  std::vector<VanishingPoint> points;
  double jacobian_sigma2 = 0.0;
  bool dim_ge_2 = false;
};

enum class SCaseKind {
  RankOneImage,         // a covector pair with nonzero rank-one contraction image
  AnnihilatingCovector, // rk 6: some f* kills every rho(S, f* (x) b*)
  LargeVanishingLocus,  // rk 8, k = 5: the vanishing locus has dimension >= 2
};

struct SymClassification {
  std::size_t rk = 0;
  int r = 0;  // maximal rank of a pair contraction of the blocks
  SCaseKind kind{};

  // RankOneImage witness
  std::optional<Mat<CD>> rank_one_bstar;  // 4 x k covector-pair grid
  double image_sv1 = 0.0, image_sv2 = 0.0;
  Mat<CD> f0, b0;  // rank-one factors of the image

  // AnnihilatingCovector witness (exact)
  std::optional<Mat<Rat>> annihilator;

  // LargeVanishingLocus certificate
  std::optional<LocusCertificate> locus;
};

struct PairRankResult {
  int r = 0;
  Mat<Rat> basis_change;  // invertible k x k; its first two rows attain r
};

/// The maximal rank of sum c1_i c2_j sigma^{ij} over sampled coefficient
/// pairs (the maximum is attained generically, so random rational samples
/// find it with probability 1), together with a basis change realizing it
/// in the leading block.
PairRankResult max_pair_rank(const SymTensor<Rat>& s, int repetitions = 50, std::uint64_t seed = 1);

/// The trichotomy for 2 <= rk(S) <= 2k-2, 2 <= k <= 5, with a machine-
/// verified witness in every branch.
SymClassification classify(const SymTensor<Rat>& s, std::uint64_t seed = 1);

/// rk 8 normalized machinery (leading block = identity): a vanishing-locus
/// point for a prescribed tail direction (b3*, b4*, b5*), through the common
/// eigenvector of the two commuting symmetric combinations. `near` selects
/// the eigenvector branch closest to a reference point (for derivative
/// estimates).
VanishingPoint commuting_pencil_point(const SymTensor<CD>& s_normalized,
                                      const std::array<CD, 3>& b345,
                                      const VanishingPoint* near = nullptr, double tol = 0.0);

/// rk 8, pair rank 3 machinery: a vanishing-locus point whose b*-component
/// lies on the prescribed line spanned by n1, n2 (generic), found through
/// the exact linear dependence of the two distinguished flattening rows.
VanishingPoint dependent_rows_point(const SymTensor<Rat>& s, const Mat<Rat>& n1,
                                    const Mat<Rat>& n2, double tol = 0.0);

struct VanishingProbe {
  int trials = 0;
  int hits = 0;
  bool dim_ge_2 = false;
  std::vector<VanishingPoint> points;
  double jacobian_sigma2 = 0.0;
};

/// Certify dim >= 2 of the vanishing locus by a verified two-parameter
/// family. Dispatches on the classification; rank-one-image tensors carry
/// no family and report dim_ge_2 = false. The zero tensor vanishes
/// everywhere and certifies trivially.
VanishingProbe vanishing_locus_probe(const SymTensor<Rat>& s, int trials, std::uint64_t seed);

/// Test-instance generators. Each output is rank-verified (bounded retries).
SymTensor<Rat> random_sym_of_rank(int k, int target_rank, std::uint64_t seed);
SymTensor<Rat> random_low_pair_rank(int k, int r, std::uint64_t seed);  // r in {1,2}, rk = 2r
SymTensor<Rat> random_rank6(int k, std::uint64_t seed);                 // r = 3, rk = 6, k in {4,5}
SymTensor<Rat> random_rank8_pair4(std::uint64_t seed);                  // k = 5, r = 4, rk = 8
SymTensor<Rat> random_rank8_pair3(std::uint64_t seed);                  // k = 5, r = 3, rk = 8

}  // namespace ilab

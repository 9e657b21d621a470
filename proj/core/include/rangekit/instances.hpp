#pragma once

#include "rangekit/douglas.hpp"
#include "rangekit/types.hpp"

#include <cstdint>
#include <random>

namespace rangekit {

/// Deterministic per-instance seed stream: splitmix64 of (seed, index).
/// Instances generated from mixed seeds are independent of evaluation
/// order, which keeps batch runs reproducible and trivially parallel.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

/// Standard-normal entries.
Matrix random_gaussian(Index rows, Index cols, std::mt19937_64& rng);

/// Standard-normal matrix truncated to the given rank via SVD.
Matrix random_rank(Index rows, Index cols, Index rank, std::mt19937_64& rng);

/// Haar-ish random orthogonal matrix (QR of a Gaussian with sign fix).
Matrix random_orthogonal(Index n, std::mt19937_64& rng);

/// Single-pair instance for the range-inclusion/factorization equivalences.
struct PairInstance {
  Matrix a, b;
  bool planted_included = false;
};

/// Plant A = B C (included) or add a rank-one bump with a sizable component
/// outside R(B) (not included; requires rank_b < rows so that R(B) is a
/// proper subspace).
PairInstance generate_pair_instance(Index rows, Index cols_a, Index cols_b,
                                    Index rank_b, bool included,
                                    std::mt19937_64& rng);

/// Recipes with known ground truth for the mixed goal.
enum class PlantedKind {
  MixedFeasible,      // A = B C exactly: goal solvable, overall true
  ExactOnlyFeasible,  // exact block majorized, approximate block obstructed
  Infeasible,         // exact-block range inclusion violated
  SurjectiveB,        // stacked B^t injective: check_propp true, goal solvable
};

struct InstanceDims {
  Index h1 = 0, h2 = 0, h4 = 0, h5 = 0;
};

struct MixedInstance {
  MixedProblem problem;
  PlantedKind kind = PlantedKind::MixedFeasible;
  bool expected_overall = false;
  bool expected_majorization = false;
};

/// Generate one planted instance. Dimensions may be adjusted minimally when
/// a recipe needs room (e.g. Infeasible needs dim H4 >= 2); the instance
/// carries the dims actually used.
MixedInstance generate_mixed_instance(const InstanceDims& dims, PlantedKind kind,
                                      std::mt19937_64& rng,
                                      const Tolerances& tol = {});

}  // namespace rangekit

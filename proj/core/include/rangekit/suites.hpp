#pragma once

#include "rangekit/counterexample.hpp"
#include "rangekit/types.hpp"

#include <cstdint>
#include <vector>

namespace rangekit {

/// Randomized cross-validation of the single-pair equivalences over planted
/// instances: range_inclusion, kernel_inclusion, finite majorization
/// constant and douglas_factor success must agree pairwise on every
/// instance, factors must reproduce A on included instances, and the
/// sampled ratio estimator must bracket the constant from below.
struct PairSuiteResult {
  std::uint64_t seed = 0;
  int per_class = 0;
  Index max_dim = 0;
  int instances = 0;
  int pair_disagreements = 0;      // any of the four verdicts differ
  int collapse_disagreements = 0;  // range_inclusion vs kernel_inclusion only
  int planted_mismatches = 0;      // verdict differs from the planted label
  double max_factor_residual = 0.0;    // max ||B C - A|| / ||A|| on included
  double max_constant_gap = 0.0;       // |constant - ||C||| / (1 + constant)
  double min_sampled_fraction = 1.0;   // min sampled_ratio / constant
  double max_sampled_excess = 0.0;     // max (sampled_ratio - constant) / (1 + constant)
  double seconds = 0.0;
};

/// Randomized three-way agreement for the mixed goal: mixed_check.overall,
/// mixed_factorize success (defect within tolerance) and the constructive
/// route (mixed_solve over every basis vector of H1) must coincide on every
/// planted instance. check_propp == true instances must be overall-solvable.
struct MixedSuiteResult {
  std::uint64_t seed = 0;
  int per_class = 0;
  int surjective_instances = 0;
  int instances = 0;
  int three_way_disagreements = 0;
  int planted_mismatches = 0;
  int propp_true_count = 0;
  int propp_violations = 0;           // check_propp true but overall false
  double max_feasible_defect = 0.0;   // factorization defect / scale on feasible
  double max_feasible_residual = 0.0; // solve approx residual / scale on feasible
  double seconds = 0.0;
};

/// Growth-law verification for the diagonal counterexample family.
struct GapSuiteResult {
  std::vector<SweepRow> rows;
  bool pattern_ok = false;            // majorization true, overall false, every n
  double max_closed_form_err = 0.0;   // preimage norm vs closed form, relative
  double max_doubling_err = 0.0;      // ratio vs 2^{3/2}, relative, n >= 64
  double growth_constant_err = 0.0;   // n^{-3/2} norm vs 1/sqrt(3) at largest n
  int propp_violations = 0;
  double seconds = 0.0;
};

PairSuiteResult run_pair_suite(std::uint64_t seed, int per_class = 500,
                               Index max_dim = 40, const Tolerances& tol = {});

MixedSuiteResult run_mixed_suite(std::uint64_t seed, int per_class = 300,
                                 int surjective_instances = 100,
                                 Index max_dim = 12, const Tolerances& tol = {});

GapSuiteResult run_gap_suite(const std::vector<Index>& dims = {8, 16, 32, 64, 128, 256},
                             const Tolerances& tol = {});

}  // namespace rangekit

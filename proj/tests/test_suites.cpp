#include "rangekit/suites.hpp"

#include <doctest.h>

#include <cmath>

using namespace rangekit;

TEST_CASE("pair suite agrees across all verdict routes on planted instances") {
  const PairSuiteResult r = run_pair_suite(11, 60, 20);
  CHECK(r.instances == 120);
  CHECK(r.pair_disagreements == 0);
  CHECK(r.collapse_disagreements == 0);
  CHECK(r.planted_mismatches == 0);
  CHECK(r.max_factor_residual <= 1e-8);
  CHECK(r.max_constant_gap <= 1e-8);
  CHECK(r.min_sampled_fraction >= 0.98);
  CHECK(r.max_sampled_excess <= 1e-8);
}

TEST_CASE("pair suite is deterministic for a fixed seed") {
  const PairSuiteResult a = run_pair_suite(21, 40, 16);
  const PairSuiteResult b = run_pair_suite(21, 40, 16);
  CHECK(a.max_factor_residual == b.max_factor_residual);
  CHECK(a.max_constant_gap == b.max_constant_gap);
  CHECK(a.min_sampled_fraction == b.min_sampled_fraction);
  CHECK(a.max_sampled_excess == b.max_sampled_excess);

  const PairSuiteResult c = run_pair_suite(22, 40, 16);
  CHECK(a.max_factor_residual != c.max_factor_residual);
}

TEST_CASE("mixed suite sees three-way agreement and no propp violations") {
  const MixedSuiteResult r = run_mixed_suite(31, 40, 15, 10);
  CHECK(r.instances == 135);
  CHECK(r.three_way_disagreements == 0);
  CHECK(r.planted_mismatches == 0);
  CHECK(r.propp_violations == 0);
  CHECK(r.propp_true_count >= 15);  // at least every surjective instance
  CHECK(r.max_feasible_defect <= 1e-8);
  CHECK(r.max_feasible_residual <= 1e-8);
}

TEST_CASE("mixed suite is deterministic for a fixed seed") {
  const MixedSuiteResult a = run_mixed_suite(41, 30, 10, 8);
  const MixedSuiteResult b = run_mixed_suite(41, 30, 10, 8);
  CHECK(a.propp_true_count == b.propp_true_count);
  CHECK(a.max_feasible_defect == b.max_feasible_defect);
  CHECK(a.max_feasible_residual == b.max_feasible_residual);
}

TEST_CASE("gap suite verifies the counterexample growth laws") {
  const GapSuiteResult r = run_gap_suite({8, 16, 32});
  REQUIRE(r.rows.size() == 3);
  CHECK(r.pattern_ok);
  CHECK(r.max_closed_form_err <= 1e-8);
  CHECK(r.propp_violations == 0);
  for (const SweepRow& row : r.rows) {
    CHECK(row.majorization_ok);
    CHECK_FALSE(row.overall);
  }
}

TEST_CASE("gap suite doubling ratios kick in at n = 64") {
  const GapSuiteResult r = run_gap_suite({32, 64, 128});
  // only the 64 -> 128 pair is eligible; it must sit within 2% of 2^{3/2}
  CHECK(r.max_doubling_err <= 0.02);
  CHECK(r.growth_constant_err <= 0.02);  // n^{-3/2} scaling at n = 128
}

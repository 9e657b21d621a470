#pragma once

#include "rangekit/douglas.hpp"
#include "rangekit/types.hpp"

#include <vector>

namespace rangekit {

/// Finite section of the diagonal family separating quantitative
/// majorization from solvability of the mixed goal:
///
///   B1 = diag(1/k^2),  x = (1, 1/2, ..., 1/n),  B2 = x x^t,
///   A1 = 0,            A2 = x x^t / ||x||^2  (projector onto span x).
///
/// The exact block is trivially majorized (A1 = 0) for every n, yet the
/// approximate block cannot be matched: the minimal preimage norm of B2 e1
/// under B1 grows like n^{3/2}, so no n-uniform control exists.
struct TruncationFamily {
  Index n = 0;
  Vector x;
  Matrix a1, a2, b1, b2;

  MixedProblem problem(const Tolerances& tol = {}) const;
};

/// One sweep record; the CSV columns of `counterexample sweep` match the
/// first seven fields.
struct SweepRow {
  Index n = 0;
  bool majorization_ok = false;
  double sequential_defect = 0.0;
  bool overall = false;
  double approx_residual_e1 = 0.0;
  double min_preimage_norm_e1 = 0.0;
  bool propp_ok = false;
  double x_norm_sq = 0.0;  // sum 1/k^2, printed for convergence context
};

/// Build the n-dimensional member of the family. Requires n >= 1.
TruncationFamily build_counterexample(Index n);

/// ||f|| where f solves B1 f = B2 h (dense solve; the closed form
/// |<h, x>| * sqrt(sum k^2) is the test oracle, not the implementation).
double minimal_preimage_norm(const TruncationFamily& fam, const Vector& h);

/// Evaluate mixed_check / mixed_solve(e1) / check_propp across dimensions.
/// `dims` must be nonempty and strictly increasing.
std::vector<SweepRow> sweep(const std::vector<Index>& dims, const Tolerances& tol = {});

/// Documentation string for the truncation choice of the approximate block,
/// for prominent display in sweep report headers.
const char* counterexample_truncation_note();

}  // namespace rangekit

#pragma once

#include "rangekit/linop.hpp"
#include "rangekit/types.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace rangekit {

/// Two-block problem data for the mixed exact/approximate goal
///
///   given h1, find h2 with   A1 h1 = B1 h2   and   ||A2 h1 - B2 h2|| <= eps.
///
/// A1: H1 -> H4, B1: H2 -> H4 (exact block);
/// A2: H1 -> H5, B2: H2 -> H5 (approximate block).
struct MixedProblem {
  Matrix a1, a2, b1, b2;
  Tolerances tol = {};

  Index dim_h1() const { return a1.cols(); }
  Index dim_h2() const { return b1.cols(); }
  Index dim_h4() const { return a1.rows(); }
  Index dim_h5() const { return a2.rows(); }

  /// Throws DimensionError unless the four blocks have compatible shapes
  /// and finite entries.
  void validate() const;
};

struct InclusionReport {
  bool included = false;
  double residual = 0.0;
};

struct KernelInclusionReport {
  bool included = false;
  double defect = 0.0;
};

/// Verdict of the solvability test for the mixed goal.
///
/// majorization_ok tests the exact block (N(B1^t) subset of N(A1^t), i.e.
/// R(A1) subset of R(B1) in finite dimension); when it holds the sharp
/// constant ||B1^+ A1|| is reported, otherwise the constant is unbounded
/// (std::nullopt -- never a floating-point infinity).
///
/// The sequential condition on the approximate block reduces, in finite
/// dimension, to the restriction of (A2^t - C1^t B2^t) vanishing on
/// S = (B2^t)^{-1}(R(B1^t)) with C1 = B1^+ A1; `sequential_defect` is the
/// spectral norm of that restriction and `preimage_dim` is dim(S).
///
/// `closure_condition_ok` records the subspace equality
/// (B2^t)^{-1}(R(B1^t)) = (B2^t)^{-1}(closure of R(B1^t)), which is
/// structurally true in finite dimension; it is still computed explicitly,
/// through two independent numerical routes, for transparency.
struct MixedCheckReport {
  bool majorization_ok = false;
  std::optional<double> majorization_constant;  // nullopt == unbounded
  bool sequential_ok = false;
  double sequential_defect = 0.0;
  Index preimage_dim = 0;
  bool closure_condition_ok = false;
  double scale = 1.0;  // residual scale used for the sequential test
  bool overall = false;
};

/// Factor pair realizing A1^t = D1 B1^t and A2^t = (D1 + D2 Pi) B2^t with
/// Pi the orthogonal projector onto N(B1). `d2` is expressed in the
/// coordinates of `kernel_vectors` (an orthonormal basis K of N(B1)), so the
/// operator acting on H2 is d2 * K^t; it is zero-extended off N(B1) by the
/// projector Pi = K K^t.
struct MixedFactorization {
  Matrix d1;              // dim(H1) x dim(H2)
  Matrix d2;              // dim(H1) x dim N(B1), in kernel coordinates
  Matrix pi;              // dim(H2) x dim(H2)
  Matrix kernel_vectors;  // dim(H2) x dim N(B1)
  double defect = 0.0;
  double scale = 1.0;
};

struct MixedSolveReport {
  Vector h2;
  double exact_residual = 0.0;
  double approx_residual = 0.0;
  double h2_norm = 0.0;
  bool epsilon_met = false;
};

struct ProppReport {
  bool ok = false;
  double sigma_min = 0.0;  // smallest singular value of stacked [B1; B2]^t
};

/// mixed_factorize refuses to run when mixed_check fails; the error carries
/// the full report.
class MixedCheckError : public std::runtime_error {
 public:
  MixedCheckError(const std::string& what, MixedCheckReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const MixedCheckReport& report() const noexcept { return report_; }

 private:
  MixedCheckReport report_;
};

/// Is R(A) contained in R(B)? Tested via the projector residual
/// ||(I - P_{R(B)}) A|| <= residual_rel * max(1, ||A||).
InclusionReport range_inclusion(const Matrix& a, const Matrix& b,
                                const Tolerances& tol = {});

/// Is N(B^t) contained in N(A^t)? Tested via the defect ||A^t K|| with K an
/// orthonormal basis of N(B^t). Equivalent to range_inclusion in finite
/// dimension, but computed through an independent decomposition.
KernelInclusionReport kernel_inclusion(const Matrix& a, const Matrix& b,
                                       const Tolerances& tol = {});

/// Smallest constant c with ||A^t z|| <= c ||B^t z|| for all z, which equals
/// ||B^+ A|| when N(B^t) is contained in N(A^t); std::nullopt when no finite
/// constant exists.
std::optional<double> majorization_constant(const Matrix& a, const Matrix& b,
                                            const Tolerances& tol = {});

/// Minimal-norm factor C = B^+ A with A = B C; the columns of C lie in
/// N(B)-perp. Throws InfeasibleError when range inclusion fails.
Matrix douglas_factor(const Matrix& a, const Matrix& b, const Tolerances& tol = {});

/// Factor D = A^t (B^t)^+ with A^t = D B^t, the (possibly non-contractive)
/// companion of douglas_factor for the transposed statement. Throws
/// InfeasibleError when kernel inclusion fails.
Matrix weak_factor(const Matrix& a, const Matrix& b, const Tolerances& tol = {});

/// Certified randomized lower bound for the majorization constant:
/// max of ||A^t z|| / ||B^t z|| over `samples` Gaussian draws plus one
/// candidate from the generalized eigenproblem (A A^t, B B^t) restricted to
/// R(B). Every returned value is a ratio attained by a concrete z, so the
/// result never exceeds the true constant (up to roundoff).
double sampled_majorization_ratio(const Matrix& a, const Matrix& b,
                                  const Tolerances& tol = {}, int samples = 1000,
                                  unsigned long long seed = 0);

/// Solvability test for the mixed goal; see MixedCheckReport.
MixedCheckReport mixed_check(const MixedProblem& p);

/// Factorization certificate for a passing mixed_check; throws
/// MixedCheckError otherwise. D2 is the minimal-norm least-squares solution
/// of D2 (K^t B2^t) = A2^t - D1 B2^t in kernel coordinates.
MixedFactorization mixed_factorize(const MixedProblem& p);

/// Constructive solve for one right-hand side h1: the returned h2 satisfies
/// B1 h2 = A1 h1 (to tolerance) and minimizes ||B2 h2 - A2 h1||, with
/// minimal-norm tie-breaking. epsilon only affects the epsilon_met flag,
/// never the minimizer. Throws InfeasibleError when A1 h1 is not in R(B1).
MixedSolveReport mixed_solve(const MixedProblem& p, const Vector& h1, double epsilon);

/// Same engine with explicit targets replacing A1 h1 and A2 h1; used when
/// the right-hand sides carry affine shifts (e.g. terminal-state targets).
MixedSolveReport solve_mixed_goal(const MixedProblem& p, const Vector& exact_target,
                                  const Vector& approx_target, double epsilon);

/// Assemble a MixedProblem from per-pair blocks by vertical stacking:
/// `exact` pairs stack into (A1, B1), `approx` pairs into (A2, B2).
MixedProblem stack_blocks(const std::vector<std::pair<Matrix, Matrix>>& exact,
                          const std::vector<std::pair<Matrix, Matrix>>& approx,
                          const Tolerances& tol = {});

/// Sufficiency shortcut: stacked [B1; B2]^t injective (all dim(H4)+dim(H5)
/// singular values above the rank cutoff) together with the exact-block
/// kernel inclusion. When it returns true the mixed goal is solvable, so
/// mixed_check must report overall == true.
ProppReport check_propp(const MixedProblem& p);

/// Shared residual scale for the sequential/factorization defects:
/// max(1, ||A2|| + ||C1|| * ||B2||).
double mixed_defect_scale(const MixedProblem& p, const Matrix& c1);

}  // namespace rangekit

#include "rangekit/douglas.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace rangekit {

namespace {

void require_same_rows(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows()) throw DimensionError(what);
}

}  // namespace

void MixedProblem::validate() const {
  tol.validate();
  require_finite(a1, "A1");
  require_finite(a2, "A2");
  require_finite(b1, "B1");
  require_finite(b2, "B2");
  if (a1.cols() != a2.cols()) {
    throw DimensionError("MixedProblem: A1 and A2 must share their domain H1");
  }
  if (b1.cols() != b2.cols()) {
    throw DimensionError("MixedProblem: B1 and B2 must share their domain H2");
  }
  if (a1.rows() != b1.rows()) {
    throw DimensionError("MixedProblem: A1 and B1 must share their codomain H4");
  }
  if (a2.rows() != b2.rows()) {
    throw DimensionError("MixedProblem: A2 and B2 must share their codomain H5");
  }
  if (a1.rows() == 0 || a2.rows() == 0 || a1.cols() == 0 || b1.cols() == 0) {
    throw DimensionError("MixedProblem: all spaces must have positive dimension");
  }
}

InclusionReport range_inclusion(const Matrix& a, const Matrix& b, const Tolerances& tol) {
  tol.validate();
  require_finite(a, "A");
  require_finite(b, "B");
  require_same_rows(a, b, "range_inclusion: A and B must share their codomain");
  const SvdDecomposition bsvd(b, tol);
  const Matrix range = bsvd.range_basis();
  Matrix residual_mat = a;
  if (range.cols() > 0) residual_mat -= range * (range.transpose() * a);
  InclusionReport out;
  out.residual = spectral_norm(residual_mat);
  out.included = out.residual <= tol.residual_rel * std::max(1.0, spectral_norm(a));
  return out;
}

KernelInclusionReport kernel_inclusion(const Matrix& a, const Matrix& b,
                                       const Tolerances& tol) {
  tol.validate();
  require_finite(a, "A");
  require_finite(b, "B");
  require_same_rows(a, b, "kernel_inclusion: A and B must share their codomain");
  // Deliberately an independent decomposition (of B^t, not B): agreement with
  // range_inclusion is a cross-check of the finite-dimensional identity, not
  // a shared code path.
  const SvdDecomposition btsvd(b.transpose(), tol);
  const Matrix kernel = btsvd.kernel_basis();
  KernelInclusionReport out;
  out.defect = kernel.cols() > 0 ? spectral_norm(a.transpose() * kernel) : 0.0;
  out.included = out.defect <= tol.residual_rel * std::max(1.0, spectral_norm(a));
  return out;
}

std::optional<double> majorization_constant(const Matrix& a, const Matrix& b,
                                            const Tolerances& tol) {
  const KernelInclusionReport ki = kernel_inclusion(a, b, tol);
  if (!ki.included) return std::nullopt;
  const SvdDecomposition bsvd(b, tol);
  return spectral_norm(bsvd.apply_pinv(a));
}

Matrix douglas_factor(const Matrix& a, const Matrix& b, const Tolerances& tol) {
  const InclusionReport ri = range_inclusion(a, b, tol);
  if (!ri.included) {
    throw InfeasibleError("douglas_factor: R(A) is not contained in R(B)", ri.residual);
  }
  const SvdDecomposition bsvd(b, tol);
  const Matrix c = bsvd.apply_pinv(a);
  const double residual = spectral_norm(b * c - a);
  if (residual > tol.residual_rel * std::max(1.0, spectral_norm(a))) {
    throw NumericalError("douglas_factor: factor residual exceeded tolerance after solve");
  }
  return c;
}

Matrix weak_factor(const Matrix& a, const Matrix& b, const Tolerances& tol) {
  const KernelInclusionReport ki = kernel_inclusion(a, b, tol);
  if (!ki.included) {
    throw InfeasibleError("weak_factor: N(B^t) is not contained in N(A^t)", ki.defect);
  }
  const SvdDecomposition btsvd(b.transpose(), tol);
  const Matrix d = a.transpose() * btsvd.pinv();
  const double residual = spectral_norm(d * b.transpose() - a.transpose());
  if (residual > tol.residual_rel * std::max(1.0, spectral_norm(a))) {
    throw NumericalError("weak_factor: factor residual exceeded tolerance after solve");
  }
  return d;
}

double sampled_majorization_ratio(const Matrix& a, const Matrix& b,
                                  const Tolerances& tol, int samples,
                                  unsigned long long seed) {
  tol.validate();
  require_finite(a, "A");
  require_finite(b, "B");
  require_same_rows(a, b, "sampled_majorization_ratio: A and B must share their codomain");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double bnorm = spectral_norm(b);
  double best = 0.0;
  Vector z(a.rows());
  for (int i = 0; i < samples; ++i) {
    for (Index j = 0; j < z.size(); ++j) z(j) = normal(rng);
    const double den = (b.transpose() * z).norm();
    // Skip directions that are numerically in N(B^t): the ratio there is
    // either excluded (denominator zero) or pure roundoff noise.
    if (den <= 1e-8 * bnorm * z.norm() || den == 0.0) continue;
    const double num = (a.transpose() * z).norm();
    best = std::max(best, num / den);
  }
  // Polish with the top generalized eigenpair of (Q^t A A^t Q, Q^t B B^t Q)
  // restricted to R(B), where the right-hand matrix is positive definite.
  // The candidate is evaluated as an honest ratio, so the result remains a
  // certified lower bound for the supremum.
  const SvdDecomposition bsvd(b, tol);
  const Matrix q = bsvd.range_basis();
  if (q.cols() > 0) {
    const Matrix at_q = a.transpose() * q;
    const Matrix bt_q = b.transpose() * q;
    const Matrix m = at_q.transpose() * at_q;
    const Matrix g = bt_q.transpose() * bt_q;
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(m, g);
    if (es.info() == Eigen::Success) {
      const Vector zstar = q * es.eigenvectors().col(q.cols() - 1);
      const double den = (b.transpose() * zstar).norm();
      if (den > 0.0) {
        best = std::max(best, (a.transpose() * zstar).norm() / den);
      }
    }
  }
  return best;
}

double mixed_defect_scale(const MixedProblem& p, const Matrix& c1) {
  return std::max(1.0, spectral_norm(p.a2) + spectral_norm(c1) * spectral_norm(p.b2));
}

MixedCheckReport mixed_check(const MixedProblem& p) {
  p.validate();
  const Tolerances& tol = p.tol;
  MixedCheckReport out;

  const KernelInclusionReport ki = kernel_inclusion(p.a1, p.b1, tol);
  out.majorization_ok = ki.included;
  const SvdDecomposition b1svd(p.b1, tol);
  const Matrix c1 = b1svd.apply_pinv(p.a1);
  if (out.majorization_ok) out.majorization_constant = spectral_norm(c1);

  // S = (B2^t)^{-1}(R(B1^t)): the h5 whose B2^t image is reachable as a
  // limit of B1^t images; in finite dimension R(B1^t) is already closed.
  const SubspaceBasis row_space =
      SubspaceBasis{p.dim_h2(), b1svd.corange_basis(), tol.rank_rel};
  const SubspaceBasis s = preimage_subspace(p.b2.transpose(), row_space, tol);
  out.preimage_dim = s.dim();

  const Matrix defect_op = p.a2.transpose() - c1.transpose() * p.b2.transpose();
  out.sequential_defect = s.dim() > 0 ? spectral_norm(defect_op * s.vectors) : 0.0;
  out.scale = mixed_defect_scale(p, c1);
  out.sequential_ok = out.sequential_defect <= tol.residual_rel * out.scale;

  // Closure route: R(B1^t) = N(B1)-perp, computed from the kernel side.
  // Structurally the same subspace, numerically an independent path.
  const SubspaceBasis closure_row_space =
      complement_basis(SubspaceBasis{p.dim_h2(), b1svd.kernel_basis(), tol.rank_rel}, tol);
  const SubspaceBasis s_closure = preimage_subspace(p.b2.transpose(), closure_row_space, tol);
  out.closure_condition_ok = subspaces_equal(s, s_closure, tol.residual_rel);

  out.overall = out.majorization_ok && out.sequential_ok;
  return out;
}

MixedFactorization mixed_factorize(const MixedProblem& p) {
  const MixedCheckReport check = mixed_check(p);
  if (!check.overall) {
    throw MixedCheckError("mixed_factorize: mixed_check rejected the problem", check);
  }
  const Tolerances& tol = p.tol;
  const SvdDecomposition b1svd(p.b1, tol);
  const Matrix c1 = b1svd.apply_pinv(p.a1);

  MixedFactorization out;
  out.d1 = c1.transpose();
  out.kernel_vectors = b1svd.kernel_basis();
  const Index k = out.kernel_vectors.cols();
  out.pi = k > 0 ? Matrix(out.kernel_vectors * out.kernel_vectors.transpose())
                 : Matrix::Zero(p.dim_h2(), p.dim_h2());
  const Matrix residual_op = p.a2.transpose() - out.d1 * p.b2.transpose();
  if (k > 0) {
    // Minimal-norm least-squares solution of D2 X = R with X = K^t B2^t,
    // i.e. D2 = R X^+ via the transposed normal route. The rank floor keeps
    // a roundoff-level restriction of B2 from acting as an invertible map.
    const Matrix x = out.kernel_vectors.transpose() * p.b2.transpose();
    const SvdDecomposition xt(x.transpose(), tol, tol.rank_rel * spectral_norm(p.b2));
    out.d2 = xt.apply_pinv(Matrix(residual_op.transpose())).transpose();
    out.defect = spectral_norm(out.d2 * x - residual_op);
  } else {
    out.d2 = Matrix::Zero(p.dim_h1(), 0);
    out.defect = spectral_norm(residual_op);
  }
  out.scale = check.scale;
  return out;
}

MixedSolveReport solve_mixed_goal(const MixedProblem& p, const Vector& exact_target,
                                  const Vector& approx_target, double epsilon) {
  p.validate();
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("solve_mixed_goal: epsilon must be a finite nonnegative value");
  }
  EclsSolution ecls;
  try {
    ecls = solve_constrained_ls(p.b1, exact_target, p.b2, approx_target, p.tol);
  } catch (const InfeasibleError& e) {
    throw InfeasibleError("mixed goal: exact target is not attainable by the B1 block",
                          e.residual());
  }
  MixedSolveReport out;
  out.h2 = ecls.solution;
  out.exact_residual = ecls.constraint_residual;
  out.approx_residual = ecls.objective_residual;
  out.h2_norm = ecls.solution.norm();
  out.epsilon_met =
      out.approx_residual <= epsilon &&
      out.exact_residual <= p.tol.residual_rel * std::max(1.0, exact_target.norm());
  return out;
}

MixedSolveReport mixed_solve(const MixedProblem& p, const Vector& h1, double epsilon) {
  p.validate();
  if (h1.size() != p.dim_h1()) {
    throw DimensionError("mixed_solve: h1 length does not match dim(H1)");
  }
  require_finite(h1, "h1");
  return solve_mixed_goal(p, p.a1 * h1, p.a2 * h1, epsilon);
}

MixedProblem stack_blocks(const std::vector<std::pair<Matrix, Matrix>>& exact,
                          const std::vector<std::pair<Matrix, Matrix>>& approx,
                          const Tolerances& tol) {
  if (exact.empty() || approx.empty()) {
    throw DimensionError("stack_blocks: need at least one exact and one approximate pair");
  }
  auto stack = [](const std::vector<std::pair<Matrix, Matrix>>& pairs, const char* what) {
    Index rows = 0;
    const Index cols_a = pairs.front().first.cols();
    const Index cols_b = pairs.front().second.cols();
    for (const auto& [ai, bi] : pairs) {
      if (ai.rows() != bi.rows()) {
        throw DimensionError(std::string(what) + ": paired blocks must share their codomain");
      }
      if (ai.cols() != cols_a || bi.cols() != cols_b) {
        throw DimensionError(std::string(what) + ": all blocks must share their domains");
      }
      rows += ai.rows();
    }
    Matrix a(rows, cols_a), b(rows, cols_b);
    Index at = 0;
    for (const auto& [ai, bi] : pairs) {
      a.middleRows(at, ai.rows()) = ai;
      b.middleRows(at, bi.rows()) = bi;
      at += ai.rows();
    }
    return std::make_pair(std::move(a), std::move(b));
  };
  auto [a1, b1] = stack(exact, "stack_blocks(exact)");
  auto [a2, b2] = stack(approx, "stack_blocks(approx)");
  if (exact.front().first.cols() != approx.front().first.cols() ||
      exact.front().second.cols() != approx.front().second.cols()) {
    throw DimensionError("stack_blocks: exact and approximate blocks must share H1 and H2");
  }
  MixedProblem p{std::move(a1), std::move(a2), std::move(b1), std::move(b2), tol};
  p.validate();
  return p;
}

ProppReport check_propp(const MixedProblem& p) {
  p.validate();
  ProppReport out;
  Matrix stacked(p.dim_h4() + p.dim_h5(), p.dim_h2());
  stacked.topRows(p.dim_h4()) = p.b1;
  stacked.bottomRows(p.dim_h5()) = p.b2;
  const Matrix bt = stacked.transpose();  // H4 x H5 -> H2
  if (bt.rows() < bt.cols()) {
    // Fewer rows than columns: B^t cannot be injective; report sigma_min = 0.
    out.sigma_min = 0.0;
    out.ok = false;
    return out;
  }
  Eigen::BDCSVD<Matrix> svd(bt);
  const Vector& sigma = svd.singularValues();
  out.sigma_min = sigma(sigma.size() - 1);
  const bool injective = out.sigma_min > p.tol.rank_rel * sigma(0);
  out.ok = injective && kernel_inclusion(p.a1, p.b1, p.tol).included;
  return out;
}

}  // namespace rangekit

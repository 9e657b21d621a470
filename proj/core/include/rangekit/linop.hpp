#pragma once

#include "rangekit/types.hpp"

namespace rangekit {

/// Orthonormal spanning set of a subspace of R^ambient_dim.
/// `vectors` has one orthonormal column per basis vector; zero columns
/// represent the trivial subspace.
struct SubspaceBasis {
  Index ambient_dim = 0;
  Matrix vectors;  // ambient_dim x dim(), orthonormal columns
  double tol_used = 0.0;

  Index dim() const { return vectors.cols(); }

  /// Throws unless the columns sit in R^ambient_dim and are orthonormal
  /// to within 1e-12.
  void validate() const;
};

/// Result of an equality-constrained least-squares solve.
struct EclsSolution {
  Vector solution;
  double constraint_residual = 0.0;
  double objective_residual = 0.0;
  Index nullspace_dim = 0;
};

/// Rank-revealing SVD bundle: the workhorse behind every subspace query
/// and pseudo-inverse application in this library. Factor once, query often.
///
/// Singular values count towards the rank when they exceed both the relative
/// cutoff rank_rel * sigma_max and the absolute `sigma_floor`. The floor
/// matters when `t` is a residual or a restriction of some parent operator:
/// such a matrix can consist of pure roundoff, and judging its rank against
/// its own largest singular value would promote noise to full rank. Callers
/// working with derived matrices pass rank_rel * ||parent|| as the floor.
class SvdDecomposition {
 public:
  explicit SvdDecomposition(const Matrix& t, const Tolerances& tol = {},
                            double sigma_floor = 0.0);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index rank() const { return rank_; }
  const Vector& singular_values() const { return sigma_; }

  /// Orthonormal basis of the range (columns of U for kept singular values).
  Matrix range_basis() const;
  /// Orthonormal basis of the kernel (trailing columns of V).
  Matrix kernel_basis() const;
  /// Orthonormal basis of the row space R(T^t) (leading columns of V).
  Matrix corange_basis() const;
  /// Orthonormal basis of R(T)-perp = N(T^t) (trailing columns of U).
  Matrix cokernel_basis() const;

  /// Moore-Penrose pseudo-inverse as an explicit matrix.
  Matrix pinv() const;
  /// Minimal-norm least-squares application T^+ b without forming T^+.
  Vector apply_pinv(const Vector& b) const;
  Matrix apply_pinv(const Matrix& b) const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  Index rank_ = 0;
  Vector sigma_;
  Matrix u_;  // rows x rows
  Matrix v_;  // cols x cols
};

/// Number of singular values above the relative cutoff.
Index svd_rank(const Matrix& t, const Tolerances& tol = {});

/// Orthonormal basis of R(T).
SubspaceBasis range_basis(const Matrix& t, const Tolerances& tol = {});

/// Orthonormal basis of N(T).
SubspaceBasis kernel_basis(const Matrix& t, const Tolerances& tol = {});

/// Orthogonal projector V V^t onto the spanned subspace (zero matrix for the
/// trivial subspace).
Matrix projector(const SubspaceBasis& s);

/// Moore-Penrose pseudo-inverse.
Matrix pinv(const Matrix& t, const Tolerances& tol = {});

/// Orthogonal complement of span(s) inside its ambient space.
SubspaceBasis complement_basis(const SubspaceBasis& s, const Tolerances& tol = {});

/// Basis of the preimage T^{-1}(span(s)) = { v : T v in span(s) }.
/// Always contains N(T).
SubspaceBasis preimage_subspace(const Matrix& t, const SubspaceBasis& s,
                                const Tolerances& tol = {});

/// True when the two bases span the same subspace: equal dimension and
/// projector difference below `tol` in spectral norm.
bool subspaces_equal(const SubspaceBasis& a, const SubspaceBasis& b, double tol);

/// Equality-constrained least squares by the nullspace method:
///
///   minimize ||Bo h - bo||  subject to  Bc h = bc,
///
/// solved as h = Bc^+ bc + K w with K an orthonormal kernel basis of Bc and
/// w the minimal-norm least-squares solution of (Bo K) w = bo - Bo Bc^+ bc.
/// Since Bc^+ bc is orthogonal to N(Bc), this tie-breaks among objective
/// minimizers by minimal Euclidean norm of h. One pass of iterative
/// refinement on the constraint and objective residuals is applied.
///
/// Throws InfeasibleError when bc is not attainable:
///   ||Bc h - bc|| > residual_rel * max(1, ||bc||).
EclsSolution solve_constrained_ls(const Matrix& bc_op, const Vector& bc,
                                  const Matrix& bo_op, const Vector& bo,
                                  const Tolerances& tol = {});

}  // namespace rangekit

#include "rangekit/linop.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace rangekit {

void Tolerances::validate() const {
  if (!(rank_rel > 0.0 && rank_rel < 1.0)) {
    throw std::invalid_argument("Tolerances: rank_rel must lie in (0, 1)");
  }
  if (!(residual_rel > 0.0 && residual_rel < 1.0)) {
    throw std::invalid_argument("Tolerances: residual_rel must lie in (0, 1)");
  }
}

void require_finite(const Matrix& t, const char* name) {
  if (!t.allFinite()) {
    std::ostringstream msg;
    msg << name << ": entries must be finite (found NaN or Inf)";
    throw DimensionError(msg.str());
  }
}

double spectral_norm(const Matrix& t) {
  if (t.rows() == 0 || t.cols() == 0) return 0.0;
  if (t.rows() == 1 && t.cols() == 1) return std::abs(t(0, 0));
  Eigen::JacobiSVD<Matrix> svd(t);
  return svd.singularValues()(0);
}

void SubspaceBasis::validate() const {
  if (vectors.rows() != ambient_dim) {
    throw DimensionError("SubspaceBasis: vectors do not match the ambient dimension");
  }
  require_finite(vectors, "SubspaceBasis");
  if (vectors.cols() == 0) return;
  const Matrix gram = vectors.transpose() * vectors;
  const double defect =
      (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (defect > 1e-12) {
    throw DimensionError("SubspaceBasis: columns are not orthonormal");
  }
}

SvdDecomposition::SvdDecomposition(const Matrix& t, const Tolerances& tol,
                                   double sigma_floor) {
  tol.validate();
  require_finite(t, "SvdDecomposition");
  if (!(sigma_floor >= 0.0) || !std::isfinite(sigma_floor)) {
    throw std::invalid_argument("SvdDecomposition: sigma_floor must be finite and nonnegative");
  }
  rows_ = t.rows();
  cols_ = t.cols();
  if (rows_ == 0 || cols_ == 0) {
    // Degenerate shapes appear internally (e.g. empty kernels); represent
    // them with identity factors and rank zero so all queries stay total.
    sigma_.resize(0);
    u_ = Matrix::Identity(rows_, rows_);
    v_ = Matrix::Identity(cols_, cols_);
    rank_ = 0;
    return;
  }
  // The divide-and-conquer kernel wins on anything beyond toy sizes; it
  // falls back to Jacobi internally below its crossover block size.
  Eigen::BDCSVD<Matrix> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) {
    throw NumericalError("SVD failed to converge");
  }
  sigma_ = svd.singularValues();
  u_ = svd.matrixU();
  v_ = svd.matrixV();
  const double cutoff =
      std::max(sigma_.size() > 0 ? tol.rank_rel * sigma_(0) : 0.0, sigma_floor);
  rank_ = 0;
  for (Index i = 0; i < sigma_.size(); ++i) {
    if (sigma_(i) > cutoff && sigma_(i) > 0.0) ++rank_;
  }
}

Matrix SvdDecomposition::range_basis() const { return u_.leftCols(rank_); }

Matrix SvdDecomposition::kernel_basis() const { return v_.rightCols(cols_ - rank_); }

Matrix SvdDecomposition::corange_basis() const { return v_.leftCols(rank_); }

Matrix SvdDecomposition::cokernel_basis() const { return u_.rightCols(rows_ - rank_); }

Matrix SvdDecomposition::pinv() const {
  if (rank_ == 0) return Matrix::Zero(cols_, rows_);
  return v_.leftCols(rank_) * sigma_.head(rank_).cwiseInverse().asDiagonal() *
         u_.leftCols(rank_).transpose();
}

Vector SvdDecomposition::apply_pinv(const Vector& b) const {
  if (b.size() != rows_) {
    throw DimensionError("apply_pinv: right-hand side length does not match");
  }
  if (rank_ == 0) return Vector::Zero(cols_);
  return v_.leftCols(rank_) *
         (sigma_.head(rank_).cwiseInverse().asDiagonal() *
          (u_.leftCols(rank_).transpose() * b));
}

Matrix SvdDecomposition::apply_pinv(const Matrix& b) const {
  if (b.rows() != rows_) {
    throw DimensionError("apply_pinv: right-hand side rows do not match");
  }
  if (rank_ == 0) return Matrix::Zero(cols_, b.cols());
  return v_.leftCols(rank_) *
         (sigma_.head(rank_).cwiseInverse().asDiagonal() *
          (u_.leftCols(rank_).transpose() * b));
}

Index svd_rank(const Matrix& t, const Tolerances& tol) {
  return SvdDecomposition(t, tol).rank();
}

SubspaceBasis range_basis(const Matrix& t, const Tolerances& tol) {
  SvdDecomposition svd(t, tol);
  return SubspaceBasis{t.rows(), svd.range_basis(), tol.rank_rel};
}

SubspaceBasis kernel_basis(const Matrix& t, const Tolerances& tol) {
  SvdDecomposition svd(t, tol);
  return SubspaceBasis{t.cols(), svd.kernel_basis(), tol.rank_rel};
}

Matrix projector(const SubspaceBasis& s) {
  s.validate();
  if (s.dim() == 0) return Matrix::Zero(s.ambient_dim, s.ambient_dim);
  return s.vectors * s.vectors.transpose();
}

Matrix pinv(const Matrix& t, const Tolerances& tol) {
  return SvdDecomposition(t, tol).pinv();
}

SubspaceBasis complement_basis(const SubspaceBasis& s, const Tolerances& tol) {
  s.validate();
  if (s.dim() == 0) {
    return SubspaceBasis{s.ambient_dim, Matrix::Identity(s.ambient_dim, s.ambient_dim),
                         tol.rank_rel};
  }
  // span(s)-perp = N(V^t) for the orthonormal V spanning s.
  return kernel_basis(s.vectors.transpose(), tol);
}

SubspaceBasis preimage_subspace(const Matrix& t, const SubspaceBasis& s,
                                const Tolerances& tol) {
  s.validate();
  if (t.rows() != s.ambient_dim) {
    throw DimensionError("preimage_subspace: operator range does not match the ambient space");
  }
  // { v : T v in span(s) } = N((I - P_s) T), formed without the projector.
  // The kernel of the residual is judged against the scale of T itself: when
  // T maps entirely into span(s), the residual is pure roundoff and its own
  // largest singular value would be a meaningless rank reference.
  Matrix residual = t;
  if (s.dim() > 0) residual -= s.vectors * (s.vectors.transpose() * t);
  const SvdDecomposition svd(residual, tol, tol.rank_rel * spectral_norm(t));
  return SubspaceBasis{t.cols(), svd.kernel_basis(), tol.rank_rel};
}

bool subspaces_equal(const SubspaceBasis& a, const SubspaceBasis& b, double tol) {
  a.validate();
  b.validate();
  if (a.ambient_dim != b.ambient_dim) {
    throw DimensionError("subspaces_equal: ambient dimensions differ");
  }
  if (a.dim() != b.dim()) return false;
  if (a.dim() == 0) return true;
  const Matrix pa = a.vectors * a.vectors.transpose();
  const Matrix pb = b.vectors * b.vectors.transpose();
  return spectral_norm(pa - pb) <= tol;
}

EclsSolution solve_constrained_ls(const Matrix& bc_op, const Vector& bc,
                                  const Matrix& bo_op, const Vector& bo,
                                  const Tolerances& tol) {
  tol.validate();
  if (bc_op.cols() != bo_op.cols()) {
    throw DimensionError("solve_constrained_ls: constraint and objective column counts differ");
  }
  if (bc.size() != bc_op.rows() || bo.size() != bo_op.rows()) {
    throw DimensionError("solve_constrained_ls: right-hand side lengths do not match");
  }
  require_finite(bc, "constraint target");
  require_finite(bo, "objective target");

  const SvdDecomposition constraint(bc_op, tol);
  const Matrix kernel = constraint.kernel_basis();
  const Index k = kernel.cols();

  // Reduced objective over the constraint kernel, factored once. The rank
  // floor is tied to ||Bo||: a restriction of Bo that is pure roundoff must
  // act as zero, not as an ill-conditioned invertible map.
  std::unique_ptr<SvdDecomposition> reduced;
  if (k > 0) {
    reduced = std::make_unique<SvdDecomposition>(Matrix(bo_op * kernel), tol,
                                                 tol.rank_rel * spectral_norm(bo_op));
  }

  Vector h = constraint.apply_pinv(bc);
  if (reduced) h += kernel * reduced->apply_pinv(Vector(bo - bo_op * h));

  // Iterative refinement with the cached factorizations. The constraint
  // correction stays in R(Bc^t) and the kernel coordinates stay the
  // minimal-norm reduced solution, so minimal-norm tie-breaking survives.
  for (int pass = 0; pass < 2; ++pass) {
    h += constraint.apply_pinv(Vector(bc - bc_op * h));
    if (reduced) h += kernel * reduced->apply_pinv(Vector(bo - bo_op * h));
  }

  EclsSolution out;
  out.solution = h;
  out.constraint_residual = (bc_op * h - bc).norm();
  out.objective_residual = (bo_op * h - bo).norm();
  out.nullspace_dim = k;
  const double feasibility_scale = std::max(1.0, bc.norm());
  if (out.constraint_residual > tol.residual_rel * feasibility_scale) {
    throw InfeasibleError("solve_constrained_ls: exact constraint is infeasible",
                          out.constraint_residual);
  }
  return out;
}

}  // namespace rangekit

#include "rangekit/counterexample.hpp"

#include <Eigen/LU>

#include <stdexcept>

namespace rangekit {

const char* counterexample_truncation_note() {
  return "Approximate block A2 is the orthogonal projector onto span(x) with "
         "x = (1, 1/2, ..., 1/n); the defect of the goal is carried entirely "
         "by the direction x, which keeps the finite sections of the family "
         "uniformly comparable across n.";
}

MixedProblem TruncationFamily::problem(const Tolerances& tol) const {
  MixedProblem p{a1, a2, b1, b2, tol};
  p.validate();
  return p;
}

TruncationFamily build_counterexample(Index n) {
  if (n < 1) throw DimensionError("build_counterexample: n must be at least 1");
  TruncationFamily fam;
  fam.n = n;
  fam.x = Vector(n);
  for (Index k = 0; k < n; ++k) fam.x(k) = 1.0 / static_cast<double>(k + 1);
  fam.b1 = Matrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k + 1);
    fam.b1(k, k) = 1.0 / (kk * kk);
  }
  fam.b2 = fam.x * fam.x.transpose();
  fam.a1 = Matrix::Zero(n, n);
  fam.a2 = fam.b2 / fam.x.squaredNorm();
  return fam;
}

double minimal_preimage_norm(const TruncationFamily& fam, const Vector& h) {
  if (h.size() != fam.n) {
    throw DimensionError("minimal_preimage_norm: h length does not match n");
  }
  require_finite(h, "h");
  // B1 is invertible for every finite section, so the minimal preimage is
  // the unique dense solve.
  const Vector rhs = fam.b2 * h;
  const Vector f = fam.b1.partialPivLu().solve(rhs);
  return f.norm();
}

std::vector<SweepRow> sweep(const std::vector<Index>& dims, const Tolerances& tol) {
  if (dims.empty()) throw std::invalid_argument("sweep: dims must be nonempty");
  for (std::size_t i = 1; i < dims.size(); ++i) {
    if (dims[i] <= dims[i - 1]) {
      throw std::invalid_argument("sweep: dims must be strictly increasing");
    }
  }
  std::vector<SweepRow> rows;
  rows.reserve(dims.size());
  for (Index n : dims) {
    const TruncationFamily fam = build_counterexample(n);
    const MixedProblem p = fam.problem(tol);
    const MixedCheckReport check = mixed_check(p);
    const Vector e1 = Vector::Unit(n, 0);
    // epsilon only gates the met-flag; the reported residual is the true
    // infimum and does not depend on it.
    const MixedSolveReport solve = mixed_solve(p, e1, 1.0);
    const ProppReport propp = check_propp(p);
    SweepRow row;
    row.n = n;
    row.majorization_ok = check.majorization_ok;
    row.sequential_defect = check.sequential_defect;
    row.overall = check.overall;
    row.approx_residual_e1 = solve.approx_residual;
    row.min_preimage_norm_e1 = minimal_preimage_norm(fam, e1);
    row.propp_ok = propp.ok;
    row.x_norm_sq = fam.x.squaredNorm();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rangekit

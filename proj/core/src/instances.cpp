#include "rangekit/instances.hpp"

#include <algorithm>
#include <random>

namespace rangekit {

namespace {

Vector random_unit(Index dim, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vector g = random_gaussian(dim, 1, rng);
    const double n = g.norm();
    if (n > 1e-6) return g / n;
  }
  throw NumericalError("random_unit: degenerate Gaussian draws");
}

// Unit vector orthogonal to the columns of an orthonormal basis; used to
// plant a component robustly outside a given range.
Vector unit_outside(const Matrix& onb, Index dim, std::mt19937_64& rng) {
  if (onb.cols() >= dim) {
    throw NumericalError("unit_outside: subspace already fills the space");
  }
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vector g = random_gaussian(dim, 1, rng);
    if (onb.cols() > 0) g -= onb * (onb.transpose() * g);
    const double n = g.norm();
    if (n > 1e-6) return g / n;
  }
  throw NumericalError("unit_outside: failed to sample an outside direction");
}

double bump_scale(const Matrix& base) {
  return 0.5 * std::max(1.0, spectral_norm(base));
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer on the (seed, index) stream position.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Matrix random_gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  if (rows < 0 || cols < 0) {
    throw DimensionError("random_gaussian: dimensions must be nonnegative");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

Matrix random_rank(Index rows, Index cols, Index rank, std::mt19937_64& rng) {
  const Index full = std::min(rows, cols);
  if (rank < 1 || rank > full) {
    throw DimensionError("random_rank: rank must lie in [1, min(rows, cols)]");
  }
  Matrix g = random_gaussian(rows, cols, rng);
  if (rank == full) return g;
  Eigen::BDCSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector sv = svd.singularValues();
  for (Index i = rank; i < sv.size(); ++i) sv(i) = 0.0;
  return svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
}

Matrix random_orthogonal(Index n, std::mt19937_64& rng) {
  if (n < 1) throw DimensionError("random_orthogonal: n must be positive");
  const Matrix g = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column signs so the distribution does not depend on the QR convention.
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

PairInstance generate_pair_instance(Index rows, Index cols_a, Index cols_b,
                                    Index rank_b, bool included,
                                    std::mt19937_64& rng) {
  if (rows < 1 || cols_a < 1 || cols_b < 1) {
    throw DimensionError("generate_pair_instance: dimensions must be positive");
  }
  rank_b = std::clamp<Index>(rank_b, 1, std::min(rows, cols_b));
  if (!included && rank_b >= rows) {
    if (rows < 2) {
      throw DimensionError(
          "generate_pair_instance: a non-included pair needs rows >= 2");
    }
    rank_b = rows - 1;  // leave room outside R(B)
  }

  PairInstance inst;
  inst.planted_included = included;
  inst.b = random_rank(rows, cols_b, rank_b, rng);
  const Matrix c = random_gaussian(cols_b, cols_a, rng);
  inst.a = inst.b * c;
  if (!included) {
    const Vector u = unit_outside(range_basis(inst.b).vectors, rows, rng);
    const Vector v = random_unit(cols_a, rng);
    inst.a += bump_scale(inst.a) * u * v.transpose();
  }
  return inst;
}

MixedInstance generate_mixed_instance(const InstanceDims& dims, PlantedKind kind,
                                      std::mt19937_64& rng,
                                      const Tolerances& tol) {
  tol.validate();
  InstanceDims d = dims;
  if (d.h1 < 1 || d.h2 < 1 || d.h4 < 1 || d.h5 < 1) {
    throw DimensionError("generate_mixed_instance: dimensions must be positive");
  }

  MixedInstance inst;
  inst.kind = kind;
  MixedProblem& p = inst.problem;
  p.tol = tol;

  switch (kind) {
    case PlantedKind::MixedFeasible: {
      const Index r1 =
          1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(
                                             std::min(d.h4, d.h2)));
      p.b1 = random_rank(d.h4, d.h2, r1, rng);
      p.b2 = random_gaussian(d.h5, d.h2, rng);
      const Matrix c = random_gaussian(d.h2, d.h1, rng);
      p.a1 = p.b1 * c;
      p.a2 = p.b2 * c;
      inst.expected_overall = true;
      inst.expected_majorization = true;
      break;
    }
    case PlantedKind::ExactOnlyFeasible: {
      // The obstruction lives on S = (B2^t)^{-1}(R(B1^t)); a unit vector f
      // orthogonal to B2(N(B1)) lies in S, so bumping A2 by s f w^t makes the
      // sequential defect exactly s while the exact block stays majorized.
      const Index kernel_dim = d.h2 - std::min(d.h4, d.h2);
      if (d.h5 <= kernel_dim) d.h5 = kernel_dim + 1;  // make S nontrivial
      p.b1 = random_rank(d.h4, d.h2, std::min(d.h4, d.h2), rng);
      p.b2 = random_gaussian(d.h5, d.h2, rng);
      const Matrix c = random_gaussian(d.h2, d.h1, rng);
      p.a1 = p.b1 * c;
      const Matrix k = kernel_basis(p.b1, tol).vectors;
      const Matrix v_basis = k.cols() > 0
                                 ? range_basis(Matrix(p.b2 * k), tol).vectors
                                 : Matrix(d.h5, 0);
      const Vector f = unit_outside(v_basis, d.h5, rng);
      const Vector w = random_unit(d.h1, rng);
      const Matrix base = p.b2 * c;
      p.a2 = base + bump_scale(base) * f * w.transpose();
      inst.expected_overall = false;
      inst.expected_majorization = true;
      break;
    }
    case PlantedKind::Infeasible: {
      if (d.h4 < 2) d.h4 = 2;  // room for a direction outside R(B1)
      const Index r1 = std::min(d.h4 - 1, d.h2);
      p.b1 = random_rank(d.h4, d.h2, r1, rng);
      p.b2 = random_gaussian(d.h5, d.h2, rng);
      const Matrix c = random_gaussian(d.h2, d.h1, rng);
      const Vector u = unit_outside(range_basis(p.b1, tol).vectors, d.h4, rng);
      const Vector v = random_unit(d.h1, rng);
      const Matrix base = p.b1 * c;
      p.a1 = base + bump_scale(base) * u * v.transpose();
      p.a2 = p.b2 * c;
      inst.expected_overall = false;
      inst.expected_majorization = false;
      break;
    }
    case PlantedKind::SurjectiveB: {
      if (d.h2 < d.h4 + d.h5) d.h2 = d.h4 + d.h5;  // stacked B^t injective
      const Index m = d.h4 + d.h5;
      const Matrix u = random_orthogonal(m, rng);
      const Matrix v = random_orthogonal(d.h2, rng);
      std::uniform_real_distribution<double> spread(0.5, 2.0);
      Vector sv(m);
      for (Index i = 0; i < m; ++i) sv(i) = spread(rng);
      const Matrix stacked = u * sv.asDiagonal() * v.leftCols(m).transpose();
      p.b1 = stacked.topRows(d.h4);
      p.b2 = stacked.bottomRows(d.h5);
      // Here [B1; B2] is onto, so any pair (A1, A2) is admissible.
      p.a1 = random_gaussian(d.h4, d.h1, rng);
      p.a2 = random_gaussian(d.h5, d.h1, rng);
      inst.expected_overall = true;
      inst.expected_majorization = true;
      break;
    }
  }
  p.validate();
  return inst;
}

}  // namespace rangekit

#include "rangekit/douglas.hpp"

#include "rangekit/instances.hpp"
#include "rangekit/linop.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace rangekit;

namespace {

Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

MixedProblem identical_blocks_problem() {
  // A1 = B1 = [1 1], A2 = B2 = diag(1, 3): trivially solvable with h2 = h1.
  Matrix row(1, 2);
  row << 1.0, 1.0;
  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 1.0;
  diag(1, 1) = 3.0;
  MixedProblem p{row, diag, row, diag, Tolerances{}};
  p.validate();
  return p;
}

}  // namespace

TEST_CASE("range inclusion accepts planted factors and rejects plants outside") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const Index rows = 2 + static_cast<Index>(rng() % 8);
    const Index cols_a = 1 + static_cast<Index>(rng() % 8);
    const Index cols_b = 1 + static_cast<Index>(rng() % 8);
    const Index rank_b = 1 + static_cast<Index>(rng() % std::min(rows, cols_b));
    const PairInstance inc =
        generate_pair_instance(rows, cols_a, cols_b, rank_b, true, rng);
    const PairInstance exc =
        generate_pair_instance(rows, cols_a, cols_b, rank_b, false, rng);
    CHECK(range_inclusion(inc.a, inc.b).included);
    CHECK_FALSE(range_inclusion(exc.a, exc.b).included);
  }
}

TEST_CASE("kernel inclusion agrees with range inclusion") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const Index rows = 2 + static_cast<Index>(rng() % 8);
    const Index cols_a = 1 + static_cast<Index>(rng() % 8);
    const Index cols_b = 1 + static_cast<Index>(rng() % 8);
    const Index rank_b = 1 + static_cast<Index>(rng() % std::min(rows, cols_b));
    const PairInstance inst =
        generate_pair_instance(rows, cols_a, cols_b, rank_b, trial % 2 == 0, rng);
    CHECK(inst.planted_included == (trial % 2 == 0));
    CHECK(kernel_inclusion(inst.a, inst.b).included ==
          range_inclusion(inst.a, inst.b).included);
  }
}

TEST_CASE("majorization constant matches a hand-computed diagonal case") {
  // A = diag(3, 0), B = diag(1, 2): ||A^t z|| = 3|z1|, ||B^t z|| = sqrt(z1^2 + 4 z2^2)
  // so the best constant is 3 (attained at z = e1).
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 3.0;
  Matrix b = Matrix::Zero(2, 2);
  b(0, 0) = 1.0;
  b(1, 1) = 2.0;
  const auto c = majorization_constant(a, b);
  REQUIRE(c.has_value());
  CHECK(*c == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("majorization constant is unbounded exactly off-range") {
  Matrix a = Matrix::Identity(2, 2);
  Matrix b = Matrix::Zero(2, 2);
  b(0, 0) = 1.0;  // R(A) = R^2, R(B) = span(e1)
  CHECK_FALSE(majorization_constant(a, b).has_value());
  CHECK(majorization_constant(b, a).has_value());  // reverse direction is fine
}

TEST_CASE("douglas factor reconstructs A with minimal norm") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 25; ++trial) {
    const Index rows = 3 + static_cast<Index>(rng() % 6);
    const Index cols_a = 1 + static_cast<Index>(rng() % 6);
    const Index cols_b = 2 + static_cast<Index>(rng() % 6);
    const Index rank_b = 1 + static_cast<Index>(rng() % std::min(rows, cols_b));
    const PairInstance inst =
        generate_pair_instance(rows, cols_a, cols_b, rank_b, true, rng);

    const Matrix c = douglas_factor(inst.a, inst.b);
    const double scale = std::max(1.0, inst.a.norm());
    CHECK((inst.b * c - inst.a).norm() <= 1e-10 * scale);

    // the constant equals the factor's spectral norm
    const auto constant = majorization_constant(inst.a, inst.b);
    REQUIRE(constant.has_value());
    CHECK(std::abs(*constant - spectral_norm(c)) <= 1e-10 * (1.0 + *constant));

    // minimality: adding any kernel-of-B perturbation cannot shrink the norm
    const SubspaceBasis ker = kernel_basis(inst.b);
    if (ker.dim() > 0) {
      const Matrix perturbed =
          c + Matrix(ker.vectors * gaussian(ker.dim(), c.cols(), rng));
      CHECK(spectral_norm(perturbed) >= spectral_norm(c) * (1.0 - 1e-12));
      CHECK((inst.b * perturbed - inst.a).norm() <= 1e-9 * scale);
    }
  }
}

TEST_CASE("douglas factor refuses instances outside the range") {
  std::mt19937_64 rng(404);
  const PairInstance inst = generate_pair_instance(5, 3, 4, 4, false, rng);
  CHECK_THROWS_AS(douglas_factor(inst.a, inst.b), InfeasibleError);
}

TEST_CASE("weak factor solves the transposed statement") {
  std::mt19937_64 rng(55);
  const PairInstance inst = generate_pair_instance(6, 4, 5, 3, true, rng);
  const Matrix d = weak_factor(inst.a, inst.b);
  CHECK((inst.a.transpose() - d * inst.b.transpose()).norm() <=
        1e-10 * std::max(1.0, inst.a.norm()));
}

TEST_CASE("sampled ratio lower-bounds and approaches the constant") {
  std::mt19937_64 rng(808);
  for (int trial = 0; trial < 10; ++trial) {
    const Index rows = 3 + static_cast<Index>(rng() % 5);
    const Index cols_a = 2 + static_cast<Index>(rng() % 5);
    const Index cols_b = 2 + static_cast<Index>(rng() % 5);
    const Index rank_b = 1 + static_cast<Index>(rng() % std::min(rows, cols_b));
    const PairInstance inst =
        generate_pair_instance(rows, cols_a, cols_b, rank_b, true, rng);
    const auto constant = majorization_constant(inst.a, inst.b);
    REQUIRE(constant.has_value());
    const double sampled =
        sampled_majorization_ratio(inst.a, inst.b, Tolerances{}, 500, 99 + trial);
    if (*constant > 1e-12) {
      CHECK(sampled <= *constant * (1.0 + 1e-9));  // genuine lower bound
      CHECK(sampled >= *constant * 0.98);          // and a sharp one
    }
  }
}

TEST_CASE("mixed check accepts the identical-blocks instance") {
  const MixedProblem p = identical_blocks_problem();
  const MixedCheckReport rep = mixed_check(p);
  CHECK(rep.majorization_ok);
  REQUIRE(rep.majorization_constant.has_value());
  CHECK(*rep.majorization_constant == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.sequential_ok);
  CHECK(rep.sequential_defect <= 1e-12 * rep.scale);
  CHECK(rep.overall);
}

TEST_CASE("mixed check and factorization agree on planted instances") {
  std::mt19937_64 rng(600);
  const PlantedKind kinds[] = {PlantedKind::MixedFeasible,
                               PlantedKind::ExactOnlyFeasible,
                               PlantedKind::Infeasible, PlantedKind::SurjectiveB};
  for (int trial = 0; trial < 48; ++trial) {
    InstanceDims dims;
    dims.h1 = 1 + static_cast<Index>(rng() % 6);
    dims.h2 = 1 + static_cast<Index>(rng() % 6);
    dims.h4 = 1 + static_cast<Index>(rng() % 6);
    dims.h5 = 1 + static_cast<Index>(rng() % 6);
    const MixedInstance inst =
        generate_mixed_instance(dims, kinds[trial % 4], rng);
    const MixedCheckReport rep = mixed_check(inst.problem);
    CHECK(rep.overall == inst.expected_overall);
    CHECK(rep.majorization_ok == inst.expected_majorization);

    if (rep.overall) {
      const MixedFactorization fac = mixed_factorize(inst.problem);
      CHECK(fac.defect <= 1e-8 * fac.scale);
      // block identities of the factorization certificate
      const Matrix& b1t = inst.problem.b1.transpose();
      CHECK((inst.problem.a1.transpose() - fac.d1 * b1t).norm() <=
            1e-8 * std::max(1.0, inst.problem.a1.norm()));
      const Matrix pi_bt =
          Matrix((fac.d1 + fac.d2 * Matrix(fac.kernel_vectors.transpose()) * fac.pi) *
                 inst.problem.b2.transpose());
      CHECK((inst.problem.a2.transpose() - pi_bt).norm() <= 1e-7 * fac.scale);
    } else {
      CHECK_THROWS_AS(mixed_factorize(inst.problem), MixedCheckError);
    }
  }
}

TEST_CASE("factorization projector is the orthogonal projector onto N(B1)") {
  std::mt19937_64 rng(601);
  InstanceDims dims;
  dims.h1 = 3;
  dims.h2 = 5;
  dims.h4 = 2;
  dims.h5 = 3;
  const MixedInstance inst =
      generate_mixed_instance(dims, PlantedKind::MixedFeasible, rng);
  const MixedFactorization fac = mixed_factorize(inst.problem);
  CHECK((fac.pi * fac.pi - fac.pi).norm() <= 1e-12);
  CHECK((fac.pi - fac.pi.transpose()).norm() <= 1e-12);
  CHECK((inst.problem.b1 * fac.pi).norm() <=
        1e-10 * std::max(1.0, inst.problem.b1.norm()));
  CHECK((fac.pi * fac.kernel_vectors - fac.kernel_vectors).norm() <= 1e-12);
}

TEST_CASE("mixed solve reproduces the constrained KKT oracle") {
  // exact block forces h2_1 + h2_2 = 2; approx block minimizes ||diag(1,3) h2||.
  Matrix a1(1, 2), b1(1, 2);
  a1 << 1.0, 1.0;
  b1 << 1.0, 1.0;
  Matrix a2 = Matrix::Zero(2, 2);
  Matrix b2 = Matrix::Zero(2, 2);
  b2(0, 0) = 1.0;
  b2(1, 1) = 3.0;
  MixedProblem p{a1, a2, b1, b2, Tolerances{}};
  p.validate();

  Vector h1(2);
  h1 << 1.0, 1.0;
  const MixedSolveReport rep = mixed_solve(p, h1, 2.0);
  CHECK(rep.h2(0) == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(rep.h2(1) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(rep.exact_residual <= 1e-12);
  CHECK(rep.approx_residual == doctest::Approx(std::sqrt(3.6)).epsilon(1e-12));
  CHECK(rep.epsilon_met);
  CHECK_FALSE(mixed_solve(p, h1, 1.0).epsilon_met);
}

TEST_CASE("mixed solve refuses unattainable exact targets") {
  Matrix a1 = Matrix::Identity(2, 2);
  Matrix b1 = Matrix::Zero(2, 2);
  b1(0, 0) = 1.0;  // B1 cannot reach e2
  const Matrix a2 = Matrix::Identity(2, 2);
  const Matrix b2 = Matrix::Identity(2, 2);
  MixedProblem p{a1, a2, b1, b2, Tolerances{}};
  p.validate();
  Vector h1(2);
  h1 << 0.0, 1.0;
  CHECK_THROWS_AS(mixed_solve(p, h1, 1.0), InfeasibleError);
}

TEST_CASE("solve_mixed_goal handles affine targets consistently") {
  const MixedProblem p = identical_blocks_problem();
  std::mt19937_64 rng(71);
  const Vector h1 = Vector(gaussian(2, 1, rng));
  const MixedSolveReport via_h1 = mixed_solve(p, h1, 1.0);
  const MixedSolveReport via_targets =
      solve_mixed_goal(p, Vector(p.a1 * h1), Vector(p.a2 * h1), 1.0);
  CHECK((via_h1.h2 - via_targets.h2).norm() <= 1e-12);
  CHECK(via_h1.approx_residual ==
        doctest::Approx(via_targets.approx_residual).epsilon(1e-12));
}

TEST_CASE("stack_blocks assembles and validates block shapes") {
  Matrix a(1, 2), b(1, 3);
  a << 1.0, 2.0;
  b << 1.0, 0.0, 1.0;
  const MixedProblem p = stack_blocks({{a, b}, {a, b}}, {{a, b}});
  CHECK(p.a1.rows() == 2);
  CHECK(p.b1.cols() == 3);
  CHECK(p.a2.rows() == 1);
  CHECK(p.dim_h1() == 2);

  Matrix wrong(1, 4);
  wrong << 1.0, 0.0, 0.0, 0.0;
  CHECK_THROWS_AS(stack_blocks({{a, b}}, {{a, wrong}}), DimensionError);
}

TEST_CASE("check_propp certifies solvability only for injective stacks") {
  // B1 = [1 0], B2 = [0 1] stacked is the identity: injective transpose.
  Matrix b1(1, 2), b2(1, 2);
  b1 << 1.0, 0.0;
  b2 << 0.0, 1.0;
  MixedProblem good{b1, b2, b1, b2, Tolerances{}};
  good.validate();
  const ProppReport ok = check_propp(good);
  CHECK(ok.ok);
  CHECK(ok.sigma_min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mixed_check(good).overall);

  // more target rows than H2 dimensions: the stacked transpose cannot be
  // injective, so the shortcut must decline even though the goal is solvable.
  MixedProblem wide{Matrix::Identity(2, 1), Matrix::Identity(2, 1),
                    Matrix::Identity(2, 1), Matrix::Identity(2, 1), Tolerances{}};
  wide.validate();
  CHECK_FALSE(check_propp(wide).ok);
}

TEST_CASE("mixed problem validation rejects incompatible blocks") {
  MixedProblem p{Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                 Matrix::Identity(2, 3), Matrix::Identity(2, 2), Tolerances{}};
  CHECK_THROWS_AS(p.validate(), DimensionError);
}

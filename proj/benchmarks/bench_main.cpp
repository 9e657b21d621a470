#include "rangekit/counterexample.hpp"
#include "rangekit/douglas.hpp"
#include "rangekit/heat.hpp"
#include "rangekit/instances.hpp"
#include "rangekit/linop.hpp"

#include <benchmark/benchmark.h>

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

void bm_pinv(benchmark::State& state) {
  const Index n = state.range(0);
  std::mt19937_64 rng(1);
  const Matrix a = random_rank(n, n, std::max<Index>(1, n / 2), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pinv(a));
  }
}
BENCHMARK(bm_pinv)->Arg(16)->Arg(64)->Arg(128);

void bm_range_inclusion(benchmark::State& state) {
  const Index n = state.range(0);
  std::mt19937_64 rng(2);
  const PairInstance inst = generate_pair_instance(n, n, n, n / 2, true, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(range_inclusion(inst.a, inst.b));
  }
}
BENCHMARK(bm_range_inclusion)->Arg(16)->Arg(64)->Arg(128);

void bm_douglas_factor(benchmark::State& state) {
  const Index n = state.range(0);
  std::mt19937_64 rng(3);
  const PairInstance inst = generate_pair_instance(n, n, n, n / 2, true, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(douglas_factor(inst.a, inst.b));
  }
}
BENCHMARK(bm_douglas_factor)->Arg(16)->Arg(64)->Arg(128);

void bm_constrained_ls(benchmark::State& state) {
  const Index n = state.range(0);
  std::mt19937_64 rng(4);
  const Matrix bc = gaussian(n / 4, n, rng);
  const Matrix bo = gaussian(n, n, rng);
  const Vector h = Vector(gaussian(n, 1, rng));
  const Vector bc_rhs = Vector(bc * h);
  const Vector bo_rhs = Vector(bo * h);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_constrained_ls(bc, bc_rhs, bo, bo_rhs));
  }
}
BENCHMARK(bm_constrained_ls)->Arg(16)->Arg(64)->Arg(128);

void bm_mixed_check(benchmark::State& state) {
  const Index n = state.range(0);
  std::mt19937_64 rng(5);
  InstanceDims dims;
  dims.h1 = n;
  dims.h2 = n;
  dims.h4 = n / 2;
  dims.h5 = n / 2;
  const MixedInstance inst =
      generate_mixed_instance(dims, PlantedKind::MixedFeasible, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mixed_check(inst.problem));
  }
}
BENCHMARK(bm_mixed_check)->Arg(8)->Arg(16)->Arg(32);

void bm_mixed_solve(benchmark::State& state) {
  const Index n = state.range(0);
  std::mt19937_64 rng(6);
  InstanceDims dims;
  dims.h1 = n;
  dims.h2 = n;
  dims.h4 = n / 2;
  dims.h5 = n / 2;
  const MixedInstance inst =
      generate_mixed_instance(dims, PlantedKind::MixedFeasible, rng);
  const Vector h1 = Vector(gaussian(n, 1, rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mixed_solve(inst.problem, h1, 1e-6));
  }
}
BENCHMARK(bm_mixed_solve)->Arg(8)->Arg(16)->Arg(32);

void bm_heat_assembly(benchmark::State& state) {
  HeatConfig cfg;
  cfg.n_interior = state.range(0);
  cfg.time_steps = 2 * state.range(0);
  cfg.horizon = 0.1;
  cfg.omega_lo = 0.3;
  cfg.omega_hi = 0.8;
  cfg.theta = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_model(cfg));
  }
}
BENCHMARK(bm_heat_assembly)->Arg(15)->Arg(30)->Arg(60);

void bm_heat_synthesis(benchmark::State& state) {
  HeatConfig cfg;
  cfg.n_interior = state.range(0);
  cfg.time_steps = 2 * state.range(0);
  cfg.horizon = 0.5;
  cfg.omega_lo = 0.3;
  cfg.omega_hi = 0.8;
  cfg.theta = 0.5;
  const HeatModel model = assemble_model(cfg);
  const Vector y0 = sine_mode(cfg.n_interior, 1);
  const Vector zero = Vector::Zero(cfg.n_interior);
  for (auto _ : state) {
    benchmark::DoNotOptimize(synthesize_control(model, y0, zero, zero, 1e-2));
  }
}
BENCHMARK(bm_heat_synthesis)->Arg(15)->Arg(30);

void bm_counterexample_sweep_row(benchmark::State& state) {
  const Index n = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep({n}));
  }
}
BENCHMARK(bm_counterexample_sweep_row)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();

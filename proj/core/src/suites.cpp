#include "rangekit/suites.hpp"

#include "rangekit/instances.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

namespace rangekit {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Index draw(std::mt19937_64& rng, Index lo, Index hi) {
  std::uniform_int_distribution<Index> d(lo, hi);
  return d(rng);
}

// Worker pool over instance indices. Each index is evaluated independently
// (its RNG is seeded from the index alone), results land in per-index slots,
// and the caller aggregates single-threaded, so the outcome does not depend
// on scheduling.
template <typename Fn>
void parallel_for_index(std::size_t count, Fn&& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(count);  // drain remaining work
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct PairOutcome {
  bool range_ok = false;
  bool kernel_ok = false;
  bool constant_finite = false;
  bool factored = false;
  bool planted = false;
  std::optional<double> factor_residual;
  std::optional<double> constant_gap;
  std::optional<double> sampled_fraction;
  std::optional<double> sampled_excess;
};

struct MixedOutcome {
  bool check_overall = false;
  bool majorization_ok = false;
  bool factor_ok = false;
  bool solve_ok = false;
  bool expected_overall = false;
  bool expected_majorization = false;
  bool propp_ok = false;
  double factor_defect = 0.0;
  double worst_residual = 0.0;
  double scale = 1.0;
};

}  // namespace

PairSuiteResult run_pair_suite(std::uint64_t seed, int per_class, Index max_dim,
                               const Tolerances& tol) {
  tol.validate();
  if (per_class < 1) {
    throw std::invalid_argument("run_pair_suite: per_class must be positive");
  }
  if (max_dim < 2) {
    throw DimensionError("run_pair_suite: max_dim must be at least 2");
  }
  const auto t0 = std::chrono::steady_clock::now();

  const std::size_t count = 2 * static_cast<std::size_t>(per_class);
  std::vector<PairOutcome> outcomes(count);
  parallel_for_index(count, [&](std::size_t idx) {
    const bool included = idx % 2 == 0;
    std::mt19937_64 rng(mix_seed(seed, idx));
    const Index rows = draw(rng, 2, max_dim);
    const Index cols_a = draw(rng, 1, max_dim);
    const Index cols_b = draw(rng, 1, max_dim);
    const Index rank_b = draw(rng, 1, std::min(rows, cols_b));
    const PairInstance inst =
        generate_pair_instance(rows, cols_a, cols_b, rank_b, included, rng);

    PairOutcome& o = outcomes[idx];
    o.planted = inst.planted_included;
    o.range_ok = range_inclusion(inst.a, inst.b, tol).included;
    o.kernel_ok = kernel_inclusion(inst.a, inst.b, tol).included;
    const std::optional<double> constant = majorization_constant(inst.a, inst.b, tol);
    o.constant_finite = constant.has_value();
    Matrix c;
    try {
      c = douglas_factor(inst.a, inst.b, tol);
      o.factored = true;
    } catch (const InfeasibleError&) {
      o.factored = false;
    }

    if (o.factored) {
      const double anorm = spectral_norm(inst.a);
      o.factor_residual = spectral_norm(inst.b * c - inst.a) / std::max(anorm, 1e-30);
    }
    if (constant && o.factored) {
      o.constant_gap = std::abs(*constant - spectral_norm(c)) / (1.0 + *constant);
    }
    if (constant && *constant > 0.0) {
      const double ratio = sampled_majorization_ratio(inst.a, inst.b, tol, 1000, rng());
      o.sampled_fraction = ratio / *constant;
      o.sampled_excess = (ratio - *constant) / (1.0 + *constant);
    }
  });

  PairSuiteResult out;
  out.seed = seed;
  out.per_class = per_class;
  out.max_dim = max_dim;
  for (const PairOutcome& o : outcomes) {
    ++out.instances;
    if (o.range_ok != o.kernel_ok) ++out.collapse_disagreements;
    const bool all_same = o.range_ok == o.kernel_ok &&
                          o.kernel_ok == o.constant_finite &&
                          o.constant_finite == o.factored;
    if (!all_same) ++out.pair_disagreements;
    if (o.range_ok != o.planted) ++out.planted_mismatches;
    if (o.factor_residual) {
      out.max_factor_residual = std::max(out.max_factor_residual, *o.factor_residual);
    }
    if (o.constant_gap) {
      out.max_constant_gap = std::max(out.max_constant_gap, *o.constant_gap);
    }
    if (o.sampled_fraction) {
      out.min_sampled_fraction = std::min(out.min_sampled_fraction, *o.sampled_fraction);
      out.max_sampled_excess = std::max(out.max_sampled_excess, *o.sampled_excess);
    }
  }
  out.seconds = seconds_since(t0);
  return out;
}

MixedSuiteResult run_mixed_suite(std::uint64_t seed, int per_class,
                                 int surjective_instances, Index max_dim,
                                 const Tolerances& tol) {
  tol.validate();
  if (per_class < 1 || surjective_instances < 0) {
    throw std::invalid_argument("run_mixed_suite: instance counts out of range");
  }
  if (max_dim < 1) {
    throw DimensionError("run_mixed_suite: max_dim must be positive");
  }
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<PlantedKind> order;
  order.reserve(static_cast<std::size_t>(3 * per_class + surjective_instances));
  for (int i = 0; i < per_class; ++i) {
    order.push_back(PlantedKind::MixedFeasible);
    order.push_back(PlantedKind::ExactOnlyFeasible);
    order.push_back(PlantedKind::Infeasible);
  }
  for (int i = 0; i < surjective_instances; ++i) {
    order.push_back(PlantedKind::SurjectiveB);
  }

  std::vector<MixedOutcome> outcomes(order.size());
  parallel_for_index(order.size(), [&](std::size_t idx) {
    std::mt19937_64 rng(mix_seed(seed, idx));
    InstanceDims dims;
    dims.h1 = draw(rng, 1, max_dim);
    dims.h2 = draw(rng, 1, max_dim);
    dims.h4 = draw(rng, 1, max_dim);
    dims.h5 = draw(rng, 1, max_dim);
    const MixedInstance inst = generate_mixed_instance(dims, order[idx], rng, tol);
    const MixedProblem& p = inst.problem;

    MixedOutcome& o = outcomes[idx];
    o.expected_overall = inst.expected_overall;
    o.expected_majorization = inst.expected_majorization;

    const MixedCheckReport check = mixed_check(p);
    o.check_overall = check.overall;
    o.majorization_ok = check.majorization_ok;
    o.scale = check.scale;
    const double thresh = tol.residual_rel * check.scale;

    try {
      const MixedFactorization f = mixed_factorize(p);
      o.factor_defect = f.defect;
      o.factor_ok = f.defect <= tol.residual_rel * f.scale;
    } catch (const MixedCheckError&) {
      o.factor_ok = false;
    }

    // Constructive route: the goal is solvable iff every basis vector of H1
    // admits an exact-block-feasible h2 with vanishing approximate residual.
    o.solve_ok = true;
    for (Index j = 0; j < p.dim_h1() && o.solve_ok; ++j) {
      Vector e = Vector::Zero(p.dim_h1());
      e(j) = 1.0;
      try {
        const MixedSolveReport rep = mixed_solve(p, e, thresh);
        o.worst_residual = std::max(o.worst_residual, rep.approx_residual);
        if (rep.approx_residual > thresh) o.solve_ok = false;
      } catch (const InfeasibleError&) {
        o.solve_ok = false;
      }
    }

    o.propp_ok = check_propp(p).ok;
  });

  MixedSuiteResult out;
  out.seed = seed;
  out.per_class = per_class;
  out.surjective_instances = surjective_instances;
  for (const MixedOutcome& o : outcomes) {
    ++out.instances;
    const bool agree = o.check_overall == o.factor_ok && o.factor_ok == o.solve_ok;
    if (!agree) ++out.three_way_disagreements;
    if (o.check_overall != o.expected_overall ||
        o.majorization_ok != o.expected_majorization) {
      ++out.planted_mismatches;
    }
    if (o.propp_ok) {
      ++out.propp_true_count;
      if (!o.check_overall) ++out.propp_violations;
    }
    if (o.check_overall) {
      out.max_feasible_defect =
          std::max(out.max_feasible_defect, o.factor_defect / o.scale);
      out.max_feasible_residual =
          std::max(out.max_feasible_residual, o.worst_residual / o.scale);
    }
  }
  out.seconds = seconds_since(t0);
  return out;
}

GapSuiteResult run_gap_suite(const std::vector<Index>& dims, const Tolerances& tol) {
  const auto t0 = std::chrono::steady_clock::now();
  GapSuiteResult out;
  out.rows = sweep(dims, tol);
  out.pattern_ok = true;

  Index prev_n = 0;
  double prev_norm = 0.0;
  for (const SweepRow& row : out.rows) {
    if (!row.majorization_ok || row.overall) out.pattern_ok = false;
    if (row.propp_ok && !row.overall) ++out.propp_violations;

    const double n = static_cast<double>(row.n);
    const double closed = std::sqrt(n * (n + 1.0) * (2.0 * n + 1.0) / 6.0);
    out.max_closed_form_err =
        std::max(out.max_closed_form_err,
                 std::abs(row.min_preimage_norm_e1 - closed) / closed);

    if (prev_n >= 64 && row.n == 2 * prev_n) {
      const double ratio = row.min_preimage_norm_e1 / prev_norm;
      out.max_doubling_err = std::max(
          out.max_doubling_err, std::abs(ratio / (2.0 * std::sqrt(2.0)) - 1.0));
    }
    prev_n = row.n;
    prev_norm = row.min_preimage_norm_e1;
  }

  const SweepRow& last = out.rows.back();
  const double n = static_cast<double>(last.n);
  out.growth_constant_err =
      std::abs(last.min_preimage_norm_e1 / std::pow(n, 1.5) * std::sqrt(3.0) - 1.0);

  out.seconds = seconds_since(t0);
  return out;
}

}  // namespace rangekit

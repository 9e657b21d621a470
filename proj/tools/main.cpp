#include "rangekit/counterexample.hpp"
#include "rangekit/douglas.hpp"
#include "rangekit/heat.hpp"
#include "rangekit/io.hpp"
#include "rangekit/suites.hpp"
#include "rangekit/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::ordered_json;
using namespace rangekit;

std::string iso8601_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Every run-varying field (timestamp, wall time) lives in "header"; the rest
/// of the report is byte-identical across reruns with the same config.
ordered_json make_report(const std::string& subcommand, ordered_json config,
                         ordered_json results, double wall_s) {
  ordered_json report;
  report["schema"] = 1;
  report["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  report["subcommand"] = subcommand;
  report["header"] = {{"timestamp", iso8601_now()}, {"wall_time_s", wall_s}};
  report["config"] = std::move(config);
  report["results"] = std::move(results);
  return report;
}

void emit_report(const ordered_json& report, const std::string& out_path) {
  const std::string payload = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw IoError(out_path + ": cannot open file for writing");
  out << payload;
  if (!out) throw IoError(out_path + ": write failed");
  std::cout << "report written to " << out_path << "\n";
}

ordered_json json_or_null(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

// ---------------------------------------------------------------------------
// shared option bundles

struct ToleranceOptions {
  double rank_rel = Tolerances{}.rank_rel;
  double residual_rel = Tolerances{}.residual_rel;

  Tolerances tolerances() const {
    Tolerances tol{rank_rel, residual_rel};
    tol.validate();
    return tol;
  }

  void attach(CLI::App& app) {
    app.add_option("--rank-rel", rank_rel,
                   "Relative singular-value cutoff for rank decisions")
        ->capture_default_str();
    app.add_option("--residual-rel", residual_rel,
                   "Relative cutoff for residual/inclusion tests")
        ->capture_default_str();
  }

  void echo(ordered_json& config) const {
    config["rank_rel"] = rank_rel;
    config["residual_rel"] = residual_rel;
  }
};

struct HeatOptions {
  Index n = 30;
  Index m = 60;
  double horizon = 0.5;
  std::string omega = "0.3:0.8";
  double theta = 0.5;

  void attach(CLI::App& app, double default_horizon) {
    horizon = default_horizon;
    app.add_option("--n", n, "Interior grid nodes")->capture_default_str();
    app.add_option("--m", m, "Time steps")->capture_default_str();
    app.add_option("--t", horizon, "Time horizon")->capture_default_str();
    app.add_option("--omega", omega, "Control region lo:hi in (0,1)")
        ->capture_default_str();
    app.add_option("--theta", theta, "Theta-scheme parameter in [0,1]")
        ->capture_default_str();
  }

  HeatConfig config() const {
    const auto colon = omega.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("--omega must have the form lo:hi, e.g. 0.3:0.8");
    }
    HeatConfig cfg;
    cfg.n_interior = n;
    cfg.time_steps = m;
    cfg.horizon = horizon;
    try {
      cfg.omega_lo = std::stod(omega.substr(0, colon));
      cfg.omega_hi = std::stod(omega.substr(colon + 1));
    } catch (const std::logic_error&) {
      throw std::invalid_argument("--omega must have the form lo:hi, e.g. 0.3:0.8");
    }
    cfg.theta = theta;
    cfg.validate();
    return cfg;
  }

  void echo(ordered_json& config) const {
    config["n"] = n;
    config["m"] = m;
    config["t"] = horizon;
    config["omega"] = omega;
    config["theta"] = theta;
  }
};

// ---------------------------------------------------------------------------
// douglas subcommands

struct DouglasCheckCmd {
  std::string a_path, b_path, out_path;
  int samples = 1000;
  unsigned long long seed = 0;
  ToleranceOptions tol;

  void run() const {
    Stopwatch watch;
    const Tolerances tolerances = tol.tolerances();
    const Matrix a = read_matrix(a_path);
    const Matrix b = read_matrix(b_path);

    const InclusionReport range = range_inclusion(a, b, tolerances);
    const KernelInclusionReport kernel = kernel_inclusion(a, b, tolerances);
    const std::optional<double> constant = majorization_constant(a, b, tolerances);
    const double sampled = sampled_majorization_ratio(a, b, tolerances, samples, seed);

    ordered_json config{{"a", a_path}, {"b", b_path}, {"samples", samples}, {"seed", seed}};
    tol.echo(config);
    ordered_json results;
    results["range"] = {{"included", range.included}, {"residual", range.residual}};
    results["kernel"] = {{"included", kernel.included}, {"defect", kernel.defect}};
    results["majorization_constant"] = json_or_null(constant);
    results["sampled_ratio"] = sampled;
    results["sampled_fraction"] =
        constant && *constant > 0.0 ? ordered_json(sampled / *constant) : ordered_json(nullptr);
    emit_report(make_report("douglas check", config, results, watch.seconds()), out_path);
  }
};

struct DouglasFactorCmd {
  std::string a_path, b_path, factor_path, out_path;
  ToleranceOptions tol;

  void run() const {
    Stopwatch watch;
    const Tolerances tolerances = tol.tolerances();
    const Matrix a = read_matrix(a_path);
    const Matrix b = read_matrix(b_path);

    const Matrix c = douglas_factor(a, b, tolerances);
    if (!factor_path.empty()) write_matrix(factor_path, c);

    ordered_json config{{"a", a_path}, {"b", b_path}, {"factor_out", factor_path}};
    tol.echo(config);
    ordered_json results;
    results["rows"] = c.rows();
    results["cols"] = c.cols();
    results["constant"] = spectral_norm(c);
    results["residual"] = spectral_norm(b * c - a);
    results["scale"] = std::max(1.0, spectral_norm(a));
    emit_report(make_report("douglas factor", config, results, watch.seconds()), out_path);
  }
};

struct MixedInputs {
  std::string a1_path, a2_path, b1_path, b2_path;

  void attach(CLI::App& app) {
    app.add_option("a1", a1_path, "Exact-block A1 (Matrix Market or CSV)")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("a2", a2_path, "Approximate-block A2")->required()->check(CLI::ExistingFile);
    app.add_option("b1", b1_path, "Exact-block B1")->required()->check(CLI::ExistingFile);
    app.add_option("b2", b2_path, "Approximate-block B2")->required()->check(CLI::ExistingFile);
  }

  MixedProblem load(const Tolerances& tolerances) const {
    MixedProblem p{read_matrix(a1_path), read_matrix(a2_path), read_matrix(b1_path),
                   read_matrix(b2_path), tolerances};
    p.validate();
    return p;
  }

  void echo(ordered_json& config) const {
    config["a1"] = a1_path;
    config["a2"] = a2_path;
    config["b1"] = b1_path;
    config["b2"] = b2_path;
  }
};

struct MixedCheckCmd {
  MixedInputs inputs;
  std::string out_path;
  ToleranceOptions tol;

  void run() const {
    Stopwatch watch;
    const MixedProblem p = inputs.load(tol.tolerances());
    const MixedCheckReport check = mixed_check(p);
    const ProppReport propp = check_propp(p);

    ordered_json config;
    inputs.echo(config);
    tol.echo(config);
    ordered_json results;
    results["majorization_ok"] = check.majorization_ok;
    results["majorization_constant"] = json_or_null(check.majorization_constant);
    results["sequential_ok"] = check.sequential_ok;
    results["sequential_defect"] = check.sequential_defect;
    results["preimage_dim"] = check.preimage_dim;
    results["closure_condition_ok"] = check.closure_condition_ok;
    results["scale"] = check.scale;
    results["overall"] = check.overall;
    results["propp"] = {{"ok", propp.ok}, {"sigma_min", propp.sigma_min}};
    emit_report(make_report("douglas mixed-check", config, results, watch.seconds()), out_path);
  }
};

struct MixedSolveCmd {
  MixedInputs inputs;
  std::string h1_path, h2_path, out_path;
  double epsilon = 1e-8;
  ToleranceOptions tol;

  void run() const {
    Stopwatch watch;
    const MixedProblem p = inputs.load(tol.tolerances());
    const Vector h1 = read_vector(h1_path);
    const MixedSolveReport solve = mixed_solve(p, h1, epsilon);
    if (!h2_path.empty()) write_vector(h2_path, solve.h2);

    ordered_json config;
    inputs.echo(config);
    config["h1"] = h1_path;
    config["eps"] = epsilon;
    config["h2_out"] = h2_path;
    tol.echo(config);
    ordered_json results;
    results["exact_residual"] = solve.exact_residual;
    results["approx_residual"] = solve.approx_residual;
    results["h2_norm"] = solve.h2_norm;
    results["epsilon_met"] = solve.epsilon_met;
    emit_report(make_report("douglas mixed-solve", config, results, watch.seconds()), out_path);
    if (!solve.epsilon_met) {
      throw ToleranceError("mixed-solve: approximate residual exceeds --eps",
                           solve.approx_residual);
    }
  }
};

// ---------------------------------------------------------------------------
// counterexample sweep

struct SweepCmd {
  std::vector<Index> dims = {8, 16, 32, 64, 128, 256};
  std::string out_path;
  ToleranceOptions tol;

  void run() const {
    const std::vector<SweepRow> rows = sweep(dims, tol.tolerances());

    std::ostringstream csv;
    csv << "n,majorization_ok,sequential_defect,overall,approx_residual_e1,"
           "min_preimage_norm_e1,propp_ok\n";
    char buf[64];
    auto num = [&](double v) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      return std::string(buf);
    };
    for (const SweepRow& row : rows) {
      csv << row.n << "," << (row.majorization_ok ? 1 : 0) << ","
          << num(row.sequential_defect) << "," << (row.overall ? 1 : 0) << ","
          << num(row.approx_residual_e1) << "," << num(row.min_preimage_norm_e1) << ","
          << (row.propp_ok ? 1 : 0) << "\n";
    }

    std::cout << counterexample_truncation_note() << "\n";
    for (const SweepRow& row : rows) {
      std::printf("n=%4lld  ||x||^2 = %.6f  (pi^2/6 = %.6f)\n",
                  static_cast<long long>(row.n), row.x_norm_sq,
                  9.8696044010893586 / 6.0);
    }
    if (out_path.empty()) {
      std::cout << csv.str();
    } else {
      std::ofstream out(out_path);
      if (!out) throw IoError(out_path + ": cannot open file for writing");
      out << csv.str();
      if (!out) throw IoError(out_path + ": write failed");
      std::cout << "table written to " << out_path << "\n";
    }
  }
};

// ---------------------------------------------------------------------------
// heat subcommands

struct HeatSynthesizeCmd {
  HeatOptions heat;
  std::string y0_path, z0_path, ztarget_path;
  std::string out_path, control_path, traj_path;
  double eps = 1e-2;
  ToleranceOptions tol;

  void run() const {
    Stopwatch watch;
    const HeatConfig cfg = heat.config();
    const HeatModel model = assemble_model(cfg);
    const Index n = cfg.n_interior;

    const Vector y0 = read_vector(y0_path);
    const Vector z0 = z0_path.empty() ? Vector(Vector::Zero(n)) : read_vector(z0_path);
    const Vector zt = ztarget_path.empty() ? Vector(Vector::Zero(n)) : read_vector(ztarget_path);

    const SynthesisResult result =
        synthesize_control(model, y0, z0, zt, eps, tol.tolerances());
    if (!control_path.empty()) write_vector(control_path, result.control);
    if (!traj_path.empty()) {
      const ForwardRun run = simulate_forward(model, y0, z0, result.control);
      std::ofstream out(traj_path);
      if (!out) throw IoError(traj_path + ": cannot open file for writing");
      out << "time,node,y,z\n";
      char buf[64];
      auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
      };
      for (Index k = 0; k <= cfg.time_steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt();
        for (Index i = 0; i < n; ++i) {
          out << num(t) << "," << i << "," << num(run.y_traj(i, k)) << ","
              << num(run.z_traj(i, k)) << "\n";
        }
      }
      if (!out) throw IoError(traj_path + ": write failed");
    }

    ordered_json config;
    heat.echo(config);
    config["y0"] = y0_path;
    config["z0"] = z0_path;
    config["ztarget"] = ztarget_path;
    config["eps"] = eps;
    config["control_out"] = control_path;
    config["traj_out"] = traj_path;
    tol.echo(config);
    ordered_json results;
    results["y_terminal_norm"] = result.y_terminal_norm;
    results["z_error"] = result.z_error;
    results["control_norm"] = result.control_norm;
    results["exact_residual"] = result.exact_residual;
    results["approx_residual"] = result.approx_residual;
    results["resimulated"] = result.resimulated;
    results["control_dim"] = model.control_dim();
    results["omega_node_count"] = static_cast<Index>(model.omega_idx.size());
    emit_report(make_report("heat synthesize", config, results, watch.seconds()), out_path);
  }
};

struct HeatAdjointCmd {
  HeatOptions heat;
  int probes = 20;
  unsigned long long seed = 0;
  std::string out_path;

  void run() const {
    Stopwatch watch;
    const HeatModel model = assemble_model(heat.config());
    const AdjointCheckReport report = adjoint_check(model, probes, seed);

    ordered_json config;
    heat.echo(config);
    config["probes"] = probes;
    config["seed"] = seed;
    ordered_json results;
    results["tier1_max"] = report.tier1_max;
    results["tier2_flow_max"] = report.tier2_flow_max;
    results["tier2_trace_max"] = report.tier2_trace_max;
    results["tier2_max"] = report.tier2_max;
    emit_report(make_report("heat adjoint-check", config, results, watch.seconds()), out_path);
  }
};

struct HeatConvergenceCmd {
  HeatOptions heat;
  int levels = 2;
  int probes = 20;
  unsigned long long seed = 0;
  std::string out_path;

  void run() const {
    Stopwatch watch;
    if (levels < 2) throw std::invalid_argument("--levels must be at least 2");
    constexpr double kPiSq = 9.8696044010893586;

    ordered_json level_rows = ordered_json::array();
    std::vector<double> a1_errs, a2_errs, tier2s;
    for (int lvl = 0; lvl < levels; ++lvl) {
      const Index scale = Index{1} << lvl;
      HeatOptions local = heat;
      local.n = heat.n * scale;
      local.m = heat.m * scale;
      const HeatConfig cfg = local.config();
      const HeatModel model = assemble_model(cfg);

      const Vector s = sine_mode(cfg.n_interior, 1);
      const double decay = std::exp(-kPiSq * cfg.horizon);
      const double a1_err = (model.a1 * s - decay * s).norm() / s.norm();
      const double a2_err = (model.a2 * s - cfg.horizon * decay * s).norm() / s.norm();
      const AdjointCheckReport adj = adjoint_check(model, probes, seed);

      a1_errs.push_back(a1_err);
      a2_errs.push_back(a2_err);
      tier2s.push_back(adj.tier2_max);
      level_rows.push_back({{"n", cfg.n_interior},
                            {"m", cfg.time_steps},
                            {"mode1_flow_err", a1_err},
                            {"mode1_coevolution_err", a2_err},
                            {"tier1_max", adj.tier1_max},
                            {"tier2_max", adj.tier2_max}});
    }
    ordered_json ratios = ordered_json::array();
    for (int lvl = 1; lvl < levels; ++lvl) {
      ratios.push_back({{"mode1_flow", a1_errs[lvl - 1] / a1_errs[lvl]},
                        {"mode1_coevolution", a2_errs[lvl - 1] / a2_errs[lvl]},
                        {"tier2", tier2s[lvl - 1] / tier2s[lvl]}});
    }

    ordered_json config;
    heat.echo(config);
    config["levels"] = levels;
    config["probes"] = probes;
    config["seed"] = seed;
    ordered_json results;
    results["levels"] = level_rows;
    results["refinement_ratios"] = ratios;
    emit_report(make_report("heat convergence", config, results, watch.seconds()), out_path);
  }
};

// ---------------------------------------------------------------------------
// suite subcommands

struct SuitePairCmd {
  bool collapse_focus = false;  // theorem2 reports the kernel/range collapse
  std::uint64_t seed = 0;
  int per_class = 500;
  Index max_dim = 40;
  std::string out_path;
  ToleranceOptions tol;

  void run() const {
    const PairSuiteResult r = run_pair_suite(seed, per_class, max_dim, tol.tolerances());

    ordered_json config{{"seed", seed}, {"instances", per_class}, {"max_dim", max_dim}};
    tol.echo(config);
    ordered_json results;
    results["instances"] = r.instances;
    if (collapse_focus) {
      results["collapse_disagreements"] = r.collapse_disagreements;
      results["planted_mismatches"] = r.planted_mismatches;
    } else {
      results["pair_disagreements"] = r.pair_disagreements;
      results["planted_mismatches"] = r.planted_mismatches;
      results["max_factor_residual"] = r.max_factor_residual;
      results["max_constant_gap"] = r.max_constant_gap;
      results["min_sampled_fraction"] = r.min_sampled_fraction;
      results["max_sampled_excess"] = r.max_sampled_excess;
    }
    const char* name = collapse_focus ? "suite theorem2" : "suite theorem1";
    emit_report(make_report(name, config, results, r.seconds), out_path);
  }
};

struct SuiteMixedCmd {
  std::uint64_t seed = 0;
  int per_class = 300;
  int surjective = 100;
  Index max_dim = 12;
  std::string out_path;
  ToleranceOptions tol;

  void run() const {
    const MixedSuiteResult r =
        run_mixed_suite(seed, per_class, surjective, max_dim, tol.tolerances());

    ordered_json config{{"seed", seed},
                        {"instances", per_class},
                        {"surjective", surjective},
                        {"max_dim", max_dim}};
    tol.echo(config);
    ordered_json results;
    results["instances"] = r.instances;
    results["three_way_disagreements"] = r.three_way_disagreements;
    results["planted_mismatches"] = r.planted_mismatches;
    results["propp_true_count"] = r.propp_true_count;
    results["propp_violations"] = r.propp_violations;
    results["max_feasible_defect"] = r.max_feasible_defect;
    results["max_feasible_residual"] = r.max_feasible_residual;
    emit_report(make_report("suite mixed", config, results, r.seconds), out_path);
  }
};

struct SuiteGapCmd {
  std::vector<Index> dims = {8, 16, 32, 64, 128, 256};
  std::string out_path;
  ToleranceOptions tol;

  void run() const {
    const GapSuiteResult r = run_gap_suite(dims, tol.tolerances());

    ordered_json config{{"dims", dims}};
    tol.echo(config);
    ordered_json rows = ordered_json::array();
    for (const SweepRow& row : r.rows) {
      rows.push_back({{"n", row.n},
                      {"majorization_ok", row.majorization_ok},
                      {"sequential_defect", row.sequential_defect},
                      {"overall", row.overall},
                      {"approx_residual_e1", row.approx_residual_e1},
                      {"min_preimage_norm_e1", row.min_preimage_norm_e1},
                      {"propp_ok", row.propp_ok},
                      {"x_norm_sq", row.x_norm_sq}});
    }
    ordered_json results;
    results["pattern_ok"] = r.pattern_ok;
    results["max_closed_form_err"] = r.max_closed_form_err;
    results["max_doubling_err"] = r.max_doubling_err;
    results["growth_constant_err"] = r.growth_constant_err;
    results["propp_violations"] = r.propp_violations;
    results["rows"] = rows;
    emit_report(make_report("suite gap", config, results, r.seconds), out_path);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator range-inclusion, factorization and mixed exact/approximate "
               "control toolkit"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.set_config("--config", "", "Read options from a key=value config file");
  app.require_subcommand(1);

  // ---- douglas ----
  CLI::App* douglas = app.add_subcommand("douglas", "Range inclusion and factorization");
  douglas->require_subcommand(1);

  DouglasCheckCmd douglas_check;
  {
    CLI::App* cmd = douglas->add_subcommand(
        "check", "Test R(A) in R(B), N(B^t) in N(A^t) and the majorization constant");
    cmd->add_option("a", douglas_check.a_path, "Operator A")->required()->check(CLI::ExistingFile);
    cmd->add_option("b", douglas_check.b_path, "Operator B")->required()->check(CLI::ExistingFile);
    cmd->add_option("--samples", douglas_check.samples, "Random directions for the sampled ratio")
        ->capture_default_str();
    cmd->add_option("--seed", douglas_check.seed, "Sampling seed")->capture_default_str();
    cmd->add_option("--out", douglas_check.out_path, "JSON report path (default: stdout)");
    douglas_check.tol.attach(*cmd);
    cmd->callback([&] { douglas_check.run(); });
  }

  DouglasFactorCmd douglas_factor_cmd;
  {
    CLI::App* cmd = douglas->add_subcommand("factor", "Compute the minimal factor C = B^+ A");
    cmd->add_option("a", douglas_factor_cmd.a_path, "Operator A")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("b", douglas_factor_cmd.b_path, "Operator B")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--factor-out", douglas_factor_cmd.factor_path,
                    "Write the factor C (Matrix Market or CSV by extension)");
    cmd->add_option("--out", douglas_factor_cmd.out_path, "JSON report path (default: stdout)");
    douglas_factor_cmd.tol.attach(*cmd);
    cmd->callback([&] { douglas_factor_cmd.run(); });
  }

  MixedCheckCmd mixed_check_cmd;
  {
    CLI::App* cmd = douglas->add_subcommand(
        "mixed-check", "Solvability test for the mixed exact/approximate goal");
    mixed_check_cmd.inputs.attach(*cmd);
    cmd->add_option("--out", mixed_check_cmd.out_path, "JSON report path (default: stdout)");
    mixed_check_cmd.tol.attach(*cmd);
    cmd->callback([&] { mixed_check_cmd.run(); });
  }

  MixedSolveCmd mixed_solve_cmd;
  {
    CLI::App* cmd = douglas->add_subcommand(
        "mixed-solve", "Solve for h2: B1 h2 = A1 h1 exactly, ||A2 h1 - B2 h2|| minimal");
    mixed_solve_cmd.inputs.attach(*cmd);
    cmd->add_option("--h1", mixed_solve_cmd.h1_path, "Input vector h1")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--eps", mixed_solve_cmd.epsilon, "Approximate-block tolerance")
        ->capture_default_str();
    cmd->add_option("--h2-out", mixed_solve_cmd.h2_path, "Write the solution h2");
    cmd->add_option("--out", mixed_solve_cmd.out_path, "JSON report path (default: stdout)");
    mixed_solve_cmd.tol.attach(*cmd);
    cmd->callback([&] { mixed_solve_cmd.run(); });
  }

  // ---- counterexample ----
  CLI::App* counterexample =
      app.add_subcommand("counterexample", "Diagonal family separating majorization from solvability");
  counterexample->require_subcommand(1);

  SweepCmd sweep_cmd;
  {
    CLI::App* cmd = counterexample->add_subcommand("sweep", "Evaluate the family across dimensions");
    cmd->add_option("--dims", sweep_cmd.dims, "Comma-separated dimensions, strictly increasing")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--out", sweep_cmd.out_path, "CSV table path (default: stdout)");
    sweep_cmd.tol.attach(*cmd);
    cmd->callback([&] { sweep_cmd.run(); });
  }

  // ---- heat ----
  CLI::App* heat = app.add_subcommand("heat", "Heat-cascade discretization and control synthesis");
  heat->require_subcommand(1);

  HeatSynthesizeCmd heat_synth;
  {
    CLI::App* cmd = heat->add_subcommand(
        "synthesize", "Steer y(T) to zero exactly and z(T) eps-close to a target");
    heat_synth.heat.attach(*cmd, 0.5);
    cmd->add_option("--y0", heat_synth.y0_path, "Initial state y-component (vector file)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--z0", heat_synth.z0_path, "Initial state z-component (default: zero)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--ztarget", heat_synth.ztarget_path, "Terminal z target (default: zero)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--eps", heat_synth.eps, "Approximate-target tolerance (discrete L2)")
        ->capture_default_str();
    cmd->add_option("--out", heat_synth.out_path, "JSON report path (default: stdout)");
    cmd->add_option("--control-out", heat_synth.control_path, "Write the control field");
    cmd->add_option("--traj-out", heat_synth.traj_path,
                    "Write the controlled trajectories as CSV (time,node,y,z)");
    heat_synth.tol.attach(*cmd);
    cmd->callback([&] { heat_synth.run(); });
  }

  HeatAdjointCmd heat_adjoint;
  {
    CLI::App* cmd = heat->add_subcommand(
        "adjoint-check", "Two-tier consistency of transposes vs the discretized adjoint");
    heat_adjoint.heat.attach(*cmd, 0.1);
    cmd->add_option("--probes", heat_adjoint.probes, "Random probes per tier")
        ->capture_default_str();
    cmd->add_option("--seed", heat_adjoint.seed, "Probe seed")->capture_default_str();
    cmd->add_option("--out", heat_adjoint.out_path, "JSON report path (default: stdout)");
    cmd->callback([&] { heat_adjoint.run(); });
  }

  HeatConvergenceCmd heat_conv;
  {
    CLI::App* cmd = heat->add_subcommand(
        "convergence", "Mode-decay and adjoint-gap errors under joint space/time refinement");
    heat_conv.heat.attach(*cmd, 0.1);
    cmd->add_option("--levels", heat_conv.levels, "Refinement levels (doubling N and M)")
        ->capture_default_str();
    cmd->add_option("--probes", heat_conv.probes, "Adjoint probes per level")
        ->capture_default_str();
    cmd->add_option("--seed", heat_conv.seed, "Probe seed")->capture_default_str();
    cmd->add_option("--out", heat_conv.out_path, "JSON report path (default: stdout)");
    cmd->callback([&] { heat_conv.run(); });
  }

  // ---- suite ----
  CLI::App* suite = app.add_subcommand("suite", "Randomized cross-validation suites");
  suite->require_subcommand(1);

  SuitePairCmd suite_theorem1;
  {
    CLI::App* cmd = suite->add_subcommand(
        "theorem1", "Single-pair equivalences: inclusion, constant, factor");
    cmd->add_option("--seed", suite_theorem1.seed, "Suite seed")->capture_default_str();
    cmd->add_option("--instances", suite_theorem1.per_class, "Instances per planted class")
        ->capture_default_str();
    cmd->add_option("--max-dim", suite_theorem1.max_dim, "Largest matrix dimension")
        ->capture_default_str();
    cmd->add_option("--out", suite_theorem1.out_path, "JSON report path (default: stdout)");
    suite_theorem1.tol.attach(*cmd);
    cmd->callback([&] { suite_theorem1.run(); });
  }

  SuitePairCmd suite_theorem2;
  suite_theorem2.collapse_focus = true;
  {
    CLI::App* cmd = suite->add_subcommand(
        "theorem2", "Kernel-inclusion route against the range-inclusion route");
    cmd->add_option("--seed", suite_theorem2.seed, "Suite seed")->capture_default_str();
    cmd->add_option("--instances", suite_theorem2.per_class, "Instances per planted class")
        ->capture_default_str();
    cmd->add_option("--max-dim", suite_theorem2.max_dim, "Largest matrix dimension")
        ->capture_default_str();
    cmd->add_option("--out", suite_theorem2.out_path, "JSON report path (default: stdout)");
    suite_theorem2.tol.attach(*cmd);
    cmd->callback([&] { suite_theorem2.run(); });
  }

  SuiteMixedCmd suite_mixed;
  {
    CLI::App* cmd = suite->add_subcommand(
        "mixed", "Three-way agreement for the mixed goal on planted instances");
    cmd->add_option("--seed", suite_mixed.seed, "Suite seed")->capture_default_str();
    cmd->add_option("--instances", suite_mixed.per_class, "Instances per planted class")
        ->capture_default_str();
    cmd->add_option("--surjective", suite_mixed.surjective,
                    "Extra instances with [B1; B2] onto (sufficiency shortcut)")
        ->capture_default_str();
    cmd->add_option("--max-dim", suite_mixed.max_dim, "Largest space dimension")
        ->capture_default_str();
    cmd->add_option("--out", suite_mixed.out_path, "JSON report path (default: stdout)");
    suite_mixed.tol.attach(*cmd);
    cmd->callback([&] { suite_mixed.run(); });
  }

  SuiteGapCmd suite_gap;
  {
    CLI::App* cmd = suite->add_subcommand(
        "gap", "Counterexample growth laws across truncation dimensions");
    cmd->add_option("--dims", suite_gap.dims, "Comma-separated dimensions")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--out", suite_gap.out_path, "JSON report path (default: stdout)");
    suite_gap.tol.attach(*cmd);
    cmd->callback([&] { suite_gap.run(); });
  }

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // parse/usage errors map to exit 2
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << " (residual " << e.residual() << ")\n";
    return 3;
  } catch (const MixedCheckError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const ToleranceError& e) {
    std::cerr << "tolerance not met: " << e.what() << " (achieved " << e.achieved() << ")\n";
    return 4;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
}

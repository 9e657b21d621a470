#include "rangekit/heat.hpp"

#include "rangekit/douglas.hpp"
#include "rangekit/linop.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace rangekit {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// One theta-scheme step factored once: state advances through
/// (I - theta dt L) next = (I + (1-theta) dt L) state + dt * source_mix,
/// where source_mix = theta * src_next + (1-theta) * src_now.
struct ThetaStepper {
  Matrix sexp;
  Eigen::LLT<Matrix> implicit_solver;
  double dt = 0.0;
  double theta = 0.5;

  ThetaStepper(const Matrix& laplacian, double dt_in, double theta_in)
      : dt(dt_in), theta(theta_in) {
    const Index n = laplacian.rows();
    const Matrix simp = Matrix::Identity(n, n) - theta * dt * laplacian;
    sexp = Matrix::Identity(n, n) + (1.0 - theta) * dt * laplacian;
    implicit_solver.compute(simp);
    if (implicit_solver.info() != Eigen::Success) {
      throw NumericalError("theta-scheme implicit operator is not positive definite");
    }
  }

  template <typename State>
  State advance(const State& state, const State& src_now, const State& src_next) const {
    return implicit_solver.solve(sexp * state +
                                 dt * (theta * src_next + (1.0 - theta) * src_now));
  }

  template <typename State>
  State advance(const State& state) const {
    return implicit_solver.solve((sexp * state).eval());
  }
};

Matrix omega_extension(const HeatModel& model) {
  const Index n = model.config.n_interior;
  const Index nw = static_cast<Index>(model.omega_idx.size());
  Matrix e = Matrix::Zero(n, nw);
  for (Index j = 0; j < nw; ++j) e(model.omega_idx[j], j) = 1.0;
  return e;
}

void require_state(const Vector& v, Index n, const char* name) {
  if (v.size() != n) {
    std::ostringstream msg;
    msg << name << ": expected length " << n << ", got " << v.size();
    throw DimensionError(msg.str());
  }
  require_finite(v, name);
}

}  // namespace

std::vector<Index> HeatConfig::omega_nodes() const {
  std::vector<Index> idx;
  const double h = dx();
  for (Index i = 0; i < n_interior; ++i) {
    const double x = static_cast<double>(i + 1) * h;
    if (x > omega_lo && x < omega_hi) idx.push_back(i);
  }
  return idx;
}

void HeatConfig::validate() const {
  if (n_interior < 1) throw std::invalid_argument("HeatConfig: n_interior must be >= 1");
  if (time_steps < 1) throw std::invalid_argument("HeatConfig: time_steps must be >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("HeatConfig: horizon must be positive and finite");
  }
  if (!(omega_lo >= 0.0 && omega_hi <= 1.0 && omega_lo < omega_hi)) {
    throw std::invalid_argument("HeatConfig: control region must satisfy 0 <= lo < hi <= 1");
  }
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw std::invalid_argument("HeatConfig: theta must lie in [0, 1]");
  }
  if (omega_nodes().empty()) {
    throw std::invalid_argument(
        "HeatConfig: control region (omega_lo, omega_hi) contains no interior grid node");
  }
}

Matrix assemble_laplacian(Index n) {
  if (n < 1) throw DimensionError("assemble_laplacian: n must be >= 1");
  const double h = 1.0 / static_cast<double>(n + 1);
  const double scale = 1.0 / (h * h);
  Matrix l = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    l(i, i) = -2.0 * scale;
    if (i > 0) l(i, i - 1) = scale;
    if (i + 1 < n) l(i, i + 1) = scale;
  }
  return l;
}

HeatModel assemble_model(const HeatConfig& config) {
  config.validate();
  HeatModel model;
  model.config = config;
  model.omega_idx = config.omega_nodes();
  const Index n = config.n_interior;
  const Index m = config.time_steps;
  const Index nw = static_cast<Index>(model.omega_idx.size());
  const double dt = config.dt();

  model.laplacian = assemble_laplacian(n);
  const ThetaStepper stepper(model.laplacian, dt, config.theta);
  model.step_implicit = Matrix::Identity(n, n) - config.theta * dt * model.laplacian;
  model.step_explicit = stepper.sexp;
  model.omega_mask = Matrix::Zero(n, n);
  for (Index i : model.omega_idx) model.omega_mask(i, i) = 1.0;

  // Flow operators: co-evolve the identity through the y-equation while the
  // z-equation accumulates the cascade source.
  {
    Matrix y = Matrix::Identity(n, n);
    Matrix z = Matrix::Zero(n, n);
    for (Index k = 0; k < m; ++k) {
      const Matrix y_next = stepper.advance(y);
      z = stepper.advance(z, y, y_next);
      y = y_next;
    }
    model.a1 = y;
    model.a2 = z;
    model.a3 = model.a1;
  }

  // Control operators: unit impulses per (omega node, time step), evolved
  // through the identical step; the sign convention maps h to minus the
  // terminal states.
  {
    const Matrix e = omega_extension(model);
    const Index dof = nw * m;
    Matrix y = Matrix::Zero(n, dof);
    Matrix z = Matrix::Zero(n, dof);
    Matrix src = Matrix::Zero(n, dof);
    for (Index k = 0; k < m; ++k) {
      src.setZero();
      src.middleCols(k * nw, nw) = e;  // control is constant across its own step
      const Matrix y_next = stepper.advance(y, src, src);
      z = stepper.advance(z, y, y_next);
      y = y_next;
    }
    model.b1 = -y;
    model.b2 = -z;
  }
  return model;
}

ForwardRun simulate_forward(const HeatModel& model, const Vector& y0,
                            const Vector& z0, const Vector& control) {
  const Index n = model.config.n_interior;
  const Index m = model.config.time_steps;
  const Index nw = static_cast<Index>(model.omega_idx.size());
  require_state(y0, n, "y0");
  require_state(z0, n, "z0");
  require_state(control, model.control_dim(), "control");

  const ThetaStepper stepper(model.laplacian, model.config.dt(), model.config.theta);
  const Matrix e = omega_extension(model);

  ForwardRun run;
  run.y_traj.resize(n, m + 1);
  run.z_traj.resize(n, m + 1);
  Vector y = y0, z = z0;
  run.y_traj.col(0) = y;
  run.z_traj.col(0) = z;
  for (Index k = 0; k < m; ++k) {
    const Vector src = e * control.segment(k * nw, nw);
    const Vector y_next = stepper.advance(y, src, src);
    z = stepper.advance(z, y, y_next);
    y = y_next;
    run.y_traj.col(k + 1) = y;
    run.z_traj.col(k + 1) = z;
  }
  run.y_terminal = y;
  run.z_terminal = z;
  return run;
}

AdjointRun simulate_adjoint(const HeatModel& model, const Vector& phi_terminal,
                            const Vector& psi_terminal) {
  const Index n = model.config.n_interior;
  const Index m = model.config.time_steps;
  const Index nw = static_cast<Index>(model.omega_idx.size());
  require_state(phi_terminal, n, "phi_terminal");
  require_state(psi_terminal, n, "psi_terminal");

  // Backward march in tau = T - t at half steps. Using its own step size
  // keeps this a bona fide discretization of the continuous adjoint system
  // instead of the algebraic transpose of the forward recursion; the
  // comparison between the two is exactly what adjoint_check tier 2 reports.
  const double dt = model.config.dt();
  const ThetaStepper stepper(model.laplacian, 0.5 * dt, model.config.theta);

  AdjointRun run;
  run.phi_traj.resize(n, m + 1);
  run.psi_traj.resize(n, m + 1);
  run.observation_trace.resize(nw * m);
  Vector phi = phi_terminal, psi = psi_terminal;
  run.phi_traj.col(m) = phi;
  run.psi_traj.col(m) = psi;
  for (Index half = 1; half <= 2 * m; ++half) {
    const Vector psi_next = stepper.advance(psi);
    phi = stepper.advance(phi, psi, psi_next);
    psi = psi_next;
    if (half % 2 == 1) {
      // Midpoint of forward step k: tau = (2(m-k) - 1) dt/2.
      const Index k = m - (half + 1) / 2;
      for (Index j = 0; j < nw; ++j) {
        run.observation_trace(k * nw + j) = -phi(model.omega_idx[j]);
      }
    } else {
      const Index level = m - half / 2;
      run.phi_traj.col(level) = phi;
      run.psi_traj.col(level) = psi;
    }
  }
  run.phi0 = run.phi_traj.col(0);
  return run;
}

AdjointCheckReport adjoint_check(const HeatModel& model, int probes,
                                 unsigned long long seed) {
  if (probes < 1) throw std::invalid_argument("adjoint_check: probes must be >= 1");
  const Index n = model.config.n_interior;
  const double dt = model.config.dt();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  AdjointCheckReport report;
  report.probes = probes;

  // Tier 1: the assembled operators against their literal transposes.
  // Exact by construction; any visible residual means broken assembly.
  const Matrix* ops[] = {&model.a1, &model.a2, &model.a3, &model.b1, &model.b2};
  for (const Matrix* op : ops) {
    for (int p = 0; p < probes; ++p) {
      Vector v(op->cols()), w(op->rows());
      for (Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
      for (Index i = 0; i < w.size(); ++i) w(i) = normal(rng);
      const double lhs = (*op * v).dot(w);
      const double rhs = v.dot(op->transpose() * w);
      const double scale = (*op * v).norm() * w.norm() + v.norm() * (op->transpose() * w).norm();
      report.tier1_max = std::max(report.tier1_max, std::abs(lhs - rhs) / std::max(scale, 1e-300));
    }
  }

  // Tier 2: independently discretized adjoint run vs transposed operators.
  // Probes are smooth random terminal data: coefficients on the first three
  // grid sine modes with 1/k^2 weights, so the deviation measures scheme
  // consistency instead of the transient behaviour of unresolved modes.
  // The coefficients come from a dedicated stream (tier 1 consumes a
  // size-dependent number of draws): with the same seed, every resolution
  // probes the same continuum functions, which keeps deviation ratios across
  // refinement levels meaningful.
  std::mt19937_64 probe_rng(seed ^ 0x9E3779B97F4A7C15ULL);
  const int n_modes = static_cast<int>(std::min<Index>(3, n));
  std::vector<Vector> modes;
  for (int k = 1; k <= n_modes; ++k) {
    modes.push_back(sine_mode(n, k) / (static_cast<double>(k) * static_cast<double>(k)));
  }
  auto smooth_probe = [&]() {
    Vector v = Vector::Zero(n);
    for (const Vector& mode : modes) v += normal(probe_rng) * mode;
    return v;
  };

  // Relative deviations are taken against cancellation-free scales
  // (||A1^t phi|| + ||A2^t psi||, not the norm of their sum): a probe whose
  // two contributions nearly cancel would otherwise divide a small absolute
  // gap by a near-zero reference and report noise instead of consistency.
  for (int p = 0; p < probes; ++p) {
    const Vector phi_t = smooth_probe();
    const Vector psi_t = smooth_probe();
    const AdjointRun run = simulate_adjoint(model, phi_t, psi_t);

    const Vector flow_phi = model.a1.transpose() * phi_t;
    const Vector flow_psi = model.a2.transpose() * psi_t;
    const double flow_scale = std::max(flow_phi.norm() + flow_psi.norm(), 1e-300);
    const double flow_dev = (flow_phi + flow_psi - run.phi0).norm() / flow_scale;
    report.tier2_flow_max = std::max(report.tier2_flow_max, flow_dev);

    const Vector trace_phi = model.b1.transpose() * phi_t / dt;
    const Vector trace_psi = model.b2.transpose() * psi_t / dt;
    const double trace_scale = std::max(trace_phi.norm() + trace_psi.norm(), 1e-300);
    const double trace_dev =
        (trace_phi + trace_psi - run.observation_trace).norm() / trace_scale;
    report.tier2_trace_max = std::max(report.tier2_trace_max, trace_dev);
  }
  report.tier2_max = std::max(report.tier2_flow_max, report.tier2_trace_max);
  return report;
}

SynthesisResult synthesize_control(const HeatModel& model, const Vector& y0,
                                   const Vector& z0, const Vector& z_target,
                                   double eps, const Tolerances& tol) {
  const Index n = model.config.n_interior;
  require_state(y0, n, "y0");
  require_state(z0, n, "z0");
  require_state(z_target, n, "z_target");
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("synthesize_control: eps must be positive and finite");
  }
  const double sqrt_dx = std::sqrt(model.config.dx());

  // Nonzero z0 reduces to the z0 = 0 problem with a shifted target.
  const Vector exact_target = model.a1 * y0;
  const Vector approx_target = model.a2 * y0 + model.a3 * z0 - z_target;

  MixedProblem p{model.a1, model.a2, model.b1, model.b2, tol};
  const MixedSolveReport solve =
      solve_mixed_goal(p, exact_target, approx_target, eps / sqrt_dx);

  SynthesisResult out;
  out.control = solve.h2;
  out.exact_residual = solve.exact_residual;
  out.approx_residual = solve.approx_residual;
  out.control_norm = std::sqrt(model.config.dt() * model.config.dx()) * solve.h2.norm();

  // Never trust the solver's own residuals for the verdict: re-simulate.
  const ForwardRun run = simulate_forward(model, y0, z0, solve.h2);
  out.y_terminal_norm = sqrt_dx * run.y_terminal.norm();
  out.z_error = sqrt_dx * (run.z_terminal - z_target).norm();
  out.resimulated = true;

  if (out.z_error > eps) {
    throw ToleranceError("synthesize_control: re-simulated z-error exceeds eps", out.z_error);
  }
  const double y_scale = std::max(1.0, sqrt_dx * y0.norm());
  if (out.y_terminal_norm > tol.residual_rel * y_scale) {
    throw ToleranceError("synthesize_control: re-simulated y(T) is not null to tolerance",
                         out.y_terminal_norm);
  }
  return out;
}

double grid_l2_norm(const HeatConfig& config, const Vector& v) {
  return std::sqrt(config.dx()) * v.norm();
}

Vector sine_mode(Index n_interior, int k) {
  if (n_interior < 1 || k < 1) {
    throw DimensionError("sine_mode: need n_interior >= 1 and k >= 1");
  }
  const double h = 1.0 / static_cast<double>(n_interior + 1);
  Vector v(n_interior);
  for (Index i = 0; i < n_interior; ++i) {
    v(i) = std::sin(static_cast<double>(k) * kPi * static_cast<double>(i + 1) * h);
  }
  return v;
}

}  // namespace rangekit

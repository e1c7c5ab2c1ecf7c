#include "hiv/control.hpp"

#include <cmath>

namespace hiv {

void SweepConfig::validate() const {
  if (max_iters < 1) throw DomainError("sweep max_iters must be positive");
  if (!(tol >= 0.0) || !std::isfinite(tol)) throw DomainError("sweep tol must be nonnegative");
  if (!(relaxation > 0.0 && relaxation <= 1.0)) throw DomainError("sweep relaxation must lie in (0,1]");
}

double relative_change(const ControlSchedule& next, const ControlSchedule& prev) {
  const double scale = std::max(next.cwiseAbs().maxCoeff(), prev.cwiseAbs().maxCoeff());
  if (scale == 0.0) return 0.0;
  return (next - prev).cwiseAbs().maxCoeff() / scale;
}

StateSamples backward_adjoint(const Params& p, const StateSamples& states, const ControlSchedule& controls,
                              const TimeGrid& grid, Integrator method) {
  const Eigen::Index nodes = states.cols();
  const double h = grid.step();
  StateSamples lam(5, nodes);
  lam.col(nodes - 1).setZero();
  for (Eigen::Index j = nodes - 1; j > 0; --j) {
    const Adjoint l = lam.col(j);
    const State s_right = states.col(j);
    const Eigen::Vector2d u_right = controls.col(j);
    const Adjoint k1 = adjoint_rhs(p, s_right, l, u_right[0], u_right[1]);
    if (method == Integrator::Euler) {
      lam.col(j - 1) = l - h * k1;
      continue;
    }
    const State s_left = states.col(j - 1);
    const Eigen::Vector2d u_left = controls.col(j - 1);
    const State s_mid = 0.5 * (s_left + s_right);
    const Eigen::Vector2d u_mid = 0.5 * (u_left + u_right);
    const Adjoint k2 = adjoint_rhs<double>(p, s_mid, l - 0.5 * h * k1, u_mid[0], u_mid[1]);
    const Adjoint k3 = adjoint_rhs<double>(p, s_mid, l - 0.5 * h * k2, u_mid[0], u_mid[1]);
    const Adjoint k4 = adjoint_rhs<double>(p, s_left, l - h * k3, u_left[0], u_left[1]);
    lam.col(j - 1) = l - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return lam;
}

ControlSchedule characterize_controls(const Params& p, const StateSamples& states, const StateSamples& adjoints) {
  ControlSchedule u(2, states.cols());
  for (Eigen::Index i = 0; i < states.cols(); ++i) u.col(i) = optimal_controls(p, states.col(i), adjoints.col(i));
  return u;
}

namespace {

// Algorithm with the delay index taken as zero: one loop stepping the state
// forward and the costate backward, each with explicit Euler, and setting the
// next control from the freshly computed values.
SweepSolution single_pass(const Params& p, const State& s0, const TimeGrid& grid, const SweepConfig& cfg) {
  const Eigen::Index n = grid.n;
  const double h = grid.step();
  StateSamples x(5, n + 1);
  StateSamples lam(5, n + 1);
  ControlSchedule u = ControlSchedule::Zero(2, n + 1);
  x.col(0) = s0;
  lam.col(n).setZero();

  for (Eigen::Index i = 0; i < n; ++i) {
    const State xi = x.col(i);
    const State next = xi + h * rhs_controlled(p, xi, u(0, i), u(1, i));
    if (!next.allFinite()) {
      Trajectory partial{grid, x.leftCols(i + 1), u.leftCols(i + 1), std::nullopt};
      throw SolverError("state blow-up at step " + std::to_string(i + 1), std::move(partial));
    }
    x.col(i + 1) = next;
    const Adjoint l = lam.col(n - i);
    lam.col(n - i - 1) = l - h * adjoint_rhs(p, next, l, u(0, i), u(1, i));
    u.col(i + 1) = optimal_controls(p, next, lam.col(n - i - 1));
  }

  SweepSolution sol;
  sol.trajectory = Trajectory{grid, x, u, lam};
  sol.iterations = 1;
  sol.final_delta = relative_change(characterize_controls(p, x, lam), u);
  sol.converged = sol.final_delta <= cfg.tol;
  sol.objective = objective_value(p, sol.trajectory);
  return sol;
}

SimulationResult forward(const Params& p, const State& s0, const TimeGrid& grid, const ControlSchedule& u,
                         Integrator method) {
  SimulationResult run = integrate(p, s0, grid, u, method);
  if (run.monitor.blowup) {
    throw SolverError("state blow-up at step " + std::to_string(run.monitor.blowup_step), run.trajectory);
  }
  return run;
}

SweepSolution iterated(const Params& p, const State& s0, const TimeGrid& grid, const SweepConfig& cfg,
                       Integrator method) {
  ControlSchedule u = ControlSchedule::Zero(2, grid.nodes());
  SweepSolution sol;
  for (int k = 1; k <= cfg.max_iters; ++k) {
    const SimulationResult run = forward(p, s0, grid, u, method);
    const StateSamples lam = backward_adjoint(p, run.trajectory.states, u, grid, method);
    const ControlSchedule target = characterize_controls(p, run.trajectory.states, lam);
    const double delta = relative_change(target, u);

    sol.trajectory = Trajectory{grid, run.trajectory.states, target, lam};
    sol.iterations = k;
    sol.final_delta = delta;
    if (delta <= cfg.tol) {
      sol.converged = true;
      break;
    }
    u = cfg.relaxation * target + (1.0 - cfg.relaxation) * u;
  }
  sol.objective = objective_value(p, forward(p, s0, grid, *sol.trajectory.controls, method).trajectory);
  return sol;
}

}  // namespace

SweepSolution solve(const Params& p, const State& s0, const TimeGrid& grid, const SweepConfig& cfg,
                    Integrator method) {
  validate(p);
  grid.validate();
  cfg.validate();
  detail::require_finite(s0, "initial state");
  if ((s0.array() < 0.0).any()) throw DomainError("initial state must be nonnegative");
  if (cfg.mode == SweepMode::PaperSinglePass) return single_pass(p, s0, grid, cfg);
  return iterated(p, s0, grid, cfg, method);
}

}  // namespace hiv

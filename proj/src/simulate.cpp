#include "hiv/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hiv {

void TimeGrid::validate() const {
  if (!std::isfinite(t0) || !std::isfinite(tf) || !(tf > t0)) throw DomainError("time grid needs finite tf > t0");
  if (n < 1) throw DomainError("time grid needs at least one step");
}

State advance(const Params& p, const State& s, const Eigen::Vector2d& u_left, const Eigen::Vector2d& u_right, double h,
              Integrator method) {
  if (method == Integrator::Euler) return s + h * rhs_controlled(p, s, u_left[0], u_left[1]);

  const Eigen::Vector2d u_mid = 0.5 * (u_left + u_right);
  const State k1 = rhs_controlled(p, s, u_left[0], u_left[1]);
  const State k2 = rhs_controlled<double>(p, s + 0.5 * h * k1, u_mid[0], u_mid[1]);
  const State k3 = rhs_controlled<double>(p, s + 0.5 * h * k2, u_mid[0], u_mid[1]);
  const State k4 = rhs_controlled<double>(p, s + h * k3, u_right[0], u_right[1]);
  return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

SimulationResult integrate(const Params& p, const State& s0, const TimeGrid& grid,
                           const std::optional<ControlSchedule>& schedule, Integrator method) {
  grid.validate();
  detail::require_finite(s0, "initial state");
  if ((s0.array() < 0.0).any()) throw DomainError("initial state must be nonnegative");
  if (schedule) {
    if (schedule->cols() != grid.nodes()) {
      throw DomainError("control schedule has " + std::to_string(schedule->cols()) + " columns, grid has " +
                        std::to_string(grid.nodes()) + " nodes");
    }
    if (!schedule->allFinite() || (schedule->array() < 0.0).any() || (schedule->array() > 1.0).any()) {
      throw DomainError("control schedule values must lie in [0,1]");
    }
  }

  const double h = grid.step();
  const double delta = std::min(p.d, p.a);
  const double bound = delta > 0.0 ? s0[kX] + s0[kY] + p.lambda / delta + kBoundSlack
                                   : std::numeric_limits<double>::infinity();

  SimulationResult result;
  Trajectory& traj = result.trajectory;
  MonitorReport& monitor = result.monitor;
  traj.grid = grid;
  traj.states.resize(5, grid.nodes());
  traj.states.col(0) = s0;
  monitor.min_component = s0.minCoeff();
  if (s0[kX] + s0[kY] > bound) ++monitor.bound_violations;

  const Eigen::Vector2d zero = Eigen::Vector2d::Zero();
  State s = s0;
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    const Eigen::Vector2d u_left = schedule ? Eigen::Vector2d(schedule->col(i)) : zero;
    const Eigen::Vector2d u_right = schedule ? Eigen::Vector2d(schedule->col(i + 1)) : zero;
    State next;
    try {
      next = advance(p, s, u_left, u_right, h, method);
    } catch (const DomainError&) {
      next.setConstant(std::numeric_limits<double>::quiet_NaN());
    }
    if (!next.allFinite()) {
      monitor.blowup = true;
      monitor.blowup_step = i + 1;
      traj.states.conservativeResize(Eigen::NoChange, i + 1);
      break;
    }
    monitor.min_component = std::min(monitor.min_component, next.minCoeff());
    if (next.minCoeff() < -kClampTolerance) ++monitor.negative_samples;
    for (Eigen::Index k = 0; k < 5; ++k) {
      if (next[k] < 0.0 && next[k] >= -kClampTolerance) next[k] = 0.0;
    }
    if (next[kX] + next[kY] > bound) ++monitor.bound_violations;
    traj.states.col(i + 1) = next;
    s = next;
  }

  if (schedule) traj.controls = schedule->leftCols(traj.samples());
  return result;
}

double objective_value(const Params& p, const Trajectory& trajectory) {
  if (!trajectory.controls) throw ContractError("objective needs a trajectory with controls");
  const StateSamples& s = trajectory.states;
  const ControlSchedule& u = *trajectory.controls;
  if (u.cols() != s.cols()) throw ContractError("control and state sample counts differ");
  if (s.cols() < 2) return 0.0;

  const Eigen::ArrayXd integrand = (s.row(kX) + s.row(kZ) + s.row(kW)).transpose().array() -
                                   0.5 * p.costA1 * u.row(0).transpose().array().square() -
                                   0.5 * p.costA2 * u.row(1).transpose().array().square();
  const Eigen::Index last = integrand.size() - 1;
  return trajectory.grid.step() * (integrand.sum() - 0.5 * (integrand[0] + integrand[last]));
}

}  // namespace hiv

#ifndef HIV_SIMULATE_HPP
#define HIV_SIMULATE_HPP

#include <optional>

#include <Eigen/Dense>

#include "hiv/model.hpp"

namespace hiv {

/// Uniform grid t_i = t0 + i (tf - t0) / n, i = 0..n.
struct TimeGrid {
  double t0 = 0.0;
  double tf = 1.0;
  Eigen::Index n = 1;

  double step() const { return (tf - t0) / static_cast<double>(n); }
  double time(Eigen::Index i) const { return t0 + (tf - t0) * (static_cast<double>(i) / static_cast<double>(n)); }
  Eigen::Index nodes() const { return n + 1; }

  /// Throws DomainError unless tf > t0 and n >= 1.
  void validate() const;

  bool operator==(const TimeGrid&) const = default;
};

using StateSamples = Eigen::Matrix<double, 5, Eigen::Dynamic>;
/// Row 0 is u1, row 1 is u2; one column per grid node.
using ControlSchedule = Eigen::Matrix<double, 2, Eigen::Dynamic>;

struct Trajectory {
  TimeGrid grid;
  StateSamples states;                       ///< n+1 columns unless the run blew up
  std::optional<ControlSchedule> controls;   ///< present for treated runs
  std::optional<StateSamples> adjoints;      ///< present for optimal-control output

  Eigen::Index samples() const { return states.cols(); }
  State state(Eigen::Index i) const { return states.col(i); }
};

/// Runtime checks of nonnegativity and the x + y bound x(0) + y(0) + lambda / min(d, a).
struct MonitorReport {
  double min_component = 0.0;       ///< smallest component seen before round-off clamping
  Eigen::Index bound_violations = 0;
  Eigen::Index negative_samples = 0;  ///< samples with a component below -kClampTolerance
  bool blowup = false;
  Eigen::Index blowup_step = -1;      ///< grid index of the first non-finite state
};

enum class Integrator { Euler, RK4 };

/// Negative components in [-kClampTolerance, 0) are round-off and reset to zero.
inline constexpr double kClampTolerance = 1e-9;
/// Slack added to the x + y bound before a sample counts as a violation.
inline constexpr double kBoundSlack = 1e-6;

struct SimulationResult {
  Trajectory trajectory;
  MonitorReport monitor;
};

/**
 * One step of the treated system from `s` over `h`.
 *
 * Controls are given at the left and right grid nodes. Euler uses the left
 * value only; RK4 uses the left value for its first stage, the midpoint
 * average for the two middle stages and the right value for the last.
 */
State advance(const Params& p, const State& s, const Eigen::Vector2d& u_left, const Eigen::Vector2d& u_right, double h,
              Integrator method);

/**
 * Fixed-step forward integration.
 *
 * `schedule`, when given, holds one (u1, u2) column per grid node; absent means
 * an untreated run. A non-finite state aborts the run: the monitor reports the
 * step and the trajectory keeps the finite prefix.
 */
SimulationResult integrate(const Params& p, const State& s0, const TimeGrid& grid,
                           const std::optional<ControlSchedule>& schedule = std::nullopt,
                           Integrator method = Integrator::RK4);

/// Composite trapezoid of x + z + w - (A1/2 u1^2 + A2/2 u2^2) over the grid.
/// Throws ContractError for trajectories without controls.
double objective_value(const Params& p, const Trajectory& trajectory);

}  // namespace hiv

#endif  // HIV_SIMULATE_HPP

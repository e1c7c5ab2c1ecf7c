#ifndef HIV_CONTROL_HPP
#define HIV_CONTROL_HPP

#include <algorithm>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "hiv/model.hpp"
#include "hiv/simulate.hpp"

namespace hiv {

/**
 * Pointwise Hamiltonian
 *   H = A1/2 u1^2 + A2/2 u2^2 - x - z - w + sum_i lam_i f_i(s, u)
 * where f is the treated vector field. Optimal controls minimize H pointwise,
 * which maximizes the treatment objective.
 */
template <typename Scalar>
Scalar hamiltonian(const ModelParams<Scalar>& p, const StateVector<Scalar>& s, const StateVector<Scalar>& lam, Scalar u1,
                   Scalar u2) {
  detail::require_finite(lam, "adjoint");
  const StateVector<Scalar> f = rhs_controlled(p, s, u1, u2);
  return Scalar(0.5) * p.costA1 * u1 * u1 + Scalar(0.5) * p.costA2 * u2 * u2 - s[kX] - s[kZ] - s[kW] + lam.dot(f);
}

/// Costate dynamics lam' = -dH/d(state).
template <typename Scalar>
StateVector<Scalar> adjoint_rhs(const ModelParams<Scalar>& p, const StateVector<Scalar>& s,
                                const StateVector<Scalar>& lam, Scalar u1, Scalar u2) {
  detail::require_finite(s, "state");
  detail::require_finite(lam, "adjoint");
  detail::require_control(u1, "u1");
  detail::require_control(u2, "u2");
  const Scalar x = s[kX], y = s[kY], v = s[kV], z = s[kZ], w = s[kW];
  const Scalar l1 = lam[0], l2 = lam[1], l3 = lam[2], l4 = lam[3], l5 = lam[4];
  const Scalar open1 = Scalar(1) - u1;
  const Scalar open2 = Scalar(1) - u2;
  StateVector<Scalar> dl;
  dl[0] = Scalar(1) + l1 * (p.d + open1 * p.beta * v) - l2 * open1 * p.beta * v - l4 * p.c * y * z - l5 * p.g * v * w;
  dl[1] = l2 * (p.a + p.p * z) - l3 * open2 * p.a * p.bigN - l4 * p.c * x * z;
  dl[2] = l1 * open1 * p.beta * x - l2 * open1 * p.beta * x + l3 * (p.mu + p.q * w) - l5 * p.g * x * w;
  dl[3] = Scalar(1) + l2 * p.p * y + l4 * (p.h - p.c * x * y);
  dl[4] = Scalar(1) + l3 * p.q * v + l5 * (p.alpha - p.g * x * v);
  return dl;
}

/// (dH/du1, dH/du2) = (A1 u1 + (l1 - l2) beta x v, A2 u2 - l3 a N y).
inline Eigen::Vector2d hamiltonian_gradient(const Params& p, const State& s, const Adjoint& lam, double u1, double u2) {
  const double xv = s[kX] * s[kV];
  return {p.costA1 * u1 + (lam[0] - lam[1]) * p.beta * xv, p.costA2 * u2 - lam[2] * p.a * p.bigN * s[kY]};
}

/// Stationary point of H in u, clamped to [0,1]^2.
inline Eigen::Vector2d optimal_controls(const Params& p, const State& s, const Adjoint& lam) {
  const double r1 = (p.beta / p.costA1) * ((lam[1] - lam[0]) * s[kX] * s[kV]);
  const double r2 = (1.0 / p.costA2) * lam[2] * p.a * p.bigN * s[kY];
  return {std::min(1.0, std::max(0.0, r1)), std::min(1.0, std::max(0.0, r2))};
}

enum class SweepMode {
  PaperSinglePass,  ///< one interleaved Euler loop: state forward, adjoint backward, control update
  IteratedFBSM      ///< forward state, backward adjoint, relaxed control update, repeated to a fixed point
};

struct SweepConfig {
  int max_iters = 200;
  double tol = 1e-4;         ///< on the relative sup-norm control change
  double relaxation = 0.5;   ///< weight on the new characterization in each update
  SweepMode mode = SweepMode::IteratedFBSM;

  void validate() const;
  bool operator==(const SweepConfig&) const = default;
};

struct SweepSolution {
  Trajectory trajectory;  ///< carries controls and adjoints
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double final_delta = 0.0;
};

/// State blow-up during a sweep; keeps the finite part of the offending forward run.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, Trajectory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}

  const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

/// Relative sup-norm distance ||next - prev|| / max(||next||, ||prev||); zero when both vanish.
double relative_change(const ControlSchedule& next, const ControlSchedule& prev);

/**
 * Backward costate solve from lam(tf) = 0 over the nodes of `states`, using the
 * same scheme as the forward run. For RK4 the state and controls at half steps
 * are the averages of the neighbouring nodes.
 */
StateSamples backward_adjoint(const Params& p, const StateSamples& states, const ControlSchedule& controls,
                              const TimeGrid& grid, Integrator method);

/// optimal_controls applied at every node.
ControlSchedule characterize_controls(const Params& p, const StateSamples& states, const StateSamples& adjoints);

/**
 * Two-drug optimal schedule by the forward-backward sweep, starting from zero controls.
 *
 * IteratedFBSM stops when the characterization evaluated on the current
 * forward/backward pair differs from the current controls by at most `tol`
 * (relative sup norm). The returned controls are that characterization, so
 * they satisfy the clamped optimality condition exactly against the returned
 * state and adjoint, which were produced by controls within `tol` of them.
 * `objective` is evaluated on a fresh forward run with the returned controls.
 *
 * PaperSinglePass ignores `method` and runs one interleaved explicit-Euler
 * loop; `final_delta` is then the distance between the stored controls and
 * their characterization on the stored state/adjoint.
 */
SweepSolution solve(const Params& p, const State& s0, const TimeGrid& grid, const SweepConfig& cfg = {},
                    Integrator method = Integrator::RK4);

}  // namespace hiv

#endif  // HIV_CONTROL_HPP

#include "doctest.h"

#include "hiv/analysis.hpp"
#include "hiv/simulate.hpp"
#include "support/oracles.hpp"
#include "support/stepping.hpp"

using namespace hiv;

namespace {

State endpoint(const Params& p, double tf, Eigen::Index n, Integrator method) {
  return integrate(p, reference_initial_state(), TimeGrid{0.0, tf, n}, std::nullopt, method).trajectory.states.rightCols<1>();
}

double observed_order(const Params& p, double tf, Eigen::Index n, Integrator method) {
  const State a = endpoint(p, tf, n, method);
  const State b = endpoint(p, tf, 2 * n, method);
  const State c = endpoint(p, tf, 4 * n, method);
  return std::log2((a - b).norm() / (b - c).norm());
}

}  // namespace

TEST_CASE("time grid") {
  const TimeGrid grid{0.0, 10.0, 4};
  CHECK(grid.step() == 2.5);
  CHECK(grid.nodes() == 5);
  CHECK(grid.time(4) == 10.0);
  CHECK_THROWS_AS((TimeGrid{1.0, 1.0, 4}.validate()), DomainError);
  CHECK_THROWS_AS((TimeGrid{0.0, 1.0, 0}.validate()), DomainError);
}

TEST_CASE("untreated run settles on the endemic point") {
  const Params p = reference_parameters();
  const SimulationResult run = integrate(p, reference_initial_state(), TimeGrid{0.0, 500.0, 100000});
  REQUIRE(run.trajectory.samples() == 100001);
  const State end = run.trajectory.states.rightCols<1>();
  const State e4{7.6923, 0.8666, 120.0, 66.2721, 48.888};
  for (int k = 0; k < 5; ++k) CHECK(std::abs(end[k] - e4[k]) <= 0.01 * e4[k]);
  CHECK_FALSE(run.monitor.blowup);
  CHECK(run.monitor.negative_samples == 0);
  CHECK(run.monitor.bound_violations == 0);
  CHECK_FALSE(run.trajectory.controls.has_value());
}

TEST_CASE("a steady start stays put") {
  oracle::ParameterSampler sampler(31);
  for (int i = 0; i < 10; ++i) {
    const Params p = sampler.draw();
    const State ef = equilibrium_point(p, EquilibriumLabel::Ef);
    for (Integrator method : {Integrator::Euler, Integrator::RK4}) {
      const SimulationResult run = integrate(p, ef, TimeGrid{0.0, 20.0, 200}, std::nullopt, method);
      for (Eigen::Index j = 0; j < run.trajectory.samples(); ++j) {
        CHECK((run.trajectory.state(j) - ef).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, ef[kX]));
      }
    }
  }
}

TEST_CASE("Euler halves its error when the step halves") {
  const Params p = reference_parameters();
  const State rk4 = endpoint(p, 1.0, 4000, Integrator::RK4);
  const double e1 = (endpoint(p, 1.0, 1000, Integrator::Euler) - rk4).norm();
  const double e2 = (endpoint(p, 1.0, 2000, Integrator::Euler) - rk4).norm();
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("observed convergence orders") {
  const Params p = reference_parameters();
  CHECK(std::abs(observed_order(p, 1.0, 1000, Integrator::Euler) - 1.0) <= 0.3);
  CHECK(std::abs(observed_order(p, 1.0, 20, Integrator::RK4) - 4.0) <= 0.3);
}

TEST_CASE("objective quadrature") {
  Params p = reference_parameters();
  SUBCASE("constant integrand one") {
    Trajectory t;
    t.grid = TimeGrid{0.0, 10.0, 10};
    t.states = StateSamples::Zero(5, 11);
    t.states.row(kX).setOnes();
    t.controls = ControlSchedule::Zero(2, 11);
    CHECK(objective_value(p, t) == doctest::Approx(10.0).epsilon(1e-14));
  }
  SUBCASE("full first drug only") {
    p.costA1 = 250.0;
    Trajectory t;
    t.grid = TimeGrid{0.0, 2.0, 7};
    t.states = StateSamples::Zero(5, 8);
    t.controls = ControlSchedule::Zero(2, 8);
    t.controls->row(0).setOnes();
    CHECK(objective_value(p, t) == doctest::Approx(-250.0).epsilon(1e-14));
  }
  SUBCASE("untreated trajectory is a contract error") {
    const SimulationResult run = integrate(p, reference_initial_state(), TimeGrid{0.0, 1.0, 10});
    CHECK_THROWS_AS(objective_value(p, run.trajectory), ContractError);
  }
}

TEST_CASE("an all-zero schedule reproduces the untreated run exactly") {
  const Params p = reference_parameters();
  const TimeGrid grid{0.0, 30.0, 3000};
  for (Integrator method : {Integrator::Euler, Integrator::RK4}) {
    const SimulationResult a = integrate(p, reference_initial_state(), grid, std::nullopt, method);
    const SimulationResult b = integrate(p, reference_initial_state(), grid, ControlSchedule::Zero(2, grid.nodes()), method);
    CHECK((a.trajectory.states.array() == b.trajectory.states.array()).all());
    REQUIRE(b.trajectory.controls.has_value());
  }
}

TEST_CASE("treatment lowers the viral load") {
  const Params p = reference_parameters();
  const TimeGrid grid{0.0, 50.0, 5000};
  ControlSchedule u = ControlSchedule::Zero(2, grid.nodes());
  u.row(0).setConstant(0.5);
  const SimulationResult off = integrate(p, reference_initial_state(), grid);
  const SimulationResult on = integrate(p, reference_initial_state(), grid, u);
  CHECK(on.trajectory.states(kV, grid.n) < off.trajectory.states(kV, grid.n));
}

TEST_CASE("schedule and initial state are validated") {
  const Params p = reference_parameters();
  const TimeGrid grid{0.0, 1.0, 10};
  CHECK_THROWS_AS(integrate(p, reference_initial_state(), grid, ControlSchedule::Zero(2, 10)), DomainError);
  ControlSchedule u = ControlSchedule::Zero(2, 11);
  u(1, 3) = 1.2;
  CHECK_THROWS_AS(integrate(p, reference_initial_state(), grid, u), DomainError);
  State s0 = reference_initial_state();
  s0[kZ] = -1.0;
  CHECK_THROWS_AS(integrate(p, s0, grid), DomainError);
}

TEST_CASE("a blow-up keeps the finite prefix") {
  Params p = reference_parameters();
  p.beta = 0.5;
  p.bigN = 1e6;
  const SimulationResult run = integrate(p, reference_initial_state(), TimeGrid{0.0, 100.0, 10});
  REQUIRE(run.monitor.blowup);
  CHECK(run.monitor.blowup_step >= 1);
  CHECK(run.trajectory.samples() == run.monitor.blowup_step);
  CHECK(run.trajectory.states.allFinite());
}

TEST_CASE("random runs stay nonnegative and bounded") {
  oracle::ParameterSampler sampler(32);
  for (int i = 0; i < 25; ++i) {
    const Params p = sampler.draw();
    State s0;
    for (int k = 0; k < 5; ++k) s0[k] = sampler.log_uniform(0.1, 10.0);
    const SimulationResult run = integrate(p, s0, oracle::stable_grid(p, s0, 30.0));
    CHECK_FALSE(run.monitor.blowup);
    CHECK(run.monitor.min_component >= -kClampTolerance);
    CHECK(run.monitor.bound_violations == 0);
    CHECK(run.trajectory.states.minCoeff() >= 0.0);
  }
}

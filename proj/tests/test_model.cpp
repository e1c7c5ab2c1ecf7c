#include "doctest.h"

#include "hiv/model.hpp"
#include "support/oracles.hpp"

using namespace hiv;

TEST_CASE("untreated field vanishes near the printed endemic point") {
  const Params p = reference_parameters();
  // Coordinates as printed (truncated, not rounded, to the shown digits).
  const State printed{7.6923, 0.8666, 120.0, 66.2721, 48.888};
  const State unit{1e-4, 1e-4, 1e-4, 1e-4, 1e-3};
  const State f = rhs_uncontrolled(p, printed);
  const State bound = jacobian(p, printed).cwiseAbs() * unit;
  for (int k = 0; k < 5; ++k) CHECK(std::abs(f[k]) <= bound[k]);
  // Components without the large a*N coupling meet the tighter 1e-2 bound.
  CHECK(std::abs(f[kX]) < 1e-2);
  CHECK(std::abs(f[kY]) < 1e-2);
  CHECK(std::abs(f[kZ]) < 1e-2);
  CHECK(std::abs(f[kW]) < 1e-2);
}

TEST_CASE("untreated field at the origin is the source term only") {
  oracle::ParameterSampler sampler(11);
  for (int i = 0; i < 10; ++i) {
    const Params p = sampler.draw();
    const State f = rhs_uncontrolled(p, State(State::Zero()));
    CHECK(f[kX] == p.lambda);
    CHECK(f.tail<4>().isZero(0.0));
  }
}

TEST_CASE("disease-free point is an exact rest point") {
  const Params p = reference_parameters();
  const State ef{10.0, 0.0, 0.0, 0.0, 0.0};
  CHECK(rhs_uncontrolled(p, ef).isZero(0.0));
}

TEST_CASE("non-finite state is rejected with the component name") {
  const Params p = reference_parameters();
  State s{1.0, 1.0, std::numeric_limits<double>::quiet_NaN(), 1.0, 1.0};
  try {
    rhs_uncontrolled(p, s);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("component v") != std::string::npos);
  }
  s[kV] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(jacobian(p, s), DomainError);
}

TEST_CASE("treated field with zero controls is bit-identical to the untreated field") {
  oracle::ParameterSampler sampler(12);
  for (int i = 0; i < 50; ++i) {
    const Params p = sampler.draw();
    State s;
    for (int k = 0; k < 5; ++k) s[k] = sampler.log_uniform(1e-3, 1e3);
    const State a = rhs_controlled(p, s, 0.0, 0.0);
    const State b = rhs_uncontrolled(p, s);
    for (int k = 0; k < 5; ++k) CHECK(a[k] == b[k]);
  }
}

TEST_CASE("full infection blocking removes the infection term") {
  const Params p = reference_parameters();
  const State f = rhs_controlled(p, State{10.0, 0.0, 1.0, 0.0, 0.0}, 1.0, 0.0);
  CHECK(std::abs(f[kX]) < 1e-15);
  CHECK(f[kY] == 0.0);
}

TEST_CASE("full production inhibition leaves only virion losses") {
  const Params p = reference_parameters();
  const State f = rhs_controlled(p, State{5.0, 1.0, 1.0, 2.0, 1.0}, 0.0, 1.0);
  // -mu*1 - q*1*1
  CHECK(f[kV] == doctest::Approx(-2.41).epsilon(1e-14));
}

TEST_CASE("controls outside [0,1] are rejected") {
  const Params p = reference_parameters();
  const State s = reference_initial_state();
  CHECK_THROWS_AS(rhs_controlled(p, s, -0.1, 0.0), DomainError);
  CHECK_THROWS_AS(rhs_controlled(p, s, 0.0, 1.5), DomainError);
  CHECK_THROWS_AS(rhs_controlled(p, s, std::numeric_limits<double>::quiet_NaN(), 0.0), DomainError);
}

TEST_CASE("Jacobian at the disease-free point has the block structure") {
  const Params p = reference_parameters();
  const Jacobian J = jacobian(p, State{10.0, 0.0, 0.0, 0.0, 0.0});
  CHECK(J(0, 0) == -p.d);
  CHECK(J(0, 2) == doctest::Approx(-p.beta * 10.0));
  CHECK(J(1, 2) == doctest::Approx(p.beta * 10.0));
  CHECK(J(2, 1) == doctest::Approx(p.a * p.bigN));
  CHECK(J(2, 2) == -p.mu);
  CHECK(J(3, 3) == -p.h);
  CHECK(J(4, 4) == -p.alpha);
  // rows for z and w are diagonal
  CHECK(J.row(3).cwiseAbs().sum() == doctest::Approx(p.h));
  CHECK(J.row(4).cwiseAbs().sum() == doctest::Approx(p.alpha));
}

TEST_CASE("Jacobian matches central differences") {
  const Params p = reference_parameters();
  const State s{5.0, 1.0, 1.0, 2.0, 1.0};
  const oracle::Mat5 fd = oracle::fd_jacobian([&](const oracle::Vec5& x) { return rhs_uncontrolled(p, State(x)); }, s);
  const Jacobian J = jacobian(p, s);
  const double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
  CHECK((J - fd).cwiseAbs().maxCoeff() / scale < 1e-6);
}

TEST_CASE("Jacobian matches central differences over random draws") {
  oracle::ParameterSampler sampler(13);
  for (int i = 0; i < 100; ++i) {
    const Params p = sampler.draw();
    State s;
    for (int k = 0; k < 5; ++k) s[k] = sampler.log_uniform(1e-2, 1e2);
    const oracle::Mat5 fd =
        oracle::fd_jacobian([&](const oracle::Vec5& x) { return rhs_uncontrolled(p, State(x)); }, s);
    const Jacobian J = jacobian(p, s);
    const double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
    CHECK((J - fd).cwiseAbs().maxCoeff() / scale < 1e-5);
  }
}

TEST_CASE("templated field evaluates in long double") {
  const ModelParams<long double> p = reference_parameters().cast<long double>();
  const StateVector<long double> s = reference_initial_state().cast<long double>();
  const StateVector<long double> f = rhs_uncontrolled(p, s);
  const State fd = rhs_uncontrolled(reference_parameters(), reference_initial_state());
  CHECK(static_cast<double>(f[kV]) == doctest::Approx(fd[kV]));
}

TEST_CASE("parameter validation names the field") {
  Params p = reference_parameters();
  p.beta = -1.0;
  try {
    validate(p);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("beta") != std::string::npos);
  }
  p = reference_parameters();
  p.costA2 = 0.0;
  CHECK_THROWS_AS(validate(p), DomainError);
  CHECK_NOTHROW(validate(reference_parameters()));
}

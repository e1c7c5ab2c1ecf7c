#ifndef HIV_MODEL_HPP
#define HIV_MODEL_HPP

#include <array>
#include <cmath>
#include <string>
#include <type_traits>

#include <Eigen/Dense>

#include "hiv/errors.hpp"

namespace hiv {

// Compartment order: uninfected cells, infected cells, free virus, CTLs, antibodies.
enum Compartment : Eigen::Index { kX = 0, kY = 1, kV = 2, kZ = 3, kW = 4 };

inline constexpr std::array<const char*, 5> kCompartmentNames = {"x", "y", "v", "z", "w"};

template <typename Scalar>
using StateVector = Eigen::Matrix<Scalar, 5, 1>;

template <typename Scalar>
using JacobianMatrix = Eigen::Matrix<Scalar, 5, 5>;

using State = StateVector<double>;
/// Costate vector (l1..l5), one multiplier per compartment.
using Adjoint = StateVector<double>;
using Jacobian = JacobianMatrix<double>;

/**
 * Biological rates of the five-compartment model plus the two treatment cost weights.
 *
 * All rates are per day except `bigN` (virions per infected cell). Rates are
 * nonnegative; the cost weights are strictly positive.
 */
template <typename Scalar>
struct ModelParams {
  Scalar lambda{};  ///< source rate of healthy CD4+ cells
  Scalar d{};       ///< healthy-cell decay
  Scalar beta{};    ///< infection rate
  Scalar a{};       ///< infected-cell death
  Scalar p{};       ///< CTL killing rate
  Scalar mu{};      ///< virus clearance
  Scalar bigN{};    ///< burst size
  Scalar q{};       ///< virion neutralization by antibodies
  Scalar c{};       ///< CTL activation
  Scalar h{};       ///< CTL death
  Scalar g{};       ///< antibody activation
  Scalar alpha{};   ///< antibody death
  Scalar costA1{};  ///< weight on u1^2 (infection-blocking drug)
  Scalar costA2{};  ///< weight on u2^2 (production-inhibiting drug)

  template <typename Other>
  ModelParams<Other> cast() const {
    return {Other(lambda), Other(d),    Other(beta), Other(a), Other(p),     Other(mu),     Other(bigN),
            Other(q),      Other(c),    Other(h),    Other(g), Other(alpha), Other(costA1), Other(costA2)};
  }

  bool operator==(const ModelParams&) const = default;
};

using Params = ModelParams<double>;

/// The reference scenario: lambda=1, d=0.1, beta=2.5e-4, a=0.2, p=1e-3, mu=2.4,
/// N=2000, q=0.01, c=0.03, h=0.2, g=1.3e-4, alpha=0.12, A1=250, A2=2500.
inline Params reference_parameters() {
  Params p;
  p.lambda = 1.0;
  p.d = 0.1;
  p.beta = 0.00025;
  p.a = 0.2;
  p.p = 0.001;
  p.mu = 2.4;
  p.bigN = 2000.0;
  p.q = 0.01;
  p.c = 0.03;
  p.h = 0.2;
  p.g = 0.00013;
  p.alpha = 0.12;
  p.costA1 = 250.0;
  p.costA2 = 2500.0;
  return p;
}

/// Initial condition (x, y, v, z, w) = (5, 1, 1, 2, 1) used with the reference parameters.
inline State reference_initial_state() { return State{5.0, 1.0, 1.0, 2.0, 1.0}; }

/// Named view over the parameter fields, in declaration order. Used by
/// validation, config I/O and parameter sweeps.
inline constexpr std::array<const char*, 14> kParamNames = {
    "lambda", "d", "beta", "a", "p", "mu", "N", "q", "c", "h", "g", "alpha", "A1", "A2"};

inline double& param_field(Params& p, std::size_t index) {
  std::array<double*, 14> fields = {&p.lambda, &p.d, &p.beta, &p.a,     &p.p,     &p.mu,     &p.bigN,
                                    &p.q,      &p.c, &p.h,    &p.g,     &p.alpha, &p.costA1, &p.costA2};
  return *fields.at(index);
}

inline double param_field(const Params& p, std::size_t index) {
  return param_field(const_cast<Params&>(p), index);
}

/// Index into kParamNames, or -1 when `name` is not a parameter. The struct
/// member spellings bigN, costA1 and costA2 are accepted as well.
inline int param_index(const std::string& name) {
  for (std::size_t i = 0; i < kParamNames.size(); ++i) {
    if (name == kParamNames[i]) return static_cast<int>(i);
  }
  if (name == "bigN") return 6;
  if (name == "costA1") return 12;
  if (name == "costA2") return 13;
  return -1;
}

/// Throws DomainError naming the first field that is non-finite, a negative
/// rate, or a non-positive cost weight.
inline void validate(const Params& p) {
  for (std::size_t i = 0; i < kParamNames.size(); ++i) {
    const double value = param_field(p, i);
    const std::string name = kParamNames[i];
    if (!std::isfinite(value)) throw DomainError("parameter " + name + " is not finite");
    if (i >= 12) {
      if (!(value > 0.0)) throw DomainError("cost weight " + name + " must be positive");
    } else if (value < 0.0) {
      throw DomainError("rate " + name + " must be nonnegative");
    }
  }
}

namespace detail {

template <typename Scalar>
void require_finite(const StateVector<Scalar>& s, const char* what) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    for (Eigen::Index i = 0; i < 5; ++i) {
      if (!std::isfinite(s[i])) {
        throw DomainError(std::string(what) + " component " + kCompartmentNames[i] + " is not finite");
      }
    }
  }
}

template <typename Scalar>
void require_control(Scalar u, const char* name) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    if (!(u >= Scalar(0) && u <= Scalar(1))) {
      throw DomainError(std::string("control ") + name + " outside [0,1]");
    }
  }
}

template <typename Scalar>
StateVector<Scalar> vector_field(const ModelParams<Scalar>& p, const StateVector<Scalar>& s, Scalar u1, Scalar u2) {
  const Scalar x = s[kX], y = s[kY], v = s[kV], z = s[kZ], w = s[kW];
  const Scalar infection = p.beta * (Scalar(1) - u1) * x * v;
  StateVector<Scalar> ds;
  ds[kX] = p.lambda - p.d * x - infection;
  ds[kY] = infection - p.a * y - p.p * y * z;
  ds[kV] = p.a * p.bigN * (Scalar(1) - u2) * y - p.mu * v - p.q * v * w;
  ds[kZ] = p.c * x * y * z - p.h * z;
  ds[kW] = p.g * x * v * w - p.alpha * w;
  return ds;
}

}  // namespace detail

/// Treated vector field; u1 scales the infection term by (1-u1), u2 the virion production by (1-u2).
template <typename Scalar>
StateVector<Scalar> rhs_controlled(const ModelParams<Scalar>& p, const StateVector<Scalar>& s, Scalar u1, Scalar u2) {
  detail::require_finite(s, "state");
  detail::require_control(u1, "u1");
  detail::require_control(u2, "u2");
  return detail::vector_field(p, s, u1, u2);
}

template <typename Scalar>
StateVector<Scalar> rhs_uncontrolled(const ModelParams<Scalar>& p, const StateVector<Scalar>& s) {
  detail::require_finite(s, "state");
  return detail::vector_field(p, s, Scalar(0), Scalar(0));
}

/// Jacobian of the untreated field with respect to (x, y, v, z, w).
template <typename Scalar>
JacobianMatrix<Scalar> jacobian(const ModelParams<Scalar>& p, const StateVector<Scalar>& s) {
  detail::require_finite(s, "state");
  const Scalar x = s[kX], y = s[kY], v = s[kV], z = s[kZ], w = s[kW];
  JacobianMatrix<Scalar> J = JacobianMatrix<Scalar>::Zero();
  J(0, 0) = -p.d - p.beta * v;
  J(0, 2) = -p.beta * x;
  J(1, 0) = p.beta * v;
  J(1, 1) = -p.a - p.p * z;
  J(1, 2) = p.beta * x;
  J(1, 3) = -p.p * y;
  J(2, 1) = p.a * p.bigN;
  J(2, 2) = -p.mu - p.q * w;
  J(2, 4) = -p.q * v;
  J(3, 0) = p.c * y * z;
  J(3, 1) = p.c * x * z;
  J(3, 3) = p.c * x * y - p.h;
  J(4, 0) = p.g * v * w;
  J(4, 2) = p.g * x * w;
  J(4, 4) = p.g * x * v - p.alpha;
  return J;
}

}  // namespace hiv

#endif  // HIV_MODEL_HPP

#ifndef HIV_ANALYSIS_HPP
#define HIV_ANALYSIS_HPP

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hiv/model.hpp"

namespace hiv {

/// Reproduction numbers governing which steady states exist and which is stable.
struct Thresholds {
  double r0 = 0.0;      ///< lambda N beta / (d mu)
  double rCtl = 0.0;    ///< with CTL response only
  double rW = 0.0;      ///< with antibody response only
  double rCtlW1 = 0.0;  ///< a N h g / (alpha mu c)
  double rCtlW2 = 0.0;  ///< alpha beta c (lambda g - alpha beta) / (a h d g^2)
};

/// Throws SingularParameterError naming the vanishing denominator.
Thresholds thresholds(const Params& p);

/// Same formulas, but a threshold whose denominator vanishes is NaN instead of an error.
Thresholds thresholds_unchecked(const Params& p);

enum class EquilibriumLabel { Ef, E1, E2, E3, E4 };
enum class Stability { LocallyAsymptoticallyStable, Unstable, Marginal, NotApplicable };

inline constexpr std::array<EquilibriumLabel, 5> kAllEquilibria = {
    EquilibriumLabel::Ef, EquilibriumLabel::E1, EquilibriumLabel::E2, EquilibriumLabel::E3, EquilibriumLabel::E4};

std::string to_string(EquilibriumLabel label);
std::string to_string(Stability stability);

using Spectrum = Eigen::Matrix<std::complex<double>, 5, 1>;

struct EquilibriumReport {
  EquilibriumLabel label = EquilibriumLabel::Ef;
  bool exists = false;
  /// Closed-form coordinates. Filled whenever the formula is defined, even if
  /// the point lies outside the nonnegative orthant (exists == false).
  State point = State::Zero();
  Stability stability = Stability::NotApplicable;
  /// Verdict from the threshold conditions alone; empty when they do not decide.
  std::optional<Stability> analytic;
  Spectrum eigenvalues = Spectrum::Zero();
  Thresholds thresholds;
  /// Why the point does not exist (empty when it does).
  std::string reason;
};

/// Relative equilibrium residual bound: |f(point)|_inf <= kResidualTolerance * max(1, |point|_inf).
inline constexpr double kResidualTolerance = 1e-8;
/// Eigenvalue real parts inside [-kStabilityBand, kStabilityBand] are classified Marginal.
inline constexpr double kStabilityBand = 1e-7;
/// A threshold with |R - 1| below this is treated as sitting on the bifurcation boundary.
inline constexpr double kThresholdBoundary = 1e-12;

/// Closed-form coordinates of a steady state, with no existence check.
State equilibrium_point(const Params& p, EquilibriumLabel label);

/// Existence, coordinates and residual check for one steady state. Stability is left NotApplicable.
EquilibriumReport equilibrium(const Params& p, EquilibriumLabel label);

/// All five steady states in order Ef, E1..E4, each classified.
std::vector<EquilibriumReport> equilibria(const Params& p);

/// Fills eigenvalues, analytic and final stability. Reports with exists == false
/// are returned unchanged.
EquilibriumReport classify_stability(const Params& p, EquilibriumReport report);

/// Threshold-only verdict for an existing steady state; nullopt if the thresholds do not settle it.
std::optional<Stability> analytic_stability(const Thresholds& t, EquilibriumLabel label);

/// Numeric verdict from eigenvalue real parts with the kStabilityBand marginal band.
Stability numeric_stability(const Spectrum& eigenvalues);

Spectrum spectrum(const Jacobian& J);

/**
 * Factored characteristic polynomial of the Jacobian at a steady state.
 *
 * `linear_roots` are the eigenvalues that split off in closed form (e.g. -d,
 * -alpha, -h at the disease-free point). `polynomial` holds the remaining monic
 * factor's coefficients below the leading one, highest degree first, so
 * {A, B, C} means xi^3 + A xi^2 + B xi + C.
 *
 * E4's last two coefficients are the ones obtained by expanding det(xi I - J)
 * at the point; see `quintic_coefficients`.
 */
struct CharacteristicFactorization {
  std::vector<double> linear_roots;
  Eigen::VectorXd polynomial;
};

CharacteristicFactorization characteristic_factorization(const Params& p, EquilibriumLabel label);

/// Coefficients A4..E4 of the full quintic at an arbitrary point satisfying
/// the E4 identities c x y = h and g x v = alpha.
Eigen::Matrix<double, 5, 1> quintic_coefficients(const Params& p, const State& point);

/// Hurwitz test for xi^n + c[0] xi^(n-1) + ... + c[n-1]: true iff every leading
/// principal minor of the Hurwitz matrix is positive.
bool routh_hurwitz_stable(const Eigen::VectorXd& coefficients);

}  // namespace hiv

#endif  // HIV_ANALYSIS_HPP

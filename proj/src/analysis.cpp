#include "hiv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace hiv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ratio_or_nan(double num, double den) { return den == 0.0 ? kNaN : num / den; }

// lambda mu c - a N beta h; positive iff E2 has a positive x-coordinate.
double ctl_margin(const Params& p) { return p.lambda * p.mu * p.c - p.a * p.bigN * p.beta * p.h; }

// lambda g - alpha beta; positive iff E3/E4 have a positive x-coordinate.
double antibody_margin(const Params& p) { return p.lambda * p.g - p.alpha * p.beta; }

void require_nonzero(double value, const char* quantity) {
  if (value == 0.0 || !std::isfinite(value)) throw SingularParameterError(quantity);
}

bool near_one(double r) { return std::abs(r - 1.0) <= kThresholdBoundary; }

// Verdict from the sign of (r - 1) for an eigenvalue proportional to it.
Stability sign_verdict(double r) {
  if (near_one(r)) return Stability::Marginal;
  return r < 1.0 ? Stability::LocallyAsymptoticallyStable : Stability::Unstable;
}

// Combines independent factors: any unstable factor wins, then marginal, else stable.
Stability combine(std::initializer_list<Stability> parts) {
  bool marginal = false;
  for (Stability s : parts) {
    if (s == Stability::Unstable) return Stability::Unstable;
    if (s == Stability::Marginal) marginal = true;
  }
  return marginal ? Stability::Marginal : Stability::LocallyAsymptoticallyStable;
}

double residual_norm(const Params& p, const State& point) {
  return rhs_uncontrolled(p, point).cwiseAbs().maxCoeff();
}

}  // namespace

std::string to_string(EquilibriumLabel label) {
  switch (label) {
    case EquilibriumLabel::Ef: return "Ef";
    case EquilibriumLabel::E1: return "E1";
    case EquilibriumLabel::E2: return "E2";
    case EquilibriumLabel::E3: return "E3";
    case EquilibriumLabel::E4: return "E4";
  }
  return "?";
}

std::string to_string(Stability stability) {
  switch (stability) {
    case Stability::LocallyAsymptoticallyStable: return "LocallyAsymptoticallyStable";
    case Stability::Unstable: return "Unstable";
    case Stability::Marginal: return "Marginal";
    case Stability::NotApplicable: return "NotApplicable";
  }
  return "?";
}

Thresholds thresholds_unchecked(const Params& p) {
  const double S = ctl_margin(p);
  const double T = antibody_margin(p);
  Thresholds t;
  t.r0 = ratio_or_nan(p.lambda * p.bigN * p.beta, p.d * p.mu);
  t.rCtl = ratio_or_nan(p.bigN * p.beta * S, p.mu * (p.d * p.mu * p.c));
  t.rW = ratio_or_nan(p.bigN * p.beta * T, p.mu * p.d * p.g);
  t.rCtlW1 = ratio_or_nan(p.a * p.bigN * p.h * p.g, p.alpha * p.mu * p.c);
  t.rCtlW2 = ratio_or_nan(p.alpha * p.beta * p.c * T, p.a * p.h * p.d * p.g * p.g);
  return t;
}

Thresholds thresholds(const Params& p) {
  require_nonzero(p.d * p.mu, "d*mu");
  require_nonzero(p.d * p.mu * p.c, "d*mu*c");
  require_nonzero(p.mu * p.d * p.g, "mu*d*g");
  require_nonzero(p.alpha * p.mu * p.c, "alpha*mu*c");
  require_nonzero(p.a * p.h * p.d * p.g * p.g, "a*h*d*g^2");
  return thresholds_unchecked(p);
}

State equilibrium_point(const Params& p, EquilibriumLabel label) {
  switch (label) {
    case EquilibriumLabel::Ef: {
      require_nonzero(p.d, "d");
      return State{p.lambda / p.d, 0.0, 0.0, 0.0, 0.0};
    }
    case EquilibriumLabel::E1: {
      require_nonzero(p.d * p.mu, "d*mu");
      require_nonzero(p.a * p.bigN * p.beta, "a*N*beta");
      const double excess = thresholds_unchecked(p).r0 - 1.0;
      return State{p.mu / (p.beta * p.bigN), p.d * p.mu * excess / (p.a * p.bigN * p.beta), p.d * excess / p.beta, 0.0,
                   0.0};
    }
    case EquilibriumLabel::E2: {
      const double S = ctl_margin(p);
      require_nonzero(p.d * p.mu * p.c, "d*mu*c");
      require_nonzero(S, "lambda*mu*c - a*N*beta*h");
      require_nonzero(p.p, "p");
      const double rCtl = thresholds_unchecked(p).rCtl;
      return State{S / (p.d * p.mu * p.c), p.d * p.h * p.mu / S, p.a * p.bigN * p.d * p.h / S, p.a / p.p * (rCtl - 1.0),
                   0.0};
    }
    case EquilibriumLabel::E3: {
      const double T = antibody_margin(p);
      require_nonzero(p.d * p.g, "d*g");
      require_nonzero(p.a * p.g, "a*g");
      require_nonzero(T, "lambda*g - alpha*beta");
      require_nonzero(p.mu * p.d * p.g, "mu*d*g");
      require_nonzero(p.q, "q");
      const double rW = thresholds_unchecked(p).rW;
      return State{T / (p.d * p.g), p.alpha * p.beta / (p.a * p.g), p.alpha * p.d / T, 0.0, p.mu / p.q * (rW - 1.0)};
    }
    case EquilibriumLabel::E4: {
      const double T = antibody_margin(p);
      require_nonzero(p.d * p.g, "d*g");
      require_nonzero(p.c * T, "c*(lambda*g - alpha*beta)");
      require_nonzero(p.alpha * p.mu * p.c, "alpha*mu*c");
      require_nonzero(p.a * p.h * p.d * p.g * p.g, "a*h*d*g^2");
      require_nonzero(p.p, "p");
      require_nonzero(p.q, "q");
      const Thresholds t = thresholds_unchecked(p);
      return State{T / (p.d * p.g), p.h * p.d * p.g / (p.c * T), p.alpha * p.d / T, p.a / p.p * (t.rCtlW2 - 1.0),
                   p.mu / p.q * (t.rCtlW1 - 1.0)};
    }
  }
  throw DomainError("unknown equilibrium label");
}

EquilibriumReport equilibrium(const Params& p, EquilibriumLabel label) {
  EquilibriumReport report;
  report.label = label;
  report.thresholds = thresholds_unchecked(p);
  const Thresholds& t = report.thresholds;

  // Existence predicates are evaluated before the coordinates so that a
  // point that cannot exist never triggers a singular-denominator error.
  switch (label) {
    case EquilibriumLabel::Ef:
      report.exists = true;
      break;
    case EquilibriumLabel::E1:
      report.exists = t.r0 > 1.0;
      if (!report.exists) report.reason = std::isnan(t.r0) ? "R0 undefined (d*mu vanishes)" : "R0 <= 1";
      break;
    case EquilibriumLabel::E2:
      if (!(ctl_margin(p) > 0.0)) {
        report.reason = "lambda*mu*c - a*N*beta*h <= 0";
      } else if (!(t.rCtl > 1.0)) {
        report.reason = std::isnan(t.rCtl) ? "R_CTL undefined (d*mu*c vanishes)" : "R_CTL <= 1";
      } else {
        report.exists = true;
      }
      break;
    case EquilibriumLabel::E3:
      report.exists = t.rW > 1.0;
      if (!report.exists) report.reason = std::isnan(t.rW) ? "R_W undefined (mu*d*g vanishes)" : "R_W <= 1";
      break;
    case EquilibriumLabel::E4:
      if (!(t.rCtlW1 > 1.0)) {
        report.reason = std::isnan(t.rCtlW1) ? "R_CTLW1 undefined (alpha*mu*c vanishes)" : "R_CTLW1 <= 1";
      } else if (!(t.rCtlW2 > 1.0)) {
        report.reason = std::isnan(t.rCtlW2) ? "R_CTLW2 undefined (a*h*d*g^2 vanishes)" : "R_CTLW2 <= 1";
      } else {
        report.exists = true;
      }
      break;
  }

  if (report.exists) {
    report.point = equilibrium_point(p, label);
    const double scale = std::max(1.0, report.point.cwiseAbs().maxCoeff());
    const double residual = residual_norm(p, report.point);
    if (!(residual <= kResidualTolerance * scale)) {
      throw NumericError(to_string(label) + " residual " + std::to_string(residual) + " exceeds tolerance");
    }
  } else {
    try {
      report.point = equilibrium_point(p, label);
    } catch (const SingularParameterError&) {
      report.point = State::Zero();
    }
  }
  return report;
}

std::optional<Stability> analytic_stability(const Thresholds& t, EquilibriumLabel label) {
  switch (label) {
    case EquilibriumLabel::Ef:
      return sign_verdict(t.r0);
    case EquilibriumLabel::E1:
      // The cubic factor is Hurwitz for every R0 > 1.
      return combine({sign_verdict(t.rW), sign_verdict(t.rCtl)});
    case EquilibriumLabel::E2:
      return sign_verdict(t.rCtlW1);
    case EquilibriumLabel::E3:
      return sign_verdict(t.rCtlW2);
    case EquilibriumLabel::E4:
      return Stability::LocallyAsymptoticallyStable;
  }
  return std::nullopt;
}

Spectrum spectrum(const Jacobian& J) {
  Eigen::EigenSolver<Jacobian> solver(J, /* computeEigenvectors = */ false);
  if (solver.info() != Eigen::Success) throw NumericError("eigenvalue computation did not converge");
  Spectrum values = solver.eigenvalues();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
      throw NumericError("eigenvalue computation produced a non-finite value");
    }
  }
  return values;
}

Stability numeric_stability(const Spectrum& eigenvalues) {
  const double max_real = eigenvalues.real().maxCoeff();
  if (max_real < -kStabilityBand) return Stability::LocallyAsymptoticallyStable;
  if (max_real > kStabilityBand) return Stability::Unstable;
  return Stability::Marginal;
}

EquilibriumReport classify_stability(const Params& p, EquilibriumReport report) {
  if (!report.exists) {
    report.stability = Stability::NotApplicable;
    report.analytic.reset();
    return report;
  }
  report.eigenvalues = spectrum(jacobian(p, report.point));
  const Stability numeric = numeric_stability(report.eigenvalues);

  std::optional<Stability> analytic = analytic_stability(report.thresholds, report.label);
  // The threshold conditions speak for the split-off eigenvalues; for E2..E4 the
  // remaining factor is only asserted Hurwitz. When it is not, the thresholds do
  // not decide and the spectrum is authoritative.
  if (analytic == Stability::LocallyAsymptoticallyStable && report.label != EquilibriumLabel::Ef &&
      report.label != EquilibriumLabel::E1) {
    if (!routh_hurwitz_stable(characteristic_factorization(p, report.label).polynomial)) analytic.reset();
  }
  report.analytic = analytic;

  if (analytic && *analytic != Stability::Marginal && numeric != Stability::Marginal && *analytic != numeric) {
    throw ConsistencyError(to_string(report.label) + ": threshold verdict " + to_string(*analytic) +
                           " contradicts eigenvalue verdict " + to_string(numeric));
  }
  report.stability = numeric;
  return report;
}

std::vector<EquilibriumReport> equilibria(const Params& p) {
  std::vector<EquilibriumReport> reports;
  reports.reserve(kAllEquilibria.size());
  for (EquilibriumLabel label : kAllEquilibria) reports.push_back(classify_stability(p, equilibrium(p, label)));
  return reports;
}

Eigen::Matrix<double, 5, 1> quintic_coefficients(const Params& p, const State& s) {
  const double x = s[kX], y = s[kY], v = s[kV], z = s[kZ], w = s[kW];
  const double bv = p.beta * v, pz = p.p * z, qw = p.q * w;
  const double aNb = p.a * p.bigN * p.beta;
  Eigen::Matrix<double, 5, 1> k;
  k[0] = p.a + p.d + p.mu + bv + pz + qw;
  k[1] = (p.d + bv) * (p.a + p.mu) + p.a * p.mu + pz * (p.d + p.h + p.mu + bv + qw) + qw * (p.d + p.a + p.alpha + bv) -
         aNb * x;
  k[2] = p.a * p.mu * (p.d + bv) + pz * (p.d * p.mu + p.d * p.h + p.mu * p.h + p.mu * bv + p.h * bv) +
         qw * (p.a * p.d + p.alpha * p.d + p.a * p.alpha + p.a * bv) + pz * qw * (p.d + p.alpha + p.h + bv) -
         aNb * p.d * x;
  k[3] = p.a * p.d * p.alpha * qw + pz * (p.d * p.h * p.mu + p.mu * p.h * bv - aNb * p.h * y) +
         pz * qw * (p.d * p.alpha + p.h * p.alpha + p.d * p.h + p.h * bv);
  k[4] = p.alpha * p.h * p.d * pz * qw;
  return k;
}

CharacteristicFactorization characteristic_factorization(const Params& p, EquilibriumLabel label) {
  const Thresholds t = thresholds_unchecked(p);
  const State s = equilibrium_point(p, label);
  const double x = s[kX], y = s[kY], v = s[kV], z = s[kZ], w = s[kW];
  CharacteristicFactorization f;
  switch (label) {
    case EquilibriumLabel::Ef:
      f.linear_roots = {-p.d, -p.alpha, -p.h};
      f.polynomial.resize(2);
      f.polynomial << p.a + p.mu, p.a * p.mu * (1.0 - t.r0);
      break;
    case EquilibriumLabel::E1: {
      const double nb2 = p.bigN * p.beta * p.beta;
      f.linear_roots = {p.d * p.g * p.mu / nb2 * (t.rW - 1.0),
                        p.d * p.c * p.mu * p.mu / (p.a * p.bigN * nb2) * (t.rCtl - 1.0)};
      f.polynomial.resize(3);
      f.polynomial << p.a + p.mu + p.d * t.r0, p.a * p.d + p.mu * p.d * t.r0 + p.a * p.d * (t.r0 - 1.0),
          p.a * p.d * p.mu * (t.r0 - 1.0);
      break;
    }
    case EquilibriumLabel::E2: {
      const double bv = p.beta * v, pz = p.p * z;
      f.linear_roots = {p.alpha * (t.rCtlW1 - 1.0)};
      f.polynomial.resize(4);
      f.polynomial << p.d + p.a + p.mu + bv + pz,
          (p.d + bv) * (p.a + p.mu) + p.a * p.mu + pz * (p.d + p.mu + p.h + bv) - p.a * p.bigN * p.beta * x,
          p.a * p.mu * (p.d + bv) + pz * (p.mu * p.d + p.h * p.d + p.mu * p.h + p.mu * bv + p.h * bv) -
              p.a * p.bigN * p.beta * p.d * x,
          pz * (p.mu * p.h * p.d + p.mu * p.h * bv - p.a * p.bigN * p.beta * p.h * y);
      break;
    }
    case EquilibriumLabel::E3: {
      const double bv = p.beta * v, qw = p.q * w;
      f.linear_roots = {p.h * (t.rCtlW2 - 1.0)};
      f.polynomial.resize(4);
      f.polynomial << p.a + p.d + p.mu + bv + qw,
          (p.d + bv) * (p.a + p.mu) + p.a * p.mu + (p.d + p.a + p.alpha + bv) * qw - p.a * p.bigN * p.beta * x,
          p.a * p.mu * (p.d + bv) + (p.a * p.d + p.alpha * p.d + p.a * p.alpha + p.a * bv) * qw -
              p.a * p.bigN * p.d * p.beta * x,
          p.a * p.d * p.alpha * qw;
      break;
    }
    case EquilibriumLabel::E4:
      f.polynomial = quintic_coefficients(p, s);
      break;
  }
  return f;
}

bool routh_hurwitz_stable(const Eigen::VectorXd& coefficients) {
  const Eigen::Index n = coefficients.size();
  if (n == 0) return true;
  // a_0 = 1, a_k = coefficients[k-1]; H(i, j) = a_{2(j+1) - (i+1)} in 0-based indices.
  auto coeff = [&](Eigen::Index k) -> double {
    if (k == 0) return 1.0;
    if (k < 0 || k > n) return 0.0;
    return coefficients[k - 1];
  };
  Eigen::MatrixXd H(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) H(i, j) = coeff(2 * (j + 1) - (i + 1));
  }
  for (Eigen::Index k = 1; k <= n; ++k) {
    if (!(H.topLeftCorner(k, k).determinant() > 0.0)) return false;
  }
  return true;
}

}  // namespace hiv

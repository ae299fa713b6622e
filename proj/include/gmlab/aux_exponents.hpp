#ifndef GMLAB_AUX_EXPONENTS_HPP
#define GMLAB_AUX_EXPONENTS_HPP

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "gmlab/core.hpp"
#include "gmlab/profile.hpp"

namespace gmlab {

class SingularDenominator : public Error {
 public:
  explicit SingularDenominator(double x)
      : Error("singular denominator in auxiliary exponent at x = " + std::to_string(x)), x_(x) {}
  double x() const noexcept { return x_; }

 private:
  double x_;
};

/// Exponent data of the commutator-of-potential transfer: source (p, A1,
/// theta1) and target (q, A2, theta2) related through the Sobolev-type
/// balance 1/p - 1/q = alpha/(1 - lambda).
struct AuxExponents {
  double p = 2.0;
  double q = 4.0;
  double alpha = 0.25;
  double lambda = 0.0;
  Profile A1 = Profile::zero();
  Profile A2 = Profile::zero();
  double theta1 = 1.0;
  double theta2 = 0.0;  // 0 selects theta1 * (1 + alpha q / (1 - lambda))
  double delta = 1.0;

  double critical_theta2() const { return theta1 * (1.0 + alpha * q / (1.0 - lambda)); }
  double effective_theta2() const { return theta2 > 0.0 ? theta2 : critical_theta2(); }

  /// q determined by 1/p - 1/q = alpha/(1-lambda).
  static double balanced_q(double p, double alpha, double lambda) {
    return 1.0 / (1.0 / p - alpha / (1.0 - lambda));
  }

  /// Returns an empty string when every invariant holds, else the reasons.
  std::string violations(double tol = 1e-12) const {
    std::ostringstream os;
    if (!(p > 1.0)) os << "p must exceed 1; ";
    if (!(lambda >= 0.0 && lambda < 1.0)) os << "lambda must lie in [0,1); ";
    if (!(alpha > 0.0 && alpha < (1.0 - lambda) / p)) os << "need 0 < alpha < (1-lambda)/p; ";
    if (std::abs(1.0 / p - 1.0 / q - alpha / (1.0 - lambda)) > tol) os << "1/p - 1/q != alpha/(1-lambda); ";
    if (!(theta1 > 0.0)) os << "theta1 must be positive; ";
    if (effective_theta2() < critical_theta2() * (1.0 - tol)) os << "theta2 below theta1 (1 + alpha q/(1-lambda)); ";
    const double B = A2.right_derivative_at_zero();
    if (!(B >= 0.0 && B < (1.0 - lambda) * (1.0 - lambda) / (alpha * q * q)))
      os << "A2'(0+) must lie in [0, (1-lambda)^2/(alpha q^2)); ";
    if (!(delta > 0.0)) os << "delta must be positive; ";
    return os.str();
  }
};

struct AuxValues {
  double phibar, phitilde, Abar, Atilde, phi, Phi, psi, Psi;
};

namespace detail {

inline double checked_ratio(double num, double den, double x) {
  if (!(std::abs(den) > 1e-300) || !std::isfinite(den)) throw SingularDenominator(x);
  return num / den;
}

}  // namespace detail

/// eta as a function of eps: the unique eta with
/// 1/(p - eta) - 1/(q - eps) = alpha / (1 - lambda + A2(eps)).
inline double phibar(double x, const AuxExponents& e) {
  const double a = 1.0 - e.lambda + e.A2(x);
  return e.p + detail::checked_ratio((x - e.q) * a, a - e.alpha * (x - e.q), x);
}

inline double Abar(double x, const AuxExponents& e) {
  const double a = 1.0 - e.lambda + e.A2(x);
  return 1.0 - detail::checked_ratio(e.alpha * (x - e.q), a, x);
}

/// eps as a function of eta (the reverse bookkeeping, with A1).
inline double phitilde(double x, const AuxExponents& e) {
  const double a = 1.0 - e.lambda + e.A1(x);
  return e.q - detail::checked_ratio((e.p - x) * a, a - e.alpha * (e.p - x), x);
}

inline double Atilde(double x, const AuxExponents& e) {
  const double a = 1.0 - e.lambda + e.A1(x);
  return detail::checked_ratio(a, a - (e.p - x) * e.alpha, x);
}

/// phi(x) = phibar(x)^Abar(x): the target-side grand weight before the
/// eps -> eps^theta1 substitution.
inline double aux_phi(double x, const AuxExponents& e) { return std::pow(phibar(x, e), Abar(x, e)); }
inline double aux_Phi(double x, const AuxExponents& e) { return std::pow(phitilde(x, e), Atilde(x, e)); }

inline AuxValues eval_aux(double x, const AuxExponents& e) {
  if (!(x > 0.0 && x <= e.delta)) throw ParameterError("eval_aux needs 0 < x <= delta");
  AuxValues v{};
  v.phibar = phibar(x, e);
  v.phitilde = phitilde(x, e);
  v.Abar = Abar(x, e);
  v.Atilde = Atilde(x, e);
  v.phi = std::pow(v.phibar, v.Abar);
  v.Phi = std::pow(v.phitilde, v.Atilde);
  const double xt = std::pow(x, e.theta1);
  v.psi = aux_phi(xt, e);
  v.Psi = aux_Phi(xt, e);
  return v;
}

/// |1/(p - eta) - 1/(q - eps) - alpha/(1 - lambda + A2(eps))| with eta = phibar(eps).
inline double eta_identity_check(double eps, const AuxExponents& e) {
  if (!(eps > 0.0 && eps <= e.delta)) throw ParameterError("eta_identity_check needs 0 < eps <= delta");
  const double eta = phibar(eps, e);
  return std::abs(1.0 / (e.p - eta) - 1.0 / (e.q - eps) - e.alpha / (1.0 - e.lambda + e.A2(eps)));
}

/// Finite-difference monotonicity of phibar on a grid of (0, delta].
inline bool phibar_increasing(const AuxExponents& e, std::size_t samples = 2000) {
  double prev = phibar(e.delta / static_cast<double>(samples), e);
  for (std::size_t i = 2; i <= samples; ++i) {
    const double cur = phibar(e.delta * static_cast<double>(i) / static_cast<double>(samples), e);
    if (!(cur > prev)) return false;
    prev = cur;
  }
  return true;
}

/// Inverse of phibar on (0, delta] by bisection; clamps to delta above phibar(delta).
inline double phibar_inverse(double eta, const AuxExponents& e) {
  if (eta <= 0.0) return 0.0;
  if (eta >= phibar(e.delta, e)) return e.delta;
  double lo = 0.0, hi = e.delta;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (phibar(mid, e) < eta ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// A1(eta) = A2(phibar^{-1}(eta)), the compatibility condition between the
/// source and target exponent shifts.
inline Profile compatible_A1(const AuxExponents& e) {
  if (e.A2.is_zero()) return Profile::zero();
  AuxExponents copy = e;
  return Profile::custom([copy](double eta) { return copy.A2(phibar_inverse(eta, copy)); },
                         "A2(phibar^-1(eta))");
}

/// psi(eps) = phi(eps^theta1) as a grand weight profile.
inline Profile psi_profile(const AuxExponents& e) {
  AuxExponents copy = e;
  return Profile::custom([copy](double eps) { return aux_phi(std::pow(eps, copy.theta1), copy); },
                         "phibar(eps^theta1)^Abar(eps^theta1)", 0.0);
}

}  // namespace gmlab

#endif  // GMLAB_AUX_EXPONENTS_HPP

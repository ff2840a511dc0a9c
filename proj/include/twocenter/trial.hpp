#pragma once

// Compact trial wavefunctions for the two-center problem in prolate
// spheroidal coordinates,
//
//   Psi = X(xi) Y(eta) exp(i Lambda phi),
//   X   = (xi^2-1)^{Lambda/2} P_n(xi) (gamma+xi)^{-(1+n+Lambda-R/p)}
//           exp(-xi (alpha + p xi) / (gamma + xi)),
//   Y   = (1-eta^2)^{Lambda/2} Q_m(eta^2) D^{-(1+2m+Lambda)/4}
//           cosh|sinh( eta (a1 + p a2 eta^2 + p b3 eta^4) / D ),
//   D   = 1 + b2 eta^2 + b3 eta^4.
//
// Everything is templated on the scalar so that the same code runs in
// double and in extended (long double) precision.

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "twocenter/core.hpp"

namespace twocenter {

template <typename Scalar>
struct TrialParams {
  Scalar alpha = 1;
  Scalar gamma = 1;
  Scalar a1 = 1;
  Scalar a2 = 0;
  Scalar b2 = 0;
  Scalar b3 = 0;
  Scalar p = 1;
  /// Node of the xi-polynomial; present iff n = 1.
  std::optional<Scalar> xi0;
  /// Extra xi-polynomial factor (ascending powers); empty means 1.
  std::vector<Scalar> P_coeffs;
  /// eta^2-polynomial (ascending powers in eta^2); empty means 1.
  std::vector<Scalar> Q_coeffs;

  template <typename Other>
  TrialParams<Other> cast() const {
    TrialParams<Other> o;
    o.alpha = static_cast<Other>(alpha);
    o.gamma = static_cast<Other>(gamma);
    o.a1 = static_cast<Other>(a1);
    o.a2 = static_cast<Other>(a2);
    o.b2 = static_cast<Other>(b2);
    o.b3 = static_cast<Other>(b3);
    o.p = static_cast<Other>(p);
    if (xi0) o.xi0 = static_cast<Other>(*xi0);
    for (auto c : P_coeffs) o.P_coeffs.push_back(static_cast<Other>(c));
    for (auto c : Q_coeffs) o.Q_coeffs.push_back(static_cast<Other>(c));
    return o;
  }
};

using TrialParamsd = TrialParams<double>;

/// min over eta in [-1,1] of 1 + b2 eta^2 + b3 eta^4.
template <typename Scalar>
Scalar eta_denominator_min(Scalar b2, Scalar b3) {
  Scalar m = std::min<Scalar>(Scalar(1), Scalar(1) + b2 + b3);
  if (b3 > 0) {
    const Scalar s = -b2 / (Scalar(2) * b3);
    if (s > 0 && s < 1) m = std::min(m, Scalar(1) + b2 * s + b3 * s * s);
  }
  return m;
}

/// True when params satisfy the domain invariants (gamma > -1, D > 0 on
/// [-1,1], p > 0, xi0 > 1).
template <typename Scalar>
bool params_valid(const TrialParams<Scalar>& t) {
  using std::isfinite;
  for (Scalar v : {t.alpha, t.gamma, t.a1, t.a2, t.b2, t.b3, t.p})
    if (!isfinite(v)) return false;
  if (!(t.gamma > Scalar(-1))) return false;
  if (!(t.p > 0)) return false;
  if (!(eta_denominator_min(t.b2, t.b3) > 0)) return false;
  if (t.xi0 && !(*t.xi0 > Scalar(1))) return false;
  return true;
}

template <typename Scalar>
void require_valid(const TrialParams<Scalar>& t) {
  if (!params_valid(t)) throw DomainError("trial parameters outside their domain");
}

namespace detail {

template <typename Scalar>
struct PolyValue {
  Scalar v, d, dd;
};

/// Value and first two derivatives of sum c_k x^k.
template <typename Scalar>
PolyValue<Scalar> poly_eval(const std::vector<Scalar>& c, Scalar x) {
  if (c.empty()) return {Scalar(1), Scalar(0), Scalar(0)};
  Scalar v = 0, d = 0, dd = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    dd = dd * x + Scalar(2) * d;
    d = d * x + v;
    v = v * x + *it;
  }
  return {v, d, dd};
}

}  // namespace detail

/// The xi-polynomial P_n (node monomial times optional extra factor).
template <typename Scalar>
detail::PolyValue<Scalar> xi_polynomial(const TrialParams<Scalar>& t, Scalar xi) {
  auto q = detail::poly_eval(t.P_coeffs, xi);
  if (!t.xi0) return q;
  const Scalar m = xi - *t.xi0;
  return {m * q.v, q.v + m * q.d, Scalar(2) * q.d + m * q.dd};
}

/// Q_m(eta^2) and its derivatives with respect to eta.
template <typename Scalar>
detail::PolyValue<Scalar> eta_polynomial(const TrialParams<Scalar>& t, Scalar eta) {
  const auto q = detail::poly_eval(t.Q_coeffs, eta * eta);
  return {q.v, Scalar(2) * eta * q.d, Scalar(2) * q.d + Scalar(4) * eta * eta * q.dd};
}

/// Exponent of (gamma + xi) in the denominator: 1 + n + Lambda - R/p.
template <typename Scalar>
Scalar xi_power(const TrialParams<Scalar>& t, const StateLabel& label,
                const PhysicalSetup& setup) {
  return Scalar(1 + label.n + label.lambda) - Scalar(setup.R) / t.p;
}

/// Smooth xi-phase phi0 (the reduced X is P_n exp(-phi0)), normalized to
/// phi0(1) = 0, with its first two derivatives.
template <typename Scalar>
struct Phase {
  Scalar value, d1, d2;
};

template <typename Scalar>
Phase<Scalar> phase_of_trial_xi(const TrialParams<Scalar>& t, const StateLabel& label,
                                const PhysicalSetup& setup, Scalar xi) {
  using std::log1p;
  const Scalar k = xi_power(t, label, setup);
  const Scalar g = t.gamma;
  const Scalar gx = g + xi;
  // g(xi) = xi (alpha + p xi)/(gamma + xi)
  //       = p xi + (alpha - p gamma) xi/(gamma + xi)
  // written so that gamma -> infinity with alpha/gamma fixed stays finite.
  const Scalar c = (t.alpha - t.p * g) / (g + Scalar(1));  // (alpha - p gamma)/(gamma+1)
  const Scalar ratio = g / gx;                             // gamma/(gamma+xi)
  const Scalar dx = xi - Scalar(1);
  Phase<Scalar> ph;
  ph.value = k * log1p(dx / (g + Scalar(1))) + t.p * dx + c * ratio * dx;
  const Scalar c2 = (t.alpha - t.p * g) / gx;  // (alpha - p gamma)/(gamma+xi)
  ph.d1 = k / gx + t.p + c2 * ratio;
  ph.d2 = -k / (gx * gx) - Scalar(2) * c2 * ratio / gx;
  return ph;
}

/// Sample of a reduced channel function f = exp(log_scale) * value with
/// derivative exp(log_scale) * deriv. Splitting off the exponent keeps
/// large-R evaluations inside the floating-point range.
template <typename Scalar>
struct ChannelSample {
  Scalar log_scale;
  Scalar value;
  Scalar deriv;
  Scalar second;  // second derivative, same scale
};

/// Reduced xi factor u = X / (xi^2-1)^{Lambda/2}.
template <typename Scalar>
ChannelSample<Scalar> sample_xi(const TrialParams<Scalar>& t, const StateLabel& label,
                                const PhysicalSetup& setup, Scalar xi) {
  using std::log;
  const Scalar k = xi_power(t, label, setup);
  const Scalar g = t.gamma;
  const Scalar gx = g + xi;
  const Scalar c2 = (t.alpha - t.p * g) / gx;
  const Scalar ratio = g / gx;
  // absolute phase: k log(gamma+xi) + p xi + (alpha - p gamma) xi/(gamma+xi)
  const Scalar phase = k * log(gx) + t.p * xi + c2 * xi;
  const Scalar d1 = k / gx + t.p + c2 * ratio;
  const Scalar d2 = -k / (gx * gx) - Scalar(2) * c2 * ratio / gx;
  const auto P = xi_polynomial(t, xi);
  ChannelSample<Scalar> s;
  s.log_scale = -phase;
  s.value = P.v;
  s.deriv = P.d - P.v * d1;
  s.second = P.dd - Scalar(2) * P.d * d1 + P.v * (d1 * d1 - d2);
  return s;
}

/// Pieces of the reduced eta factor v = Q D^{-s} C(x), x = eta h(eta).
template <typename Scalar>
struct EtaPieces {
  Scalar D, dD, ddD;      // D and derivatives
  Scalar x, dx, ddx;      // argument of cosh/sinh and derivatives
  Scalar s;               // exponent (1 + 2m + Lambda)/4
};

template <typename Scalar>
EtaPieces<Scalar> eta_pieces(const TrialParams<Scalar>& t, const StateLabel& label,
                             Scalar eta) {
  const Scalar e2 = eta * eta;
  EtaPieces<Scalar> q;
  q.s = Scalar(1 + 2 * label.m + label.lambda) / Scalar(4);
  q.D = Scalar(1) + t.b2 * e2 + t.b3 * e2 * e2;
  q.dD = Scalar(2) * t.b2 * eta + Scalar(4) * t.b3 * e2 * eta;
  q.ddD = Scalar(2) * t.b2 + Scalar(12) * t.b3 * e2;
  // N = a1 + p a2 eta^2 + p b3 eta^4, x = eta N / D
  const Scalar N = t.a1 + t.p * t.a2 * e2 + t.p * t.b3 * e2 * e2;
  const Scalar dN = Scalar(2) * t.p * t.a2 * eta + Scalar(4) * t.p * t.b3 * e2 * eta;
  const Scalar ddN = Scalar(2) * t.p * t.a2 + Scalar(12) * t.p * t.b3 * e2;
  const Scalar M = eta * N;  // numerator of x
  const Scalar dM = N + eta * dN;
  const Scalar ddM = Scalar(2) * dN + eta * ddN;
  q.x = M / q.D;
  q.dx = (dM - q.x * q.dD) / q.D;
  q.ddx = (ddM - Scalar(2) * q.dx * q.dD - q.x * q.ddD) / q.D;
  return q;
}

/// Reduced eta factor v = Y / (1-eta^2)^{Lambda/2}.
template <typename Scalar>
ChannelSample<Scalar> sample_eta(const TrialParams<Scalar>& t, const StateLabel& label,
                                 Scalar eta) {
  using std::abs;
  using std::exp;
  using std::log;
  const auto q = eta_pieces(t, label, eta);
  const Scalar ax = abs(q.x);
  const Scalar e = exp(Scalar(-2) * ax);
  const Scalar sgn = q.x < 0 ? Scalar(-1) : Scalar(1);
  // cosh x = e^{|x|} (1 + e^{-2|x|})/2, sinh x = sgn e^{|x|} (1 - e^{-2|x|})/2;
  // the common e^{|x|}/2 goes into log_scale.
  Scalar C, dC;
  if (label.parity == Parity::Plus) {
    C = Scalar(1) + e;
    dC = sgn * (Scalar(1) - e);
  } else {
    C = q.x == 0 ? Scalar(0) : sgn * (Scalar(1) - e);
    dC = Scalar(1) + e;
  }
  const auto Q = eta_polynomial(t, eta);
  // M = -s log D
  const Scalar dMl = -q.s * q.dD / q.D;
  const Scalar ddMl = -q.s * (q.ddD / q.D - (q.dD / q.D) * (q.dD / q.D));
  ChannelSample<Scalar> out;
  out.log_scale = -q.s * log(q.D) + ax - std::log(Scalar(2));
  out.value = Q.v * C;
  // (Q e^M C)' = e^M [Q' C + Q M' C + Q C' x']
  out.deriv = Q.d * C + Q.v * (dMl * C + dC * q.dx);
  // second derivative; C'' = C
  const Scalar core = (ddMl + dMl * dMl) * C + Scalar(2) * dMl * dC * q.dx +
                      C * q.dx * q.dx + dC * q.ddx;
  out.second = Q.dd * C + Scalar(2) * Q.d * (dMl * C + dC * q.dx) + Q.v * core;
  return out;
}

/// X(xi) including the (xi^2-1)^{Lambda/2} prefactor. Underflows
/// gracefully to 0 for very large p xi.
template <typename Scalar>
Scalar eval_X(const TrialParams<Scalar>& t, const StateLabel& label,
              const PhysicalSetup& setup, Scalar xi) {
  using std::exp;
  using std::pow;
  require_valid(t);
  if (!(xi >= Scalar(1))) throw DomainError("eval_X requires xi >= 1");
  const auto s = sample_xi(t, label, setup, xi);
  Scalar pre = Scalar(1);
  if (label.lambda > 0) pre = pow(xi * xi - Scalar(1), Scalar(label.lambda) / Scalar(2));
  return pre * s.value * exp(s.log_scale);
}

/// Y(eta) including the (1-eta^2)^{Lambda/2} prefactor.
template <typename Scalar>
Scalar eval_Y(const TrialParams<Scalar>& t, const StateLabel& label, Scalar eta) {
  using std::abs;
  using std::exp;
  using std::pow;
  require_valid(t);
  if (!(abs(eta) <= Scalar(1))) throw DomainError("eval_Y requires |eta| <= 1");
  const auto s = sample_eta(t, label, eta);
  Scalar pre = Scalar(1);
  if (label.lambda > 0) pre = pow(Scalar(1) - eta * eta, Scalar(label.lambda) / Scalar(2));
  return pre * s.value * exp(s.log_scale);
}

/// Psi(xi, eta, phi) = X Y e^{i Lambda phi}.
template <typename Scalar>
std::complex<Scalar> eval_psi(const TrialParams<Scalar>& t, const StateLabel& label,
                              const PhysicalSetup& setup, Scalar xi, Scalar eta,
                              Scalar phi) {
  const Scalar r = eval_X(t, label, setup, xi) * eval_Y(t, label, eta);
  if (label.lambda == 0) return {r, Scalar(0)};
  return std::polar(r, Scalar(label.lambda) * phi);
}

// Truncated asymptotic phase series (X = e^{-phi}, Y = e^{-rho}).

/// Coefficient of log(xi) (with the minus sign removed): R/p - Lambda - 1.
template <typename Scalar>
Scalar wkb_log_coefficient_xi(Scalar p, const StateLabel& label, const PhysicalSetup& setup) {
  return Scalar(setup.R) / p - Scalar(label.lambda) - Scalar(1);
}

/// Coefficient c of 1/(2 xi): [A + (R/p-Lambda-1)(R/p+Lambda)]/p - p.
template <typename Scalar>
Scalar wkb_inverse_coefficient_xi(Scalar p, Scalar A, const StateLabel& label,
                                  const PhysicalSetup& setup) {
  const Scalar rp = Scalar(setup.R) / p;
  const Scalar L = Scalar(label.lambda);
  return (A + (rp - L - Scalar(1)) * (rp + L)) / p - p;
}

/// Large-xi WKB phase: p xi - (R/p - Lambda - 1) log xi + c / (2 xi).
template <typename Scalar>
Scalar wkb_phase_xi_large(Scalar p, Scalar A, const StateLabel& label,
                          const PhysicalSetup& setup, Scalar xi) {
  using std::log;
  if (!(p > 0) || !(xi > 0)) throw DomainError("wkb phase requires p > 0, xi > 0");
  return p * xi - wkb_log_coefficient_xi(p, label, setup) * log(xi) +
         wkb_inverse_coefficient_xi(p, A, label, setup) / (Scalar(2) * xi);
}

/// Small-xi series: -(A/2) xi^2 - (R/3) xi^3 + (p^2 + A^2 - A(2 Lambda+3))/12 xi^4.
template <typename Scalar>
Scalar pt_phase_xi_small(Scalar p, Scalar A, const StateLabel& label,
                         const PhysicalSetup& setup, Scalar xi) {
  const Scalar L = Scalar(label.lambda);
  const Scalar x2 = xi * xi;
  return -A / Scalar(2) * x2 - Scalar(setup.R) / Scalar(3) * x2 * xi +
         (p * p + A * A - A * (Scalar(2) * L + Scalar(3))) / Scalar(12) * x2 * x2;
}

/// Large-eta phase: -p eta + (Lambda+1) log eta - ((A - Lambda(Lambda+1))/p - p)/(2 eta).
template <typename Scalar>
Scalar wkb_phase_eta_large(Scalar p, Scalar A, const StateLabel& label, Scalar eta) {
  using std::log;
  if (!(p > 0) || !(eta > 0)) throw DomainError("wkb phase requires p > 0, eta > 0");
  const Scalar L = Scalar(label.lambda);
  return -p * eta + (L + Scalar(1)) * log(eta) -
         ((A - L * (L + Scalar(1))) / p - p) / (Scalar(2) * eta);
}

/// Small-eta series: -(A/2) eta^2 + (p^2 + A^2 - A(2 Lambda+3))/12 eta^4.
template <typename Scalar>
Scalar pt_phase_eta_small(Scalar p, Scalar A, const StateLabel& label, Scalar eta) {
  const Scalar L = Scalar(label.lambda);
  const Scalar e2 = eta * eta;
  return -A / Scalar(2) * e2 +
         (p * p + A * A - A * (Scalar(2) * L + Scalar(3))) / Scalar(12) * e2 * e2;
}

// Classic two-center baselines.

/// Hund-Mulliken: e^{-2 a r1} +- e^{-2 a r2} = 2 e^{-a R xi} cosh|sinh(a R eta).
template <typename Scalar>
Scalar eval_hund_mulliken(Scalar alpha2, const PhysicalSetup& setup, Parity parity,
                          Scalar xi, Scalar eta) {
  using std::cosh;
  using std::exp;
  using std::sinh;
  const Scalar R = Scalar(setup.R);
  const Scalar arg = alpha2 * R * eta;
  return Scalar(2) * exp(-alpha2 * R * xi) *
         (parity == Parity::Plus ? cosh(arg) : sinh(arg));
}

/// Guillemin-Zener: 2 e^{-(a3+a4) R xi} cosh|sinh((a3-a4) R eta).
template <typename Scalar>
Scalar eval_guillemin_zener(Scalar alpha3, Scalar alpha4, const PhysicalSetup& setup,
                            Parity parity, Scalar xi, Scalar eta) {
  using std::cosh;
  using std::exp;
  using std::sinh;
  const Scalar R = Scalar(setup.R);
  const Scalar arg = (alpha3 - alpha4) * R * eta;
  return Scalar(2) * exp(-(alpha3 + alpha4) * R * xi) *
         (parity == Parity::Plus ? cosh(arg) : sinh(arg));
}

}  // namespace twocenter

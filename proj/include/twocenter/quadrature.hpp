#pragma once

// Quadrature on xi in [1, inf) and eta in [-1, 1], and the channel moments
// from which norms, Rayleigh quotients and matrix elements are assembled.
//
// The (xi^2 - eta^2) Jacobian makes every 3D integral a short sum of
// products of 1D integrals, so nothing here is genuinely two-dimensional.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "twocenter/core.hpp"
#include "twocenter/trial.hpp"

namespace twocenter {

enum class Channel { Xi, Eta };

template <typename Scalar>
struct QuadratureRule {
  std::vector<Scalar> nodes;
  std::vector<Scalar> weights;
  Channel channel = Channel::Xi;

  int count() const { return static_cast<int>(nodes.size()); }
};

/// Neumaier compensated accumulator.
template <typename Scalar>
class CompensatedSum {
 public:
  void add(Scalar x) {
    const Scalar t = sum_ + x;
    using std::abs;
    if (abs(sum_) >= abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_ = 0;
  Scalar comp_ = 0;
};

/// Gauss-Legendre rule on [-1, 1] (Newton iteration on P_N).
template <typename Scalar>
QuadratureRule<Scalar> gauss_legendre(int N) {
  using std::abs;
  using std::cos;
  if (N < 1) throw DomainError("gauss_legendre: N must be positive");
  QuadratureRule<Scalar> rule;
  rule.channel = Channel::Eta;
  rule.nodes.assign(N, Scalar(0));
  rule.weights.assign(N, Scalar(0));
  const Scalar pi = Scalar(kPi);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (int i = 0; i < (N + 1) / 2; ++i) {
    Scalar x = cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(N) + Scalar(0.5)));
    Scalar dp = 0;
    for (int it = 0; it < 100; ++it) {
      Scalar p0 = 1, p1 = x;
      for (int k = 2; k <= N; ++k) {
        const Scalar p2 = ((Scalar(2 * k - 1)) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
        p0 = p1;
        p1 = p2;
      }
      if (N == 1) p0 = 1;
      dp = Scalar(N) * (x * p1 - p0) / (x * x - Scalar(1));
      const Scalar dx = p1 / dp;
      x -= dx;
      if (abs(dx) <= Scalar(2) * eps) {
        // one more evaluation of the derivative at the converged node
        Scalar q0 = 1, q1 = x;
        for (int k = 2; k <= N; ++k) {
          const Scalar q2 = ((Scalar(2 * k - 1)) * x * q1 - Scalar(k - 1) * q0) / Scalar(k);
          q0 = q1;
          q1 = q2;
        }
        if (N == 1) q0 = 1;
        dp = Scalar(N) * (x * q1 - q0) / (x * x - Scalar(1));
        break;
      }
    }
    const Scalar w = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[N - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[N - 1 - i] = w;
  }
  if (N % 2 == 1) rule.nodes[N / 2] = 0;
  return rule;
}

/// Double-exponential rule on xi in [1, inf) adapted to an e^{-2 p xi}
/// decay: xi = 1 + s/(2p), s = exp(t - exp(-t)), t on a uniform grid.
/// Nodes that would round to xi = 1 are dropped, so count() can be below N.
template <typename Scalar>
QuadratureRule<Scalar> exponential_xi_rule(Scalar p_scale, int N) {
  using std::exp;
  if (!(p_scale > 0)) throw DomainError("xi rule needs a positive decay scale");
  if (N < 2) throw DomainError("xi rule needs at least two nodes");
  const Scalar t_lo = Scalar(-4.0);
  const Scalar t_hi = Scalar(5.4);
  const Scalar h = (t_hi - t_lo) / Scalar(N - 1);
  const Scalar scale = Scalar(1) / (Scalar(2) * p_scale);
  QuadratureRule<Scalar> rule;
  rule.channel = Channel::Xi;
  rule.nodes.reserve(N);
  rule.weights.reserve(N);
  for (int k = 0; k < N; ++k) {
    const Scalar t = t_lo + h * Scalar(k);
    const Scalar et = exp(-t);
    const Scalar s = exp(t - et);
    // the first few nodes round to xi = 1; their weights are below 1e-20
    if (!(Scalar(1) + scale * s > Scalar(1))) continue;
    rule.nodes.push_back(Scalar(1) + scale * s);
    rule.weights.push_back(h * scale * s * (Scalar(1) + et));
  }
  return rule;
}

template <typename Scalar>
struct RulePair {
  QuadratureRule<Scalar> xi;
  QuadratureRule<Scalar> eta;
};

constexpr int kMinQuadratureNodes = 8;
constexpr int kDefaultQuadratureNodes = 96;

/// The xi rule (decay scale p_scale) and the eta Gauss-Legendre rule, both
/// with N nodes. Deterministic for fixed (p_scale, N).
template <typename Scalar>
RulePair<Scalar> build_rules(Scalar p_scale, int N) {
  if (N < kMinQuadratureNodes)
    throw DomainError("quadrature needs N >= " + std::to_string(kMinQuadratureNodes));
  return {exponential_xi_rule(p_scale, N), gauss_legendre<Scalar>(N)};
}

/// Integrate f over a rule with compensated summation.
template <typename Scalar, typename F>
Scalar integrate(const QuadratureRule<Scalar>& rule, F&& f) {
  CompensatedSum<Scalar> acc;
  for (int i = 0; i < rule.count(); ++i) acc.add(rule.weights[i] * f(rule.nodes[i]));
  return acc.value();
}

/// Samples of the reduced channel functions of one state on a rule, with
/// the exponent shifted by the largest log_scale so values stay O(1).
template <typename Scalar>
struct TabulatedChannel {
  std::vector<Scalar> value;
  std::vector<Scalar> deriv;
  Scalar log_scale = 0;  // true function = exp(log_scale) * value
};

template <typename Scalar, typename Sampler>
TabulatedChannel<Scalar> tabulate(const QuadratureRule<Scalar>& rule, Sampler&& sample) {
  using std::exp;
  const int n = rule.count();
  std::vector<ChannelSample<Scalar>> raw;
  raw.reserve(n);
  Scalar top = -std::numeric_limits<Scalar>::infinity();
  for (int i = 0; i < n; ++i) {
    raw.push_back(sample(rule.nodes[i]));
    if (raw.back().value != Scalar(0) || raw.back().deriv != Scalar(0))
      top = std::max(top, raw.back().log_scale);
  }
  if (!std::isfinite(static_cast<double>(top))) top = 0;
  TabulatedChannel<Scalar> tab;
  tab.log_scale = top;
  tab.value.resize(n);
  tab.deriv.resize(n);
  for (int i = 0; i < n; ++i) {
    const Scalar f = exp(raw[i].log_scale - top);
    tab.value[i] = raw[i].value * f;
    tab.deriv[i] = raw[i].deriv * f;
  }
  return tab;
}

template <typename Scalar>
TabulatedChannel<Scalar> tabulate_xi(const TrialParams<Scalar>& t, const StateLabel& label,
                                     const PhysicalSetup& setup,
                                     const QuadratureRule<Scalar>& rule) {
  return tabulate(rule, [&](Scalar xi) { return sample_xi(t, label, setup, xi); });
}

template <typename Scalar>
TabulatedChannel<Scalar> tabulate_eta(const TrialParams<Scalar>& t, const StateLabel& label,
                                      const QuadratureRule<Scalar>& rule) {
  return tabulate(rule, [&](Scalar eta) { return sample_eta(t, label, eta); });
}

/// Bilinear 1D moments of two reduced channel functions a, b sharing the
/// same Lambda, with w = (xi^2-1)^Lambda on xi and (1-eta^2)^Lambda on eta:
///   s0 = int w a b, s1 = int c w a b, s2 = int c^2 w a b,
///   kin = int |c^2 - 1| w a' b'      (c = xi or eta).
/// All values carry the factor exp(log_scale).
template <typename Scalar>
struct ChannelMoments {
  Scalar s0 = 0, s1 = 0, s2 = 0, kin = 0;
  Scalar log_scale = 0;
};

template <typename Scalar>
ChannelMoments<Scalar> channel_moments(const QuadratureRule<Scalar>& rule, int lambda,
                                       const TabulatedChannel<Scalar>& a,
                                       const TabulatedChannel<Scalar>& b) {
  using std::abs;
  using std::pow;
  CompensatedSum<Scalar> s0, s1, s2, kin;
  for (int i = 0; i < rule.count(); ++i) {
    const Scalar c = rule.nodes[i];
    const Scalar q = abs(c * c - Scalar(1));
    const Scalar w = lambda == 0 ? Scalar(1) : pow(q, lambda);
    const Scalar ww = rule.weights[i] * w;
    const Scalar ab = ww * a.value[i] * b.value[i];
    s0.add(ab);
    s1.add(ab * c);
    s2.add(ab * c * c);
    kin.add(ww * q * a.deriv[i] * b.deriv[i]);
  }
  ChannelMoments<Scalar> m;
  m.s0 = s0.value();
  m.s1 = s1.value();
  m.s2 = s2.value();
  m.kin = kin.value();
  m.log_scale = a.log_scale + b.log_scale;
  return m;
}

/// <Psi_a|Psi_b>, <Psi_a|-Laplacian|Psi_b> and <Psi_a|V|Psi_b> assembled
/// from channel moments, all sharing the factor exp(log_scale).
template <typename Scalar>
struct MatrixElements {
  Scalar overlap = 0;
  Scalar kinetic = 0;
  Scalar potential = 0;
  Scalar log_scale = 0;
};

template <typename Scalar>
MatrixElements<Scalar> assemble(const ChannelMoments<Scalar>& x,
                                const ChannelMoments<Scalar>& y,
                                const PhysicalSetup& setup) {
  const Scalar pi = Scalar(kPi);
  const Scalar R = Scalar(setup.R);
  const Scalar h = R / Scalar(2);
  MatrixElements<Scalar> me;
  me.overlap = Scalar(2) * pi * h * h * h * (x.s2 * y.s0 - x.s0 * y.s2);
  me.kinetic = Scalar(2) * pi * h * (x.kin * y.s0 + x.s0 * y.kin);
  me.potential = -pi * R * R *
                 (Scalar(setup.Z1 + setup.Z2) * x.s1 * y.s0 +
                  Scalar(setup.Z1 - setup.Z2) * x.s0 * y.s1);
  me.log_scale = x.log_scale + y.log_scale;
  return me;
}

/// Channel moments of a single trial state on given rules.
template <typename Scalar>
std::pair<ChannelMoments<Scalar>, ChannelMoments<Scalar>> state_moments(
    const TrialParams<Scalar>& t, const StateLabel& label, const PhysicalSetup& setup,
    const RulePair<Scalar>& rules) {
  const auto tx = tabulate_xi(t, label, setup, rules.xi);
  const auto ty = tabulate_eta(t, label, rules.eta);
  return {channel_moments(rules.xi, label.lambda, tx, tx),
          channel_moments(rules.eta, label.lambda, ty, ty)};
}

/// <Psi|Psi> including the full 3D volume element. Throws ConvergenceError
/// when the quadrature produces a non-positive value.
template <typename Scalar>
Scalar norm_squared(const TrialParams<Scalar>& t, const StateLabel& label,
                    const PhysicalSetup& setup, const RulePair<Scalar>& rules) {
  using std::exp;
  require_valid(t);
  validate_molecular(setup);
  const auto [mx, my] = state_moments(t, label, setup, rules);
  const auto me = assemble(mx, my, setup);
  if (!(me.overlap > 0))
    throw ConvergenceError("quadrature produced a non-positive norm");
  return me.overlap * exp(me.log_scale);
}

/// Variational energy (total, Ry) on fixed rules; no plateau check. Returns
/// +inf for parameters outside their domain so optimizers can reject them.
template <typename Scalar>
Scalar variational_energy(const TrialParams<Scalar>& t, const StateLabel& label,
                          const PhysicalSetup& setup, const RulePair<Scalar>& rules) {
  if (!params_valid(t)) return std::numeric_limits<Scalar>::infinity();
  const auto [mx, my] = state_moments(t, label, setup, rules);
  const auto me = assemble(mx, my, setup);
  if (!(me.overlap > 0)) return std::numeric_limits<Scalar>::infinity();
  const Scalar e_prime = (me.kinetic + me.potential) / me.overlap;
  return e_prime + Scalar(setup.nuclear_repulsion());
}

/// Thrown when doubling N moves the result by more than the plateau
/// tolerance; carries the two finest estimates.
class PlateauError : public ConvergenceError {
 public:
  PlateauError(const std::string& what, double coarse, double fine)
      : ConvergenceError(what), coarse_(coarse), fine_(fine) {}
  double coarse() const { return coarse_; }
  double fine() const { return fine_; }

 private:
  double coarse_;
  double fine_;
};

struct QuadratureOptions {
  int N = kDefaultQuadratureNodes;
  double plateau_tol = 1e-12;  // relative change allowed between N and 2N
  bool check_plateau = true;
};

/// Rayleigh quotient <Psi|H|Psi>/<Psi|Psi> + 2 Z1 Z2/R with the kinetic
/// energy in gradient form; checked for a plateau between N and 2N nodes.
template <typename Scalar>
EnergyPair rayleigh_quotient(const TrialParams<Scalar>& t, const StateLabel& label,
                             const PhysicalSetup& setup, const QuadratureOptions& opt = {}) {
  using std::abs;
  require_valid(t);
  validate_molecular(setup);
  const auto coarse = build_rules<Scalar>(t.p, opt.N);
  const Scalar e1 = variational_energy(t, label, setup, coarse);
  Scalar e = e1;
  if (opt.check_plateau) {
    const auto fine = build_rules<Scalar>(t.p, 2 * opt.N);
    const Scalar e2 = variational_energy(t, label, setup, fine);
    const Scalar scale = std::max<Scalar>(Scalar(1), abs(e2));
    if (!(abs(e2 - e1) <= Scalar(opt.plateau_tol) * scale))
      throw PlateauError("quadrature plateau not reached", static_cast<double>(e1),
                         static_cast<double>(e2));
    e = e2;
  }
  EnergyPair out;
  out.E_total = static_cast<double>(e);
  out.E_prime = out.E_total - setup.nuclear_repulsion();
  out.p = out.E_prime < 0 ? std::sqrt(-out.E_prime) * setup.R / 2.0 : 0.0;
  return out;
}

}  // namespace twocenter

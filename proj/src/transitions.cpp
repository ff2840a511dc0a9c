#include "twocenter/transitions.hpp"

#include <algorithm>
#include <cmath>

namespace twocenter {

// mu_B = e hbar / (2 m c) with e = sqrt(2), m = 1/2, c = 2 / alpha.
const double kBohrMagnetonRy = kFineStructure / std::sqrt(2.0);
const double kQuadrupoleNorm = 1.0;

namespace {

// Tabulated reduced channel functions of a pair of states on shared rules.
struct PairTables {
  RulePair<double> rules;
  TabulatedChannel<double> ui, uf, vi, vf;
};

PairTables tabulate_pair(const TransitionState& i, const TransitionState& f, int N) {
  PairTables t{build_rules<double>(std::min(i.p, f.p), N), {}, {}, {}, {}};
  t.ui = tabulate(t.rules.xi, i.xi);
  t.uf = tabulate(t.rules.xi, f.xi);
  t.vi = tabulate(t.rules.eta, i.eta);
  t.vf = tabulate(t.rules.eta, f.eta);
  return t;
}

double ipow(double x, int k) {
  double r = 1;
  for (int j = 0; j < k; ++j) r *= x;
  return r;
}

// sum_k w_k F(c_k) a_k b_k with a, b chosen by the accessors
template <typename F, typename A, typename B>
double bilinear(const QuadratureRule<double>& rule, F&& weight, A&& a, B&& b) {
  CompensatedSum<double> acc;
  for (int k = 0; k < rule.count(); ++k)
    acc.add(rule.weights[k] * weight(rule.nodes[k]) * a(k) * b(k));
  return acc.value();
}

// int c^j |c^2-1|^e u_a u_b over a channel
double moment(const QuadratureRule<double>& rule, const TabulatedChannel<double>& a,
              const TabulatedChannel<double>& b, int j, int e) {
  return bilinear(
      rule, [&](double c) { return ipow(c, j) * ipow(std::abs((c - 1) * (c + 1)), e); },
      [&](int k) { return a.value[k]; }, [&](int k) { return b.value[k]; });
}

// <Psi|Psi> without the 2 pi (R/2)^3 factor, scaled by exp(-2 log_scale)
double norm_J(const QuadratureRule<double>& rx, const TabulatedChannel<double>& u,
              const QuadratureRule<double>& ry, const TabulatedChannel<double>& v, int lambda) {
  return moment(rx, u, u, 2, lambda) * moment(ry, v, v, 0, lambda) -
         moment(rx, u, u, 0, lambda) * moment(ry, v, v, 2, lambda);
}

double norm_product(const PairTables& t, const TransitionState& i, const TransitionState& f) {
  const double Ji = norm_J(t.rules.xi, t.ui, t.rules.eta, t.vi, i.label.lambda);
  const double Jf = norm_J(t.rules.xi, t.uf, t.rules.eta, t.vf, f.label.lambda);
  if (!(Ji > 0) || !(Jf > 0)) throw ConvergenceError("transition: non-positive norm");
  return Ji * Jf;
}

// Orders the pair so that `lo` has the smaller Lambda.
struct Ordered {
  const TabulatedChannel<double>* ulo;
  const TabulatedChannel<double>* uhi;
  const TabulatedChannel<double>* vlo;
  const TabulatedChannel<double>* vhi;
  int lambda_lo;
};

Ordered order(const PairTables& t, const TransitionState& i, const TransitionState& f) {
  if (i.label.lambda <= f.label.lambda) return {&t.ui, &t.uf, &t.vi, &t.vf, i.label.lambda};
  return {&t.uf, &t.ui, &t.vf, &t.vi, f.label.lambda};
}

double dipole_on(const TransitionState& i, const TransitionState& f, const PhysicalSetup& s,
                 int N) {
  const auto t = tabulate_pair(i, f, N);
  const double h = s.R / 2;
  const int dl = std::abs(i.label.lambda - f.label.lambda);
  const auto& rx = t.rules.xi;
  const auto& ry = t.rules.eta;
  if (dl == 0) {
    // z = h xi eta
    const int L = i.label.lambda;
    const double M = h * (moment(rx, t.ui, t.uf, 3, L) * moment(ry, t.vi, t.vf, 1, L) -
                          moment(rx, t.ui, t.uf, 1, L) * moment(ry, t.vi, t.vf, 3, L));
    return M * M / norm_product(t, i, f);
  }
  // x +- i y = rho e^{+-i phi}; |<x>|^2 + |<y>|^2 = K^2 / (2 J_i J_f)
  const auto o = order(t, i, f);
  const int L = o.lambda_lo;
  const double K = h * (moment(rx, *o.ulo, *o.uhi, 0, L + 2) * moment(ry, *o.vlo, *o.vhi, 0, L + 1) +
                        moment(rx, *o.ulo, *o.uhi, 0, L + 1) * moment(ry, *o.vlo, *o.vhi, 0, L + 2));
  return K * K / (2 * norm_product(t, i, f));
}

// <sigma| L_- |pi> up to -2 pi (R/2)^3: with D = z d_rho - rho d_z,
//   D = sqrt((xi^2-1)(1-eta^2)) / (xi^2-eta^2) (eta d_xi - xi d_eta),
// acting on F = sqrt((xi^2-1)(1-eta^2)) u v e^{i phi}.
double magnetic_on(const TransitionState& i, const TransitionState& f, const PhysicalSetup&,
                   int N) {
  const auto t = tabulate_pair(i, f, N);
  const auto o = order(t, i, f);
  if (o.lambda_lo != 0)
    throw DomainError("B1 matrix element implemented for sigma-pi pairs");
  const auto& rx = t.rules.xi;
  const auto& ry = t.rules.eta;
  const auto& us = *o.ulo;
  const auto& up = *o.uhi;
  const auto& vs = *o.vlo;
  const auto& vp = *o.vhi;
  auto val = [](const TabulatedChannel<double>& c) { return [&c](int k) { return c.value[k]; }; };
  auto der = [](const TabulatedChannel<double>& c) { return [&c](int k) { return c.deriv[k]; }; };
  auto q = [](double c) { return std::abs((c - 1) * (c + 1)); };
  const double T1 = bilinear(rx, q, val(us), der(up)) *
                    bilinear(ry, [&](double e) { return q(e) * e; }, val(vs), val(vp));
  const double T2 = -bilinear(rx, [&](double x) { return q(x) * x; }, val(us), val(up)) *
                    bilinear(ry, q, val(vs), der(vp));
  const double T3 = 2 * (moment(rx, us, up, 3, 0) * moment(ry, vs, vp, 1, 0) -
                         moment(rx, us, up, 1, 0) * moment(ry, vs, vp, 3, 0));
  const double M = T1 + T2 + T3;
  // |<L_x>|^2 + |<L_y>|^2 = |<L_->|^2 / 2
  return kBohrMagnetonRy * kBohrMagnetonRy * M * M / (2 * norm_product(t, i, f));
}

double quadrupole_on(const TransitionState& i, const TransitionState& f, const PhysicalSetup& s,
                     int N) {
  const auto t = tabulate_pair(i, f, N);
  const double h2 = (s.R / 2) * (s.R / 2);
  const auto& rx = t.rules.xi;
  const auto& ry = t.rules.eta;
  const auto o = order(t, i, f);
  const int L = o.lambda_lo;
  const auto& ua = *o.ulo;
  const auto& ub = *o.uhi;
  const auto& va = *o.vlo;
  const auto& vb = *o.vhi;
  const int mu = std::abs(i.label.lambda - f.label.lambda);
  double M = 0, c2 = 1;
  switch (mu) {
    case 0:
      // r^2 C_0 = z^2 - rho^2/2
      M = h2 * (moment(rx, ua, ub, 4, L) * moment(ry, va, vb, 2, L) -
                moment(rx, ua, ub, 2, L) * moment(ry, va, vb, 4, L) -
                0.5 * (moment(rx, ua, ub, 0, L + 2) * moment(ry, va, vb, 0, L + 1) +
                       moment(rx, ua, ub, 0, L + 1) * moment(ry, va, vb, 0, L + 2)));
      c2 = 1;
      break;
    case 1:
      // r^2 C_{+-1} = -+ sqrt(3/2) z rho e^{+-i phi}
      M = h2 * (moment(rx, ua, ub, 1, L + 2) * moment(ry, va, vb, 1, L + 1) +
                moment(rx, ua, ub, 1, L + 1) * moment(ry, va, vb, 1, L + 2));
      c2 = 1.5;
      break;
    case 2:
      // r^2 C_{+-2} = sqrt(3/8) rho^2 e^{+-2i phi}
      M = h2 * (moment(rx, ua, ub, 0, L + 3) * moment(ry, va, vb, 0, L + 2) +
                moment(rx, ua, ub, 0, L + 2) * moment(ry, va, vb, 0, L + 3));
      c2 = 0.375;
      break;
    default:
      return 0.0;
  }
  return kQuadrupoleNorm * c2 * M * M / norm_product(t, i, f);
}

template <typename F>
double with_plateau(F&& f, const QuadratureOptions& opt) {
  const double s1 = f(opt.N);
  if (!opt.check_plateau) return s1;
  const double s2 = f(2 * opt.N);
  const double scale = std::max(std::abs(s1), std::abs(s2));
  if (scale > 0 && !(std::abs(s2 - s1) <= opt.plateau_tol * scale))
    throw PlateauError("transition matrix element: quadrature plateau not reached", s1, s2);
  return s2;
}

}  // namespace

std::string to_string(Multipole kind) {
  switch (kind) {
    case Multipole::E1:
      return "E1";
    case Multipole::B1:
      return "B1";
    case Multipole::E2:
      return "E2";
  }
  return "?";
}

TransitionState plain_state(const TrialParamsd& params, const StateLabel& label,
                            const PhysicalSetup& setup, int quad_N) {
  QuadratureOptions q;
  q.N = quad_N;
  TransitionState st;
  st.label = label;
  st.E_total = rayleigh_quotient(params, label, setup, q).E_total;
  st.p = params.p;
  st.xi = [params, label, setup](double x) { return sample_xi(params, label, setup, x); };
  st.eta = [params, label](double e) { return sample_eta(params, label, e); };
  return st;
}

TransitionState corrected_transition_state(const CorrectedState& state, int quad_N) {
  QuadratureOptions q;
  q.N = quad_N;
  TransitionState st;
  st.label = state.label;
  st.E_total = corrected_energy(state, q).E_total;
  st.p = state.params.p;
  st.xi = [state](double x) { return state.sample_xi(x); };
  st.eta = [state](double e) { return state.sample_eta(e); };
  return st;
}

bool is_gerade(const StateLabel& label) {
  return (sign_of(label.parity) * (label.lambda % 2 == 0 ? 1 : -1)) > 0;
}

int degeneracy_factor(const StateLabel& final_state) { return final_state.lambda > 0 ? 2 : 1; }

bool allowed(Multipole kind, const StateLabel& i, const StateLabel& f) {
  const int dl = std::abs(i.lambda - f.lambda);
  const bool same_gu = is_gerade(i) == is_gerade(f);
  switch (kind) {
    case Multipole::E1:
      return dl <= 1 && !same_gu;
    case Multipole::B1:
      return dl == 1 && same_gu;
    case Multipole::E2:
      return dl <= 2 && same_gu;
  }
  return false;
}

double dipole_matrix_element(const TransitionState& i, const TransitionState& f,
                             const PhysicalSetup& setup, int quad_N) {
  if (!allowed(Multipole::E1, i.label, f.label)) return 0.0;
  return dipole_on(i, f, setup, quad_N);
}

double magnetic_matrix_element(const TransitionState& i, const TransitionState& f,
                               const PhysicalSetup& setup, int quad_N) {
  if (!allowed(Multipole::B1, i.label, f.label)) return 0.0;
  return magnetic_on(i, f, setup, quad_N);
}

double quadrupole_matrix_element(const TransitionState& i, const TransitionState& f,
                                 const PhysicalSetup& setup, int quad_N) {
  if (!allowed(Multipole::E2, i.label, f.label)) return 0.0;
  return quadrupole_on(i, f, setup, quad_N);
}

namespace {

void require_ordered(double dE) {
  if (!(dE > 0)) throw DomainError("oscillator strength needs E_final > E_initial");
}

}  // namespace

double oscillator_strength_E1(double dE, double S1, int G) {
  require_ordered(dE);
  return G * dE * S1 / 3.0;
}

double oscillator_strength_B1(double dE, double S_squared) {
  require_ordered(dE);
  return dE * S_squared / 3.0;
}

double oscillator_strength_E2(double dE, double S2, int G) {
  require_ordered(dE);
  return kFineStructure * kFineStructure * G * dE * dE * dE * S2 / 240.0;
}

TransitionRecord compute_transition(Multipole kind, const TransitionState& initial,
                                    const TransitionState& final_state,
                                    const PhysicalSetup& setup, const QuadratureOptions& options) {
  validate_molecular(setup);
  TransitionRecord rec;
  rec.kind = kind;
  rec.initial = initial.label;
  rec.final_state = final_state.label;
  rec.R = setup.R;
  rec.deltaE = final_state.E_total - initial.E_total;
  rec.G = kind == Multipole::B1 ? 1 : degeneracy_factor(final_state.label);
  if (!allowed(kind, initial.label, final_state.label)) {
    rec.forbidden = true;
    return rec;
  }
  require_ordered(rec.deltaE);
  switch (kind) {
    case Multipole::E1:
      rec.S = with_plateau([&](int n) { return dipole_on(initial, final_state, setup, n); }, options);
      rec.f = oscillator_strength_E1(rec.deltaE, rec.S, rec.G);
      break;
    case Multipole::B1:
      rec.S = with_plateau([&](int n) { return magnetic_on(initial, final_state, setup, n); },
                           options);
      rec.f = oscillator_strength_B1(rec.deltaE, rec.S);
      break;
    case Multipole::E2:
      rec.S = with_plateau([&](int n) { return quadrupole_on(initial, final_state, setup, n); },
                           options);
      rec.f = oscillator_strength_E2(rec.deltaE, rec.S, rec.G);
      break;
  }
  return rec;
}

}  // namespace twocenter

#include "twocenter/nonlinearization.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "twocenter/roots.hpp"

namespace twocenter {

namespace detail {

struct PTChannelImpl {
  Channel channel = Channel::Xi;
  int lambda = 0;
  double sigma = 1;
  double A1 = 0;
  bool has_node = false;  // u0 vanishes off the anchors: no phase correction
  std::function<ChannelSample<double>(double)> sample;
  std::function<double(double)> U;

  std::vector<double> B;     // panel boundaries
  std::vector<double> ell;   // 2 log_scale at each boundary
  std::vector<int> dir;      // per panel: +1 integrate up from below, -1 down from above
  std::vector<double> Cup;   // int_anchor^B_j g, in units exp(ell_j), up-going regions
  std::vector<double> Cdn;   // same for down-going regions
  std::vector<double> Phi;   // phase at boundaries
  int phase_anchor = 0;
  QuadratureRule<double> gl;  // reference rule on [-1, 1]

  double q(double c) const { return std::abs((c - 1.0) * (c + 1.0)); }
  double w(double c) const { return lambda == 0 ? 1.0 : std::pow(q(c), lambda); }

  // (c^2-1) u'' + 2 (Lambda+1) c u'
  double Lu(double c, const ChannelSample<double>& s) const {
    return (c - 1.0) * (c + 1.0) * s.second + 2.0 * (lambda + 1) * c * s.deriv;
  }

  // (A1 - V1) w u0^2 in units exp(ref), with V1 u0^2 = U u0^2 - u0 L u0
  double g(double c, double ref) const {
    const auto s = sample(c);
    const double v = s.value;
    return ((A1 - U(c)) * v * v + v * Lu(c, s)) * w(c) * std::exp(2.0 * s.log_scale - ref);
  }

  // signed int_a^b g, in units exp(ref)
  double integrate_g(double a, double b, double ref) const {
    if (a == b) return 0.0;
    const double h = 0.5 * (b - a), m = 0.5 * (a + b);
    CompensatedSum<double> acc;
    for (int i = 0; i < gl.count(); ++i) acc.add(gl.weights[i] * g(m + h * gl.nodes[i], ref));
    return h * acc.value();
  }

  int panel_of(double c) const {
    const auto it = std::upper_bound(B.begin(), B.end(), c);
    int k = static_cast<int>(it - B.begin()) - 1;
    return std::clamp(k, 0, static_cast<int>(B.size()) - 2);
  }

  double slope(double c) const {
    c = std::clamp(c, B.front(), B.back());
    const auto s = sample(c);
    const double qc = q(c);
    const bool at_lower = std::abs(c - B.front()) < 0.5 && channel == Channel::Xi;
    const bool near_end = qc < 1e-12 && (at_lower || channel == Channel::Eta);
    if (near_end) {
      // int_end^c w u^2 / (P u^2) -> 1 / (2 (Lambda+1)) with orientation
      const double U1 = U(c) - Lu(c, s) / s.value;
      const double orient = c < 0.0 || channel == Channel::Xi ? 1.0 : -1.0;
      return sigma * orient * (A1 - U1) / (2.0 * (lambda + 1));
    }
    if (s.value == 0.0) return 0.0;
    const int k = panel_of(c);
    const double ref = 2.0 * s.log_scale;
    double I;
    if (dir[k] > 0)
      I = Cup[k] * std::exp(ell[k] - ref) + integrate_g(B[k], c, ref);
    else
      I = Cdn[k + 1] * std::exp(ell[k + 1] - ref) + integrate_g(B[k + 1], c, ref);
    const double P = std::pow(qc, lambda + 1);
    return sigma * I / (P * s.value * s.value);
  }

  double integrate_slope(double a, double b) const {
    if (a == b) return 0.0;
    const double h = 0.5 * (b - a), m = 0.5 * (a + b);
    CompensatedSum<double> acc;
    for (int i = 0; i < gl.count(); ++i) acc.add(gl.weights[i] * slope(m + h * gl.nodes[i]));
    return h * acc.value();
  }

  double phase(double c) const {
    if (c > B.back()) return Phi.back() + slope(B.back()) * (c - B.back());
    c = std::max(c, B.front());
    const int k = panel_of(c);
    if (k >= phase_anchor) return Phi[k] + integrate_slope(B[k], c);
    return Phi[k + 1] + integrate_slope(B[k + 1], c);
  }
};

}  // namespace detail

namespace {

using detail::PTChannelImpl;

double u_potential_xi(const PhysicalSetup& s, double p, double xi) {
  return p * p * xi * xi - s.R * (s.Z1 + s.Z2) * xi;
}

double u_potential_eta(const PhysicalSetup& s, double p, double eta) {
  return p * p * eta * eta + s.R * (s.Z1 - s.Z2) * eta;
}

double resolve_p(const TrialParamsd& params, const StateLabel& label, const PhysicalSetup& setup,
                 const PTOptions& opt) {
  if (opt.p) {
    if (!(*opt.p > 0)) throw DomainError("spectral p must be positive");
    return *opt.p;
  }
  return spectral_p(params, label, setup, opt.energy_N);
}

// Panel boundaries: xi uses the same double-exponential map as the xi
// quadrature rule, eta is uniform (an even count puts eta = 0 on a boundary).
std::vector<double> xi_boundaries(double p_scale, int K) {
  const double t_lo = -4.0, t_hi = 5.4;
  std::vector<double> B(K + 1);
  for (int k = 0; k <= K; ++k) {
    const double t = t_lo + (t_hi - t_lo) * k / K;
    B[k] = 1.0 + std::exp(t - std::exp(-t)) / (2.0 * p_scale);
  }
  B[0] = 1.0;
  return B;
}

std::vector<double> eta_boundaries(int K) {
  std::vector<double> B(K + 1);
  for (int k = 0; k <= K; ++k) B[k] = -1.0 + 2.0 * k / K;
  B[K / 2] = 0.0;
  B[K] = 1.0;
  return B;
}

std::shared_ptr<PTChannelImpl> make_channel(Channel channel, const TrialParamsd& params,
                                            const StateLabel& label, const PhysicalSetup& setup,
                                            double p, const PTOptions& opt) {
  require_valid(params);
  validate_molecular(setup);
  if (opt.panels < 4 || opt.panel_order < 2) throw DomainError("PT panel grid too coarse");
  auto ch = std::make_shared<PTChannelImpl>();
  ch->channel = channel;
  ch->lambda = label.lambda;
  ch->gl = gauss_legendre<double>(opt.panel_order);
  const int K = opt.panels + (opt.panels % 2);
  const bool symmetric = channel == Channel::Eta && setup.Z1 == setup.Z2;
  if (channel == Channel::Xi) {
    ch->sigma = 1.0;
    ch->sample = [params, label, setup](double xi) {
      return twocenter::sample_xi(params, label, setup, xi);
    };
    ch->U = [setup, p](double xi) { return u_potential_xi(setup, p, xi); };
    ch->B = xi_boundaries(params.p, K);
    ch->has_node = params.xi0.has_value() || !params.P_coeffs.empty();
  } else {
    ch->sigma = -1.0;
    ch->sample = [params, label](double eta) { return twocenter::sample_eta(params, label, eta); };
    ch->U = [setup, p](double eta) { return u_potential_eta(setup, p, eta); };
    ch->B = eta_boundaries(K);
    ch->has_node = !params.Q_coeffs.empty() ||
                   (label.parity == Parity::Minus && !symmetric);
  }

  // A1 on the panel grid, relative to the largest sample
  std::vector<double> xs, ws;
  for (int k = 0; k < K; ++k) {
    const double h = 0.5 * (ch->B[k + 1] - ch->B[k]), m = 0.5 * (ch->B[k + 1] + ch->B[k]);
    for (int i = 0; i < ch->gl.count(); ++i) {
      xs.push_back(m + h * ch->gl.nodes[i]);
      ws.push_back(h * ch->gl.weights[i]);
    }
  }
  std::vector<ChannelSample<double>> ss;
  ss.reserve(xs.size());
  double top = -std::numeric_limits<double>::infinity();
  for (double c : xs) {
    ss.push_back(ch->sample(c));
    if (ss.back().value != 0.0) top = std::max(top, 2.0 * ss.back().log_scale);
  }
  CompensatedSum<double> num, den;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double c = xs[i];
    const auto& s = ss[i];
    const double f = ws[i] * ch->w(c) * std::exp(2.0 * s.log_scale - top);
    num.add(f * (ch->U(c) * s.value * s.value - s.value * ch->Lu(c, s)));
    den.add(f * s.value * s.value);
  }
  if (!(den.value() > 0)) throw ConvergenceError("PT: channel norm vanished on the panel grid");
  ch->A1 = num.value() / den.value();

  // anchors where the integral vanishes; split each gap where P u^2 peaks
  std::vector<int> anchors = {0};
  if (symmetric) anchors.push_back(K / 2);
  anchors.push_back(K);
  ch->ell.resize(K + 1);
  std::vector<double> score(K + 1, -std::numeric_limits<double>::infinity());
  for (int j = 0; j <= K; ++j) {
    const auto s = ch->sample(ch->B[j]);
    ch->ell[j] = 2.0 * s.log_scale;
    const double qj = ch->q(ch->B[j]);
    if (qj > 0 && s.value != 0.0)
      score[j] = (ch->lambda + 1) * std::log(qj) + ch->ell[j] + std::log(s.value * s.value);
  }
  ch->dir.assign(K, 1);
  ch->Cup.assign(K + 1, 0.0);
  ch->Cdn.assign(K + 1, 0.0);
  for (std::size_t a = 0; a + 1 < anchors.size(); ++a) {
    const int i0 = anchors[a], i1 = anchors[a + 1];
    int split = (i0 + i1) / 2;
    if (i1 - i0 > 1) {
      split = i0 + 1;
      for (int j = i0 + 1; j < i1; ++j)
        if (score[j] > score[split]) split = j;
    }
    for (int k = i0; k < split; ++k) ch->dir[k] = 1;
    for (int k = split; k < i1; ++k) ch->dir[k] = -1;
    ch->Cup[i0] = 0.0;
    for (int j = i0; j + 1 <= split; ++j)
      ch->Cup[j + 1] = ch->Cup[j] * std::exp(ch->ell[j] - ch->ell[j + 1]) +
                       ch->integrate_g(ch->B[j], ch->B[j + 1], ch->ell[j + 1]);
    ch->Cdn[i1] = 0.0;
    for (int j = i1; j - 1 >= split; --j)
      ch->Cdn[j - 1] = ch->Cdn[j] * std::exp(ch->ell[j] - ch->ell[j - 1]) +
                       ch->integrate_g(ch->B[j], ch->B[j - 1], ch->ell[j - 1]);
  }

  if (!ch->has_node) {
    ch->phase_anchor = symmetric ? K / 2 : 0;
    ch->Phi.assign(K + 1, 0.0);
    for (int j = ch->phase_anchor; j < K; ++j)
      ch->Phi[j + 1] = ch->Phi[j] + ch->integrate_slope(ch->B[j], ch->B[j + 1]);
    for (int j = ch->phase_anchor; j > 0; --j)
      ch->Phi[j - 1] = ch->Phi[j] + ch->integrate_slope(ch->B[j], ch->B[j - 1]);
  }
  return ch;
}

PerturbationPotential potential_of(const std::shared_ptr<PTChannelImpl>& ch,
                                   const TrialParamsd& params) {
  PerturbationPotential pot;
  pot.channel = ch->channel;
  const bool eta = ch->channel == Channel::Eta;
  auto V1 = [ch, eta](double c) {
    const auto s = ch->sample(c);
    if (s.value != 0.0) return ch->U(c) - ch->Lu(c, s) / s.value;
    if (!eta) return std::numeric_limits<double>::infinity();
    // removable zero of an odd eta factor
    const double h = 1e-6;
    double acc = 0;
    for (double d : {-h, h}) {
      const auto t = ch->sample(c + d);
      acc += ch->U(c + d) - ch->Lu(c + d, t) / t.value;
    }
    return 0.5 * acc;
  };
  pot.V1 = V1;
  if (ch->channel == Channel::Xi && params.xi0) {
    pot.singular_at = *params.xi0;
    pot.bound_C = std::numeric_limits<double>::infinity();
    return pot;
  }
  double sup = 0;
  const int K = static_cast<int>(ch->B.size()) - 1;
  for (int k = 0; k < K; ++k) {
    const double h = 0.5 * (ch->B[k + 1] - ch->B[k]), m = 0.5 * (ch->B[k + 1] + ch->B[k]);
    for (int i = 0; i < ch->gl.count(); ++i) {
      const double v = V1(m + h * ch->gl.nodes[i]);
      if (!std::isfinite(v)) {
        pot.singular_at = m + h * ch->gl.nodes[i];
        pot.bound_C = std::numeric_limits<double>::infinity();
        return pot;
      }
      sup = std::max(sup, std::abs(v));
    }
  }
  pot.bound_C = sup;
  return pot;
}

ChannelPT finish(const std::shared_ptr<PTChannelImpl>& ch, const TrialParamsd& params, double p) {
  ChannelPT pt;
  pt.channel = ch->channel;
  pt.p = p;
  pt.A1 = ch->A1;
  pt.potential = potential_of(ch, params);
  if (ch->channel == Channel::Xi && params.xi0) {
    // f1(xi0) = I(xi0) / (P(xi0) e^{-2 phi0} f0'(xi0)); the sampled value is f0
    // itself, so f0'(xi0) is the sampled derivative at the node
    const double x0 = *params.xi0;
    const auto s = ch->sample(x0);
    const int k = ch->panel_of(x0);
    const double ref = 2.0 * s.log_scale;
    const double I = ch->dir[k] > 0
                         ? ch->Cup[k] * std::exp(ch->ell[k] - ref) + ch->integrate_g(ch->B[k], x0, ref)
                         : ch->Cdn[k + 1] * std::exp(ch->ell[k + 1] - ref) +
                               ch->integrate_g(ch->B[k + 1], x0, ref);
    const double P = std::pow(ch->q(x0), ch->lambda + 1);
    const double f1 = I / (P * s.deriv);
    pt.node_shift = -f1 / s.deriv;
  }
  if (!ch->has_node) {
    pt.impl_ = ch;
    const int K = static_cast<int>(ch->B.size()) - 1;
    auto& tab = pt.table;
    for (int k = 0; k < K; ++k) {
      tab.nodes.push_back(ch->B[k]);
      const double h = 0.5 * (ch->B[k + 1] - ch->B[k]), m = 0.5 * (ch->B[k + 1] + ch->B[k]);
      for (int i = 0; i < ch->gl.count(); ++i) tab.nodes.push_back(m + h * ch->gl.nodes[i]);
    }
    tab.nodes.push_back(ch->B[K]);
    for (double c : tab.nodes) {
      tab.phase.push_back(ch->phase(c));
      tab.slope.push_back(ch->slope(c));
    }
  }
  return pt;
}

}  // namespace

double CorrectionTable::interpolate(double c) const {
  if (nodes.empty()) throw DomainError("empty correction table");
  if (c <= nodes.front()) return phase.front() + slope.front() * (c - nodes.front());
  if (c >= nodes.back()) return phase.back() + slope.back() * (c - nodes.back());
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), c);
  const std::size_t i = static_cast<std::size_t>(it - nodes.begin()) - 1;
  const double h = nodes[i + 1] - nodes[i];
  const double t = (c - nodes[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * phase[i] + (t3 - 2 * t2 + t) * h * slope[i] +
         (-2 * t3 + 3 * t2) * phase[i + 1] + (t3 - t2) * h * slope[i + 1];
}

double ChannelPT::phase(double c) const {
  if (!impl_) throw DomainError("no phase correction for a channel with a node");
  return impl_->phase(c);
}

double ChannelPT::slope(double c) const {
  if (!impl_) throw DomainError("no phase correction for a channel with a node");
  return impl_->slope(c);
}

double riccati_residual_xi(const TrialParamsd& params, const StateLabel& label,
                           const PhysicalSetup& setup, double A, double xi) {
  require_valid(params);
  if (!(xi >= 1.0)) throw DomainError("riccati_residual_xi requires xi >= 1");
  // X = f e^{-phi}: f is the xi polynomial, x = phi'
  const auto f = xi_polynomial(params, xi);
  const auto ph = phase_of_trial_xi(params, label, setup, xi);
  const double x = ph.d1, dx = ph.d2;
  const double q = xi * xi - 1.0;
  const double lhs = q * (f.v * (dx - x * x) + 2.0 * f.d * x - f.dd) +
                     2.0 * (label.lambda + 1) * xi * (f.v * x - f.d);
  return lhs - (A - u_potential_xi(setup, params.p, xi)) * f.v;
}

double spectral_p(const TrialParamsd& params, const StateLabel& label, const PhysicalSetup& setup,
                  int quad_N) {
  QuadratureOptions q;
  q.N = quad_N;
  const auto e = rayleigh_quotient(params, label, setup, q);
  return p_from_energy(e.E_total, setup);
}

PerturbationPotential build_V1_xi(const TrialParamsd& params, const StateLabel& label,
                                  const PhysicalSetup& setup, const PTOptions& options) {
  const double p = resolve_p(params, label, setup, options);
  return potential_of(make_channel(Channel::Xi, params, label, setup, p, options), params);
}

PerturbationPotential build_W1_eta(const TrialParamsd& params, const StateLabel& label,
                                   const PhysicalSetup& setup, const PTOptions& options) {
  const double p = resolve_p(params, label, setup, options);
  return potential_of(make_channel(Channel::Eta, params, label, setup, p, options), params);
}

ChannelPT first_correction_xi(const TrialParamsd& params, const StateLabel& label,
                              const PhysicalSetup& setup, const PTOptions& options) {
  const double p = resolve_p(params, label, setup, options);
  return finish(make_channel(Channel::Xi, params, label, setup, p, options), params, p);
}

ChannelPT first_correction_eta(const TrialParamsd& params, const StateLabel& label,
                               const PhysicalSetup& setup, const PTOptions& options) {
  const double p = resolve_p(params, label, setup, options);
  return finish(make_channel(Channel::Eta, params, label, setup, p, options), params, p);
}

ConsistencyResidual consistency_residual(double A1_xi, double A1_eta) {
  ConsistencyResidual r;
  r.absolute = std::abs(A1_xi - A1_eta);
  const double scale = std::max(std::abs(A1_xi), std::abs(A1_eta));
  r.relative = scale > 0 ? r.absolute / scale : 0.0;
  return r;
}

ChannelSample<double> CorrectedState::sample_xi(double c) const {
  auto s = twocenter::sample_xi(params, label, setup, c);
  const double x1 = xi.slope(c);
  s.log_scale -= xi.phase(c);
  s.deriv -= s.value * x1;
  s.second = std::numeric_limits<double>::quiet_NaN();  // not needed in weak form
  return s;
}

ChannelSample<double> CorrectedState::sample_eta(double c) const {
  auto s = twocenter::sample_eta(params, label, c);
  const double y1 = eta.slope(c);
  s.log_scale -= eta.phase(c);
  s.deriv -= s.value * y1;
  s.second = std::numeric_limits<double>::quiet_NaN();
  return s;
}

CorrectedState corrected_state(const TrialParamsd& params, const StateLabel& label,
                               const PhysicalSetup& setup, const PTOptions& options) {
  if (label.n != 0 || label.m != 0)
    throw DomainError("corrected_state: only nodeless channels carry a phase correction");
  const double p = resolve_p(params, label, setup, options);
  PTOptions fixed = options;
  fixed.p = p;
  CorrectedState st{params, label, setup, first_correction_xi(params, label, setup, fixed),
                    first_correction_eta(params, label, setup, fixed)};
  if (!st.xi.has_correction() || !st.eta.has_correction())
    throw DomainError("corrected_state: channel has a node");
  return st;
}

namespace {

double corrected_energy_on(const CorrectedState& st, int N) {
  const auto rules = build_rules<double>(st.params.p, N);
  const auto tx = tabulate(rules.xi, [&](double c) { return st.sample_xi(c); });
  const auto ty = tabulate(rules.eta, [&](double c) { return st.sample_eta(c); });
  const auto me = assemble(channel_moments(rules.xi, st.label.lambda, tx, tx),
                           channel_moments(rules.eta, st.label.lambda, ty, ty), st.setup);
  if (!(me.overlap > 0)) throw ConvergenceError("corrected state has a non-positive norm");
  return (me.kinetic + me.potential) / me.overlap + st.setup.nuclear_repulsion();
}

}  // namespace

EnergyPair corrected_energy(const CorrectedState& state, const QuadratureOptions& options) {
  const double e1 = corrected_energy_on(state, options.N);
  double e = e1;
  if (options.check_plateau) {
    const double e2 = corrected_energy_on(state, 2 * options.N);
    if (!(std::abs(e2 - e1) <= options.plateau_tol * std::max(1.0, std::abs(e2))))
      throw PlateauError("corrected energy: quadrature plateau not reached", e1, e2);
    e = e2;
  }
  return make_energy_pair(e, state.setup);
}

CorrectedOptimum reoptimize_p_corrected(const TrialParamsd& params, const StateLabel& label,
                                        const PhysicalSetup& setup, double rel_window,
                                        const PTOptions& options) {
  if (!(rel_window > 0 && rel_window < 0.5)) throw DomainError("p window must be in (0, 0.5)");
  QuadratureOptions q;
  q.N = options.energy_N;
  q.check_plateau = false;
  auto f = [&](double p) {
    TrialParamsd t = params;
    t.p = p;
    PTOptions o = options;
    o.p = p;
    return corrected_energy(corrected_state(t, label, setup, o), q).E_total;
  };
  const double p0 = params.p;
  const auto m = brent_minimize<double>(f, p0 * (1 - rel_window), p0 * (1 + rel_window),
                                        1e-13 * p0, 100);
  return {m.x, m.fx, m.evaluations};
}

void write_correction_csv(std::ostream& out, const ChannelPT& pt) {
  const bool xi = pt.channel == Channel::Xi;
  out << (xi ? "xi,phi1,x1\n" : "eta,rho1,y1\n");
  out << std::setprecision(17);
  for (std::size_t i = 0; i < pt.table.nodes.size(); ++i)
    out << pt.table.nodes[i] << ',' << pt.table.phase[i] << ',' << pt.table.slope[i] << '\n';
}

}  // namespace twocenter

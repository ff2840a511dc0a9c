#include "twocenter/variational.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "twocenter/quadrature.hpp"
#include "twocenter/roots.hpp"

namespace twocenter {

namespace {

constexpr int kDim = 7;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
Vec<Scalar> pack(const TrialParams<Scalar>& t) {
  Vec<Scalar> x(kDim);
  x << t.alpha, t.gamma, t.a1, t.a2, t.b2, t.b3, t.p;
  return x;
}

template <typename Scalar>
TrialParams<Scalar> unpack(const Vec<Scalar>& x, const TrialParams<Scalar>& like) {
  TrialParams<Scalar> t = like;
  t.alpha = x(0);
  t.gamma = x(1);
  t.a1 = x(2);
  t.a2 = x(3);
  t.b2 = x(4);
  t.b3 = x(5);
  t.p = x(6);
  return t;
}

// Overlap of a reference state with an n = 1 trial is affine in the node:
// <ref|trial(xi0)> = O1 - xi0 O0. The reference is tabulated once per rule.
template <typename Scalar>
struct NodeReference {
  TabulatedChannel<Scalar> x, y;
};

template <typename Scalar>
std::pair<Scalar, Scalar> node_coefficients(const NodeReference<Scalar>& ref,
                                            const TrialParams<Scalar>& trial,
                                            const StateLabel& label, const PhysicalSetup& setup,
                                            const RulePair<Scalar>& rules) {
  TrialParams<Scalar> rest = trial;
  rest.xi0.reset();
  const auto tx = tabulate_xi(rest, label, setup, rules.xi);
  const auto ty = tabulate_eta(rest, label, rules.eta);
  // xi sums of w ref rest xi^k, k = 0..3
  std::array<CompensatedSum<Scalar>, 4> sx;
  for (int i = 0; i < rules.xi.count(); ++i) {
    const Scalar xi = rules.xi.nodes[i];
    Scalar w = rules.xi.weights[i] * ref.x.value[i] * tx.value[i];
    if (label.lambda > 0) w *= std::pow(xi * xi - Scalar(1), label.lambda);
    for (int k = 0; k < 4; ++k) {
      sx[k].add(w);
      w *= xi;
    }
  }
  const auto my = channel_moments(rules.eta, label.lambda, ref.y, ty);
  const Scalar O1 = sx[3].value() * my.s0 - sx[1].value() * my.s2;
  const Scalar O0 = sx[2].value() * my.s0 - sx[0].value() * my.s2;
  return {O1, O0};
}

template <typename Scalar>
NodeReference<Scalar> make_node_reference(const TrialParams<Scalar>& ref, const StateLabel& label,
                                          const PhysicalSetup& setup,
                                          const RulePair<Scalar>& rules) {
  StateLabel rl = label;
  rl.n = 0;
  return {tabulate_xi(ref, rl, setup, rules.xi), tabulate_eta(ref, rl, rules.eta)};
}

template <typename Scalar>
OptimizationResult optimize_impl(const StateLabel& label, const PhysicalSetup& setup,
                                 const TrialParamsd& init_d, const OptimizeOptions& opt) {
  validate_molecular(setup);
  if (label.n > 1) throw DomainError("optimization supports n <= 1 only");
  require_valid(init_d);
  TrialParams<Scalar> best = init_d.cast<Scalar>();
  if (label.n == 0) best.xi0.reset();

  std::optional<TrialParams<Scalar>> ref;
  if (label.n == 1) {
    if (opt.node_reference) {
      ref = opt.node_reference->cast<Scalar>();
    } else {
      StateLabel rl = label;
      rl.n = 0;
      OptimizeOptions ro = opt;
      ro.node_reference.reset();
      ref = optimize_state(rl, setup, seed_params(rl, setup.R), ro).params.cast<Scalar>();
    }
    ref->xi0.reset();
    if (!best.xi0) best.xi0 = Scalar(1.5);
  }

  OptimizationResult out;
  Scalar best_e = std::numeric_limits<Scalar>::infinity();
  bool all_converged = true;
  for (int round = 0; round < opt.max_rounds; ++round) {
    const Scalar p_scale = ref ? std::min(best.p, ref->p) : best.p;
    const auto rules = build_rules<Scalar>(p_scale, opt.quad_N);
    std::optional<NodeReference<Scalar>> nref;
    if (ref) nref = make_node_reference(*ref, label, setup, rules);

    auto place_node = [&](TrialParams<Scalar>& t) -> bool {
      if (!nref) return true;
      const auto [O1, O0] = node_coefficients(*nref, t, label, setup, rules);
      if (!(O0 != Scalar(0))) return false;
      const Scalar x0 = O1 / O0;
      if (!(x0 > Scalar(1))) return false;
      t.xi0 = x0;
      return true;
    };
    auto energy = [&](const Vec<Scalar>& x) -> Scalar {
      TrialParams<Scalar> t = unpack(x, best);
      if (!params_valid(t)) return std::numeric_limits<Scalar>::infinity();
      if (!place_node(t)) return std::numeric_limits<Scalar>::infinity();
      return variational_energy(t, label, setup, rules);
    };

    const Vec<Scalar> x0 = pack(best);
    Vec<Scalar> step(kDim);
    for (int i = 0; i < kDim; ++i)
      step(i) = Scalar(0.05) * std::max<Scalar>(std::abs(x0(i)), Scalar(0.02));
    const Scalar e_start = energy(x0);
    const auto nm = nelder_mead<Scalar>(energy, x0, step, opt.simplex);
    out.iterations += nm.iterations;
    out.evaluations += nm.evaluations;
    for (Scalar v : nm.best_history) {
      const double d = static_cast<double>(std::min(v, e_start));
      out.history.push_back(out.history.empty() ? d : std::min(d, out.history.back()));
    }
    all_converged = nm.converged;
    const Scalar gain = best_e - nm.fx;
    if (nm.fx < best_e) {
      best = unpack(nm.x, best);
      place_node(best);
      best_e = nm.fx;
    }
    if (round > 0 && !(gain > Scalar(opt.round_tol))) break;
  }
  if (!std::isfinite(static_cast<double>(best_e)))
    throw ConvergenceError("optimizer found no admissible parameters");

  out.params = best.template cast<double>();
  out.energy.E_total = static_cast<double>(best_e);
  out.energy.E_prime = out.energy.E_total - setup.nuclear_repulsion();
  out.energy.p = out.energy.E_prime < 0 ? p_from_energy(out.energy.E_total, setup) : 0.0;
  out.converged = all_converged;
  out.p_consistency = out.energy.E_prime < 0 ? std::abs(out.params.p - out.energy.p)
                                             : std::numeric_limits<double>::infinity();
  return out;
}

// Tabulated seeds (alpha, gamma, a1, a2, b2, b3, p) at a few distances.
struct SeedRow {
  double R;
  std::array<double, kDim> x;
};

const std::vector<SeedRow> kSeed1ssg = {
    {1.997193, {1.48407, 1.0299, 0.9164, 0.05384, 0.06, 0.00011, 1.483403}},
    {6.0, {3.32381, 0.96357, 2.597355, 0.53443, 0.588072, 0.00552, 3.49506}},
    {20.0, {10.0453, 0.95774, 9.8775, 6.8392, 6.9016, 1.352, 10.4882}},
};

const std::vector<SeedRow> kSeed2psu = {
    {6.0, {3.24715, 0.95706, 2.84566, 0.22098, 0.23611, -0.0027, 3.43971}},
    {12.54525, {6.5275, 0.97045, 6.075, 1.46757, 1.5349, 0.1675, 6.75434}},
    {20.0, {10.7397, 1.03027, 9.8077, 2.3784, 2.43705, 0.367, 10.4882}},
};

TrialParamsd from_array(const std::array<double, kDim>& x) {
  TrialParamsd t;
  t.alpha = x[0];
  t.gamma = x[1];
  t.a1 = x[2];
  t.a2 = x[3];
  t.b2 = x[4];
  t.b3 = x[5];
  t.p = x[6];
  return t;
}

TrialParamsd seed_from_table(const std::vector<SeedRow>& rows, double R) {
  if (R <= rows.front().R) return from_array(rows.front().x);
  if (R >= rows.back().R) {
    // everything but gamma grows roughly linearly with R at large R
    auto x = rows.back().x;
    const double s = R / rows.back().R;
    for (int i = 0; i < kDim; ++i)
      if (i != 1) x[i] *= s;
    return from_array(x);
  }
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    if (R <= rows[k + 1].R) {
      const double w = (R - rows[k].R) / (rows[k + 1].R - rows[k].R);
      std::array<double, kDim> x{};
      for (int i = 0; i < kDim; ++i) x[i] = (1 - w) * rows[k].x[i] + w * rows[k + 1].x[i];
      return from_array(x);
    }
  }
  return from_array(rows.back().x);
}

// Principal quantum number of the hydrogen level reached as R -> infinity.
int separated_atom_level(const StateLabel& label) {
  if (label.n == 0 && label.lambda == 0) return 1;
  if (label.n == 0 && label.lambda == 2) return 3;
  return 2;
}

}  // namespace

OptimizationResult optimize_state(const StateLabel& label, const PhysicalSetup& setup,
                                  const TrialParamsd& init, const OptimizeOptions& options) {
  if (options.precision == Precision::Extended)
    return optimize_impl<long double>(label, setup, init, options);
  return optimize_impl<double>(label, setup, init, options);
}

double solve_node(const StateLabel& label, const PhysicalSetup& setup, const TrialParamsd& params,
                  const TrialParamsd& reference, int quad_N) {
  if (label.n != 1) throw DomainError("solve_node applies to n = 1 states");
  validate_molecular(setup);
  TrialParamsd ref = reference;
  ref.xi0.reset();
  const auto rules = build_rules<double>(std::min(params.p, ref.p), quad_N);
  const auto nref = make_node_reference(ref, label, setup, rules);
  const auto [O1, O0] = node_coefficients(nref, params, label, setup, rules);
  const double scale = std::max(std::abs(O1), std::abs(O0));
  auto f = [&](double x0) { return (O1 - x0 * O0) / scale; };
  const double lo = 1.0 + 1e-9, hi = 1e4;
  const double flo = f(lo), fhi = f(hi);
  if ((flo > 0) == (fhi > 0))
    throw ConvergenceError("no node: overlap has no sign change on [1+1e-9, 1e4] (" +
                           std::to_string(flo) + ", " + std::to_string(fhi) + ")");
  return brent_root<double>(f, lo, hi, 1e-13).x;
}

double normalized_overlap(const TrialParamsd& a, const StateLabel& la, const TrialParamsd& b,
                          const StateLabel& lb, const PhysicalSetup& setup, int quad_N) {
  if (la.lambda != lb.lambda) return 0.0;
  if (la.parity != lb.parity) return 0.0;
  const auto rules = build_rules<double>(std::min(a.p, b.p), quad_N);
  const auto ax = tabulate_xi(a, la, setup, rules.xi);
  const auto ay = tabulate_eta(a, la, rules.eta);
  const auto bx = tabulate_xi(b, lb, setup, rules.xi);
  const auto by = tabulate_eta(b, lb, rules.eta);
  const auto ab = assemble(channel_moments(rules.xi, la.lambda, ax, bx),
                           channel_moments(rules.eta, la.lambda, ay, by), setup);
  const auto aa = assemble(channel_moments(rules.xi, la.lambda, ax, ax),
                           channel_moments(rules.eta, la.lambda, ay, ay), setup);
  const auto bb = assemble(channel_moments(rules.xi, lb.lambda, bx, bx),
                           channel_moments(rules.eta, lb.lambda, by, by), setup);
  // common exponents cancel: ab carries (la_x + lb_x + ...), aa and bb twice each side
  const double log_ratio = ab.log_scale - 0.5 * (aa.log_scale + bb.log_scale);
  return ab.overlap / std::sqrt(aa.overlap * bb.overlap) * std::exp(log_ratio);
}

double p_consistency_check(const OptimizationResult& result, const PhysicalSetup& setup) {
  return std::abs(result.params.p - p_from_energy(result.energy.E_total, setup));
}

TrialParamsd seed_params(const StateLabel& label, double R) {
  if (!(R > 0)) throw DomainError("seed_params requires R > 0");
  if (label.m != 0 || label.n > 1) throw DomainError("no variational preset for " + to_string(label));
  if (label.n == 0 && label.lambda == 0)
    return seed_from_table(label.parity == Parity::Plus ? kSeed1ssg : kSeed2psu, R);

  // E' between the united-atom value -4/n^2 and the separated-atom value
  // -1/N^2 - 2/R, blended with a decaying weight.
  const auto des = united_atom_designation(label);
  const int nu = des ? des->orbital.n : label.n + label.m + label.lambda + 1;
  const int N = separated_atom_level(label);
  const double e_ua = -4.0 / (nu * nu);
  const double e_sa = -1.0 / (N * N) - 2.0 / R;
  const double w = std::exp(-R / nu);
  const double e_prime = w * e_ua + (1 - w) * e_sa;
  TrialParamsd t;
  t.p = 0.5 * R * std::sqrt(-e_prime);
  t.alpha = t.p;
  t.gamma = 1.0;
  t.a1 = 0.8 * t.p * R / (R + 2.0);
  t.a2 = 0.01 * R * R;
  t.b2 = 0.01 * R * R;
  t.b3 = 0.0;
  return t;
}

std::vector<ScanPoint> scan_R(const StateLabel& label, const std::vector<double>& R_grid,
                              bool warm_start, const OptimizeOptions& options) {
  if (!std::is_sorted(R_grid.begin(), R_grid.end()))
    throw DomainError("scan_R requires a sorted R grid");
  std::vector<ScanPoint> out;
  std::optional<TrialParamsd> prev;
  OptimizeOptions point_options = options;
  point_options.node_reference.reset();  // the reference depends on R
  for (double R : R_grid) {
    ScanPoint pt;
    pt.R = R;
    try {
      PhysicalSetup s;
      s.R = R;
      const TrialParamsd init = (warm_start && prev) ? *prev : seed_params(label, R);
      pt.result = optimize_state(label, s, init, point_options);
      prev = pt.result->params;
    } catch (const Error& e) {
      pt.error = e.what();
    }
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace twocenter

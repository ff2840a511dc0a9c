#include "twocenter/united_atom.hpp"

#include <cmath>

namespace twocenter {

double HydrogenicOrbital::energy() const {
  return -Z * Z / (orbital.n * orbital.n);
}

double HydrogenicOrbital::radial(double r) const {
  const int n = orbital.n;
  const int l = orbital.l;
  const double k = 2 * Z / n;
  const double rho = k * r;
  const double norm = std::sqrt(k * k * k * std::tgamma(n - l) / (2.0 * n * std::tgamma(n + l + 1)));
  return norm * std::pow(rho, l) * std::exp(-rho / 2) *
         std::assoc_laguerre(static_cast<unsigned>(n - l - 1), static_cast<unsigned>(2 * l + 1), rho);
}

double HydrogenicOrbital::angular(double cos_theta) const {
  return std::sph_legendre(static_cast<unsigned>(orbital.l), static_cast<unsigned>(orbital.m),
                           std::acos(cos_theta));
}

HydrogenicOrbital hydrogenic_reference(int n, int l, int m, double Z) {
  if (!(0 <= m && m <= l && l < n)) throw DomainError("hydrogenic orbital needs 0 <= m <= l < n");
  if (!(Z > 0)) throw DomainError("hydrogenic orbital needs Z > 0");
  return {{n, l, m}, Z};
}

LimitForm limit_form(const StateLabel& label) {
  const auto d = united_atom_designation(label);
  if (!d) throw DomainError("no united-atom designation for " + to_string(label));
  LimitForm f{label, d->orbital, std::nullopt};
  if (d->node_constant != 0.0) f.node_constant = d->node_constant;
  return f;
}

double united_atom_A(const StateLabel& label) {
  const int l = limit_form(label).orbital.l;
  const int L = label.lambda;
  return -static_cast<double>((l - L) * (l + L + 1)) + 0.0;
}

std::vector<double> limit_sequence(int count) {
  std::vector<double> R;
  for (int k = 0; k < count; ++k) R.push_back(std::ldexp(0.5, -k));
  return R;
}

namespace {

std::vector<double> orders(const std::vector<LimitPoint>& pts, double LimitPoint::*dev) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double a = std::abs(pts[k].*dev);
    const double b = std::abs(pts[k + 1].*dev);
    const double ratio = pts[k].R / pts[k + 1].R;
    out.push_back(a > 0 && b > 0 ? std::log(a / b) / std::log(ratio) : std::nan(""));
  }
  return out;
}

}  // namespace

LimitReport limit_convergence_probe(const StateLabel& label, const std::vector<double>& R_sequence,
                                    const OracleOptions& options) {
  LimitReport rep;
  rep.form = limit_form(label);
  const double n = rep.form.orbital.n;
  const double A0 = united_atom_A(label);
  for (double R : R_sequence) {
    PhysicalSetup s;
    s.R = R;
    const auto o = solve_bispectral(label, s, options);
    LimitPoint pt;
    pt.R = R;
    pt.E_prime = o.E_prime;
    pt.A = o.A;
    pt.R_over_p = R / o.p;
    pt.dev_R_over_p = pt.R_over_p - n;
    pt.dev_E_prime = o.E_prime + 4.0 / (n * n);
    pt.dev_A = o.A - A0;
    rep.points.push_back(pt);
  }
  rep.order_R_over_p = orders(rep.points, &LimitPoint::dev_R_over_p);
  rep.order_E_prime = orders(rep.points, &LimitPoint::dev_E_prime);
  rep.order_A = orders(rep.points, &LimitPoint::dev_A);
  return rep;
}

}  // namespace twocenter

#include "twocenter/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "twocenter/roots.hpp"

namespace twocenter {

namespace {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// <l+1,L| eta |l,L> for normalized associated Legendre functions.
template <typename Scalar>
Scalar eta_coupling(int l, int lambda) {
  if (l <= lambda) return Scalar(0);
  const Scalar num = Scalar(l - lambda) * Scalar(l + lambda);
  const Scalar den = Scalar(2 * l - 1) * Scalar(2 * l + 1);
  using std::sqrt;
  return sqrt(num / den);
}

template <typename Scalar>
Scalar angular_at_size(Scalar p, int lambda, int m, Parity parity, int K) {
  Vec<Scalar> diag(K), off(K - 1);
  const int l0 = lambda + (parity == Parity::Plus ? 0 : 1);
  const Scalar p2 = p * p;
  for (int j = 0; j < K; ++j) {
    const int l = l0 + 2 * j;
    const Scalar a_up = eta_coupling<Scalar>(l + 1, lambda);
    const Scalar a_dn = eta_coupling<Scalar>(l, lambda);
    diag(j) = Scalar(lambda * (lambda + 1)) - Scalar(l) * Scalar(l + 1) +
              p2 * (a_up * a_up + a_dn * a_dn);
    if (j + 1 < K) off(j) = p2 * a_up * eta_coupling<Scalar>(l + 2, lambda);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("angular eigensolver failed");
  return es.eigenvalues()(K - 1 - m);
}

// Power-series step for (xi^2-1) u'' + 2(L+1) xi u' + (q0 + q1 t + q2 t^2) u = 0
// around xi = c, t = xi - c. With c = 1 the series is the regular Frobenius
// solution and only u(c) is used.
template <typename Scalar>
struct SeriesState {
  Scalar u, du;
  int sign_changes;
};

template <typename Scalar>
class XiSeries {
 public:
  XiSeries(Scalar p, Scalar A, Scalar B, int lambda) : p_(p), A_(A), B_(B), L_(lambda) {}

  // Evaluate the series about c with initial data (u0, du0) at offset h,
  // counting sign changes of u on a sample of interior points.
  SeriesState<Scalar> step(Scalar c, Scalar u0, Scalar du0, Scalar h) const {
    using std::abs;
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    const Scalar q0 = -p_ * p_ * c * c + B_ * c + A_;
    const Scalar q1 = Scalar(-2) * p_ * p_ * c + B_;
    const Scalar q2 = -p_ * p_;
    const Scalar cc = c * c - Scalar(1);
    const bool frob = cc == Scalar(0);
    const Scalar Lp = Scalar(2 * (L_ + 1));
    coeffs_.clear();
    coeffs_.push_back(u0);
    if (frob) {
      // 2(k+1)(k+L+1) a_{k+1} = -([k(k+2L+1) + q0] a_k + q1 a_{k-1} + q2 a_{k-2})
      coeffs_.push_back(-q0 * u0 / Scalar(2 * (L_ + 1)));
    } else {
      coeffs_.push_back(du0);
    }
    Scalar scale = abs(u0) + abs(du0 * h);
    const Scalar ah = abs(h);
    Scalar hk = frob ? ah : ah * ah;  // |h|^k for the coefficient produced next
    int quiet = 0;
    const int kmax = 600;
    for (int k = static_cast<int>(coeffs_.size()) - 1; k < kmax; ++k) {
      auto a = [&](int j) { return j >= 0 ? coeffs_[j] : Scalar(0); };
      Scalar next;
      const Scalar Sk = Scalar(k);
      if (frob) {
        // coeffs_ holds a_0..a_k; produce a_{k+1}
        next = -((Sk * (Sk + Scalar(2 * L_ + 1)) + q0) * a(k) + q1 * a(k - 1) +
                 q2 * a(k - 2)) /
               (Scalar(2) * (Sk + Scalar(1)) * (Sk + Scalar(L_ + 1)));
      } else {
        // coeffs_ holds a_0..a_{k+1}; produce a_{k+2} from the t^k balance
        const int j = k - 1;  // balance index
        const Scalar Sj = Scalar(j);
        const Scalar num = (Scalar(2) * c * (Sj + Scalar(1)) * Sj + Lp * c * (Sj + Scalar(1))) *
                               a(j + 1) +
                           (Sj * (Sj - Scalar(1)) + Lp * Sj + q0) * a(j) + q1 * a(j - 1) +
                           q2 * a(j - 2);
        next = -num / (cc * (Sj + Scalar(2)) * (Sj + Scalar(1)));
      }
      coeffs_.push_back(next);
      const Scalar term = abs(next) * hk;
      hk *= ah;
      scale = std::max(scale, term);
      if (term <= Scalar(0.01) * eps * scale)
        ++quiet;
      else
        quiet = 0;
      if (quiet >= 4) break;
    }
    if (quiet < 4) throw ConvergenceError("xi series did not converge within the step");
    SeriesState<Scalar> out{};
    eval(h, out.u, out.du);
    // sign changes of u inside the step
    Scalar prev = u0;
    if (frob) prev = coeffs_[0];
    const int samples = 16;
    int changes = 0;
    for (int s = 1; s <= samples; ++s) {
      Scalar v, dv;
      eval(h * Scalar(s) / Scalar(samples), v, dv);
      if ((v > 0 && prev < 0) || (v < 0 && prev > 0)) ++changes;
      if (v != 0) prev = v;
    }
    out.sign_changes = changes;
    return out;
  }

 private:
  void eval(Scalar t, Scalar& v, Scalar& dv) const {
    v = 0;
    dv = 0;
    for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 0; --k) {
      dv = dv * t + v;
      v = v * t + coeffs_[k];
    }
  }

  Scalar p_, A_, B_;
  int L_;
  mutable std::vector<Scalar> coeffs_;
};

template <typename Scalar>
Scalar turning_offset(Scalar p, Scalar A, Scalar B) {
  using std::sqrt;
  // -p^2 xi^2 + B xi + A = 0, larger root
  const Scalar disc = B * B + Scalar(4) * p * p * A;
  if (disc <= 0) return Scalar(0);
  const Scalar xt = (B + sqrt(disc)) / (Scalar(2) * p * p);
  return xt - Scalar(1);
}

// Smaller root of -p^2 xi^2 + B xi + A when A < 0 (inner forbidden region);
// zero when there is none.
template <typename Scalar>
Scalar inner_turning_point(Scalar p, Scalar A, Scalar B) {
  using std::sqrt;
  const Scalar disc = B * B + Scalar(4) * p * p * A;
  if (!(A < 0) || disc <= 0) return Scalar(0);
  return (B - sqrt(disc)) / (Scalar(2) * p * p);
}

}  // namespace

template <typename Scalar>
AngularEigen<Scalar> angular_eigenvalue(Scalar p, int lambda, int m, Parity parity) {
  using std::abs;
  if (lambda < 0 || m < 0) throw DomainError("angular_eigenvalue: negative quantum number");
  if (std::isnan(p)) throw DomainError("angular_eigenvalue: p is nan");
  p = abs(p);  // the equation only sees p^2
  const Scalar tol = std::is_same_v<Scalar, double> ? Scalar(1e-13) : Scalar(1e-16);
  int K = std::max(24 + lambda, m + 4);
  Scalar prev = angular_at_size(p, lambda, m, parity, K);
  const int kmax = 4096;
  while (K < kmax) {
    K *= 2;
    const Scalar cur = angular_at_size(p, lambda, m, parity, K);
    if (abs(cur - prev) <= tol * std::max<Scalar>(Scalar(1), abs(cur))) return {cur, K};
    prev = cur;
  }
  throw ConvergenceError("angular basis not converged at size " + std::to_string(K) +
                         ", last value " + std::to_string(static_cast<double>(prev)));
}

template <typename Scalar>
RadialMatch<Scalar> radial_match(Scalar p, Scalar A, Scalar B, int lambda) {
  using std::abs;
  using std::sqrt;
  if (!(p > 0)) throw DomainError("radial_match: p must be positive");
  const XiSeries<Scalar> series(p, A, B, lambda);
  const Scalar tm = std::clamp(turning_offset(p, A, B), Scalar(0.01), Scalar(1));
  Scalar xm = Scalar(1) + tm;
  // Near the united-atom limit states with A < 0 are confined between two
  // turning points far from xi = 1; match in the allowed region instead.
  const Scalar x_in = inner_turning_point(p, A, B);
  if (x_in > Scalar(2)) xm = Scalar(0.5) * (x_in + Scalar(1) + turning_offset(p, A, B));
  const Scalar inv_p = Scalar(1) / p;
  const Scalar kscale = p + Scalar(1);

  // outward: Frobenius segment, then continuation
  int nodes = 0;
  const Scalar t0 = std::min(tm, std::min(inv_p, Scalar(0.5)));
  auto st = series.step(Scalar(1), Scalar(1), Scalar(0), t0);
  nodes += st.sign_changes;
  Scalar x = Scalar(1) + t0;
  Scalar ur = st.u, dur = st.du;
  while (x < xm) {
    const Scalar h = std::min({xm - x, Scalar(0.5) * (x - Scalar(1)), inv_p});
    const Scalar n = std::max(abs(ur), abs(dur) / kscale);
    st = series.step(x, ur / n, dur / n, h);
    nodes += st.sign_changes;
    ur = st.u;
    dur = st.du;
    x = (xm - x <= h) ? xm : x + h;
  }

  // inward from deep in the forbidden region
  const Scalar sigma = B / (Scalar(2) * p) - Scalar(lambda + 1);
  const Scalar xf = std::max(xm, Scalar(1) + std::max(tm, turning_offset(p, A, B))) +
                    Scalar(24) * inv_p;
  Scalar ui = 1, dui = sigma / xf - p;
  x = xf;
  while (x > xm) {
    const Scalar h = std::min({x - xm, Scalar(0.5) * (x - Scalar(1)), inv_p});
    const Scalar n = std::max(abs(ui), abs(dui) / kscale);
    st = series.step(x, ui / n, dui / n, -h);
    nodes += st.sign_changes;
    ui = st.u;
    dui = st.du;
    x = (x - xm <= h) ? xm : x - h;
  }

  const Scalar nr = sqrt(ur * ur + (dur / kscale) * (dur / kscale));
  const Scalar ni = sqrt(ui * ui + (dui / kscale) * (dui / kscale));
  RadialMatch<Scalar> out;
  out.mismatch = (ur * dui - dur * ui) / kscale / (nr * ni);
  out.nodes = nodes;
  out.xi_match = xm;
  out.xi_far = xf;
  return out;
}

template AngularEigen<double> angular_eigenvalue<double>(double, int, int, Parity);
template AngularEigen<long double> angular_eigenvalue<long double>(long double, int, int,
                                                                   Parity);
template RadialMatch<double> radial_match<double>(double, double, double, int);
template RadialMatch<long double> radial_match<long double>(long double, long double,
                                                            long double, int);

RadialMatch<double> radial_mismatch(double E_total, double A, const PhysicalSetup& setup,
                                    int lambda) {
  const double p = p_from_energy(E_total, setup);
  return radial_match<double>(p, A, setup.R * (setup.Z1 + setup.Z2), lambda);
}

namespace {

template <typename Scalar>
OracleResult solve_impl(const StateLabel& label, const PhysicalSetup& setup,
                        const OracleOptions& opt) {
  using std::abs;
  validate_molecular(setup);
  if (setup.Z1 != setup.Z2)
    throw DomainError("oracle requires equal charges (definite eta parity)");
  const Scalar R = Scalar(setup.R);
  const Scalar B = R * Scalar(setup.Z1 + setup.Z2);
  int basis = 0;
  auto mismatch = [&](Scalar p) {
    const auto ang = angular_eigenvalue<Scalar>(p, label.lambda, label.m, label.parity);
    basis = ang.basis_size;
    return radial_match<Scalar>(p, ang.A, B, label.lambda);
  };

  // The electronic energy lies above the united-atom value, so p is in
  // (0, R (Z1+Z2)/2]. Scan for sign changes, narrow window first.
  const Scalar p_max = B / Scalar(2);
  std::vector<std::pair<Scalar, Scalar>> windows;
  if (opt.p_guess && *opt.p_guess > 0) {
    const Scalar g = Scalar(*opt.p_guess);
    windows.push_back({g * Scalar(0.97), std::min(g * Scalar(1.03), p_max)});
    windows.push_back({g * Scalar(0.7), std::min(g * Scalar(1.4), p_max)});
  }
  windows.push_back({p_max * Scalar(1e-3), p_max});

  const Scalar xtol = std::is_same_v<Scalar, double> ? Scalar(1e-15) : Scalar(1e-18);
  for (const auto& [lo, hi] : windows) {
    const int n_grid = 120;
    using std::log;
    using std::exp;
    const Scalar llo = log(lo), lhi = log(hi);
    // Far below the eigenvalue (p -> 0) the continuation can fail; such
    // grid points are skipped rather than ending the scan.
    auto sampled = [&](Scalar p) {
      try {
        return mismatch(p).mismatch;
      } catch (const ConvergenceError&) {
        return std::numeric_limits<Scalar>::quiet_NaN();
      }
    };
    Scalar p_prev = lo;
    Scalar f_prev = sampled(lo);
    for (int i = 1; i <= n_grid; ++i) {
      const Scalar p_cur = exp(llo + (lhi - llo) * Scalar(i) / Scalar(n_grid));
      const Scalar f_cur = sampled(p_cur);
      using std::isnan;
      if (!isnan(f_prev) && !isnan(f_cur) && (f_prev > 0) != (f_cur > 0)) {
        try {
          auto f = [&](Scalar p) { return mismatch(p).mismatch; };
          const auto root = brent_root<Scalar>(f, p_prev, p_cur, xtol * p_cur);
          const auto ang = angular_eigenvalue<Scalar>(root.x, label.lambda, label.m, label.parity);
          const auto rm = radial_match<Scalar>(root.x, ang.A, B, label.lambda);
          // sin vanishes at eigenvalues only when the two shots are parallel,
          // but a large |mismatch| at the root means a sign jump, not a zero
          if (rm.nodes == label.n && abs(rm.mismatch) < Scalar(1e-6)) {
            OracleResult r;
            const Scalar e_prime = Scalar(-4) * root.x * root.x / (R * R);
            r.p = static_cast<double>(root.x);
            r.A = static_cast<double>(ang.A);
            r.E_prime = static_cast<double>(e_prime);
            r.E_total = static_cast<double>(e_prime + Scalar(2) * Scalar(setup.Z1 * setup.Z2) / R);
            r.angular_basis_size = ang.basis_size;
            r.radial_mismatch = static_cast<double>(abs(rm.mismatch));
            r.bracket_iterations = root.iterations;
            r.radial_nodes = rm.nodes;
            return r;
          }
        } catch (const ConvergenceError&) {
          // continuation failed inside a spurious bracket far below the root
        }
      }
      p_prev = p_cur;
      f_prev = f_cur;
    }
  }
  throw ConvergenceError("oracle: no eigenvalue with " + std::to_string(label.n) +
                         " radial nodes for state " + to_string(label));
}

}  // namespace

OracleResult solve_bispectral(const StateLabel& label, const PhysicalSetup& setup,
                              const OracleOptions& options) {
  if (options.precision == Precision::Extended)
    return solve_impl<long double>(label, setup, options);
  return solve_impl<double>(label, setup, options);
}

}  // namespace twocenter

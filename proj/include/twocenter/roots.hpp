#pragma once

// Scalar root finding and minimization on a bracket (Brent's methods).

#include <cmath>
#include <limits>
#include <utility>

#include "twocenter/core.hpp"

namespace twocenter {

template <typename Scalar>
struct RootResult {
  Scalar x = 0;
  Scalar fx = 0;
  int iterations = 0;
};

/// Brent root of f on [a, b]; f(a) and f(b) must differ in sign.
/// Stops when the bracket is below xtol + 4 eps |x| or f hits zero.
template <typename Scalar, typename F>
RootResult<Scalar> brent_root(F&& f, Scalar a, Scalar b, Scalar xtol, int max_iter = 200) {
  using std::abs;
  Scalar fa = f(a);
  Scalar fb = f(b);
  if (fa == 0) return {a, fa, 0};
  if (fb == 0) return {b, fb, 0};
  if ((fa > 0) == (fb > 0)) throw ConvergenceError("brent_root: no sign change on bracket");
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Scalar c = a, fc = fa, d = b - a, e = d;
  int it = 0;
  for (; it < max_iter; ++it) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (abs(fc) < abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const Scalar tol = Scalar(2) * eps * abs(b) + Scalar(0.5) * xtol;
    const Scalar m = Scalar(0.5) * (c - b);
    if (abs(m) <= tol || fb == 0) break;
    if (abs(e) >= tol && abs(fa) > abs(fb)) {
      Scalar p, q;
      const Scalar s = fb / fa;
      if (a == c) {
        p = Scalar(2) * m * s;
        q = Scalar(1) - s;
      } else {
        const Scalar qq = fa / fc;
        const Scalar r = fb / fc;
        p = s * (Scalar(2) * m * qq * (qq - r) - (b - a) * (r - Scalar(1)));
        q = (qq - Scalar(1)) * (r - Scalar(1)) * (s - Scalar(1));
      }
      if (p > 0)
        q = -q;
      else
        p = -p;
      if (Scalar(2) * p < std::min(Scalar(3) * m * q - abs(tol * q), abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += abs(d) > tol ? d : (m > 0 ? tol : -tol);
    fb = f(b);
  }
  return {b, fb, it};
}

template <typename Scalar>
struct MinimumResult {
  Scalar x = 0;
  Scalar fx = 0;
  int evaluations = 0;
};

/// Brent minimization of f on [a, b] (golden section with parabolic
/// steps). Stops when the bracket is below 2 (xtol + eps |x|).
template <typename Scalar, typename F>
MinimumResult<Scalar> brent_minimize(F&& f, Scalar a, Scalar b, Scalar xtol,
                                     int max_iter = 200) {
  using std::abs;
  using std::sqrt;
  const Scalar golden = Scalar(0.5) * (Scalar(3) - sqrt(Scalar(5)));
  const Scalar eps = sqrt(std::numeric_limits<Scalar>::epsilon());
  Scalar x = a + golden * (b - a), w = x, v = x;
  Scalar fx = f(x), fw = fx, fv = fx;
  Scalar d = 0, e = 0;
  int evals = 1;
  for (int it = 0; it < max_iter; ++it) {
    const Scalar m = Scalar(0.5) * (a + b);
    const Scalar tol = eps * abs(x) + xtol;
    if (abs(x - m) <= Scalar(2) * tol - Scalar(0.5) * (b - a)) break;
    bool golden_step = true;
    if (abs(e) > tol) {
      Scalar r = (x - w) * (fx - fv);
      Scalar q = (x - v) * (fx - fw);
      Scalar p = (x - v) * q - (x - w) * r;
      q = Scalar(2) * (q - r);
      if (q > 0) p = -p;
      q = abs(q);
      const Scalar e_old = e;
      e = d;
      if (abs(p) < abs(Scalar(0.5) * q * e_old) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const Scalar u = x + d;
        if (u - a < Scalar(2) * tol || b - u < Scalar(2) * tol) d = x < m ? tol : -tol;
        golden_step = false;
      }
    }
    if (golden_step) {
      e = (x < m ? b : a) - x;
      d = golden * e;
    }
    const Scalar u = abs(d) >= tol ? x + d : x + (d > 0 ? tol : -tol);
    const Scalar fu = f(u);
    ++evals;
    if (fu <= fx) {
      (u < x ? b : a) = x;
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      (u < x ? a : b) = u;
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return {x, fx, evals};
}

}  // namespace twocenter

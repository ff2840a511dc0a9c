#pragma once

// Derivative-free simplex minimization with deterministic restarts.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace twocenter {

struct NelderMeadOptions {
  int max_evals = 0;         // per run; 0 means 400 * dim
  double xtol_rel = 1e-9;    // simplex diameter, scaled per coordinate
  double ftol_abs = 1e-12;   // spread of function values across the simplex
  int restarts = 3;          // extra runs from the best point with shrunk steps
  double restart_shrink = 0.1;
};

template <typename Scalar>
struct NelderMeadResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  Scalar fx = std::numeric_limits<Scalar>::infinity();
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<Scalar> best_history;  // best value after each iteration
};

namespace detail {

template <typename Scalar>
Scalar scaled_diameter(const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& s,
                       const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& typical) {
  using std::abs;
  Scalar d = 0;
  for (std::size_t j = 1; j < s.size(); ++j)
    for (Eigen::Index i = 0; i < s[0].size(); ++i)
      d = std::max(d, abs(s[j](i) - s[0](i)) / typical(i));
  return d;
}

}  // namespace detail

/// One Nelder-Mead run from x0 with initial edge lengths `step`.
template <typename Scalar, typename F>
NelderMeadResult<Scalar> nelder_mead_run(F&& f, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x0,
                                         const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& step,
                                         const NelderMeadOptions& opt) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using std::abs;
  const Eigen::Index n = x0.size();
  const int budget = opt.max_evals > 0 ? opt.max_evals : 400 * static_cast<int>(n);
  // scale for the relative diameter: |x0_i|, floored by the step so that
  // parameters near zero are measured in absolute terms
  Vec typical(n);
  for (Eigen::Index i = 0; i < n; ++i)
    typical(i) = std::max(abs(x0(i)), std::max(abs(step(i)), Scalar(1e-3)));

  NelderMeadResult<Scalar> res;
  std::vector<Vec> simplex(n + 1, x0);
  std::vector<Scalar> fv(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) simplex[i + 1](i) += step(i);
  for (Eigen::Index j = 0; j <= n; ++j) fv[j] = f(simplex[j]);
  res.evaluations = static_cast<int>(n + 1);

  std::vector<int> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    std::vector<Vec> s2;
    std::vector<Scalar> f2;
    for (int k : order) {
      s2.push_back(simplex[k]);
      f2.push_back(fv[k]);
    }
    simplex.swap(s2);
    fv.swap(f2);
  };

  const Scalar alpha = 1, gamma = 2, rho = 0.5, sigma = 0.5;
  sort_simplex();
  while (res.evaluations < budget) {
    ++res.iterations;
    res.best_history.push_back(fv[0]);
    const Scalar spread = fv[n] - fv[0];
    if (std::isfinite(static_cast<double>(spread)) && spread <= Scalar(opt.ftol_abs) &&
        detail::scaled_diameter(simplex, typical) <= Scalar(opt.xtol_rel)) {
      res.converged = true;
      break;
    }
    Vec centroid = Vec::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) centroid += simplex[j];
    centroid /= Scalar(n);

    const Vec xr = centroid + alpha * (centroid - simplex[n]);
    const Scalar fr = f(xr);
    ++res.evaluations;
    if (fr < fv[0]) {
      const Vec xe = centroid + gamma * (xr - centroid);
      const Scalar fe = f(xe);
      ++res.evaluations;
      if (fe < fr) {
        simplex[n] = xe;
        fv[n] = fe;
      } else {
        simplex[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
    } else {
      const bool outside = fr < fv[n];
      const Vec xc = outside ? Vec(centroid + rho * (xr - centroid))
                             : Vec(centroid + rho * (simplex[n] - centroid));
      const Scalar fc = f(xc);
      ++res.evaluations;
      if (fc < (outside ? fr : fv[n])) {
        simplex[n] = xc;
        fv[n] = fc;
      } else {
        for (Eigen::Index j = 1; j <= n; ++j) {
          simplex[j] = simplex[0] + sigma * (simplex[j] - simplex[0]);
          fv[j] = f(simplex[j]);
        }
        res.evaluations += static_cast<int>(n);
      }
    }
    sort_simplex();
  }
  res.x = simplex[0];
  res.fx = fv[0];
  return res;
}

/// Nelder-Mead with restarts from the incumbent using steps shrunk by
/// opt.restart_shrink each time. Deterministic for fixed inputs.
template <typename Scalar, typename F>
NelderMeadResult<Scalar> nelder_mead(F&& f, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x0,
                                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& step,
                                     const NelderMeadOptions& opt = {}) {
  auto best = nelder_mead_run<Scalar>(f, x0, step, opt);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> s = step;
  for (int r = 0; r < opt.restarts; ++r) {
    s *= Scalar(opt.restart_shrink);
    auto next = nelder_mead_run<Scalar>(f, best.x, s, opt);
    const int evals = best.evaluations + next.evaluations;
    const int iters = best.iterations + next.iterations;
    auto hist = best.best_history;
    for (Scalar v : next.best_history) hist.push_back(std::min(v, hist.empty() ? v : hist.back()));
    if (next.fx <= best.fx) {
      best = next;
    } else {
      best.converged = best.converged && next.converged;
    }
    best.evaluations = evals;
    best.iterations = iters;
    best.best_history = std::move(hist);
  }
  return best;
}

}  // namespace twocenter

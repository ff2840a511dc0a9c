#pragma once

// Shared test helpers.
//
// exact_state() builds the separated eigenfunctions independently of the
// trial ansatz: the regular Taylor series at c = 1 of
//   (c^2-1) u'' + 2 (Lambda+1) c u' = (p^2 c^2 - B c - A) u
// (B = R (Z1+Z2) on xi, 0 on eta), continued on xi by an inward RK4 sweep
// from the decaying asymptote. Eigenvalues (p, A) come from the oracle.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "params_io.hpp"
#include "tables.hpp"
#include "twocenter/oracle.hpp"
#include "twocenter/transitions.hpp"
#include "twocenter/variational.hpp"

namespace twocenter::test {

using LD = long double;

struct TaylorSeries {
  std::vector<LD> c;

  LD value(LD t) const {
    LD s = 0;
    for (auto k = c.size(); k-- > 0;) s = s * t + c[k];
    return s;
  }
  LD deriv(LD t) const {
    LD s = 0;
    for (auto k = c.size(); k-- > 1;) s = s * t + LD(k) * c[k];
    return s;
  }
};

inline TaylorSeries regular_series(LD p, LD A, LD B, int lambda, int terms) {
  TaylorSeries s;
  s.c.assign(terms, 0);
  s.c[0] = 1;
  const LD p2 = p * p;
  for (int k = 0; k + 1 < terms; ++k) {
    LD r = -(LD(k) * (k - 1) + LD(2) * (lambda + 1) * k - (p2 - B - A)) * s.c[k];
    if (k >= 1) r += (2 * p2 - B) * s.c[k - 1];
    if (k >= 2) r += p2 * s.c[k - 2];
    s.c[k + 1] = r / (LD(k + 1) * (2 * k + 2 * lambda + 2));
  }
  return s;
}

/// Xi solution: series up to 1 + split, Hermite-interpolated RK4 beyond.
class RadialSolution {
 public:
  RadialSolution(LD p, LD A, LD B, int lambda) {
    series_ = regular_series(p, A, B, lambda, 120);
    const LD x0 = 1 + kSplit;
    hi_ = 1.8L + 60.0L / p;
    const int n = static_cast<int>((hi_ - x0) / 2e-4L);
    const LD h = (hi_ - x0) / n;
    auto f = [&](LD x, LD u, LD d, LD& du, LD& dd) {
      du = d;
      dd = ((p * p * x * x - B * x - A) * u - 2 * (lambda + 1) * x * d) / (x * x - 1);
    };
    x_.resize(n + 1);
    u_.resize(n + 1);
    d_.resize(n + 1);
    LD x = hi_, u = 1e-30L, d = u * (-p + (B / (2 * p) - lambda - 1) / x);
    x_[n] = x;
    u_[n] = u;
    d_[n] = d;
    for (int k = n; k > 0; --k) {
      LD a1, b1, a2, b2, a3, b3, a4, b4;
      const LD s = -h;
      f(x, u, d, a1, b1);
      f(x + s / 2, u + s / 2 * a1, d + s / 2 * b1, a2, b2);
      f(x + s / 2, u + s / 2 * a2, d + s / 2 * b2, a3, b3);
      f(x + s, u + s * a3, d + s * b3, a4, b4);
      u += s / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
      d += s / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
      x += s;
      x_[k - 1] = x;
      u_[k - 1] = u;
      d_[k - 1] = d;
    }
    const LD scale = series_.value(kSplit) / u_[0];
    for (auto& v : u_) v *= scale;
    for (auto& v : d_) v *= scale;
    log_derivative_jump_ = static_cast<double>(d_[0] / u_[0] - series_.deriv(kSplit) /
                                                                   series_.value(kSplit));
  }

  ChannelSample<double> operator()(double c) const {
    ChannelSample<double> s{0, 0, 0, std::nan("")};
    if (c - 1 <= kSplit) {
      s.value = static_cast<double>(series_.value(c - 1));
      s.deriv = static_cast<double>(series_.deriv(c - 1));
      return s;
    }
    if (c >= hi_) return s;
    auto i = std::upper_bound(x_.begin(), x_.end(), LD(c)) - x_.begin();
    i = std::clamp<decltype(i)>(i, 1, x_.size() - 1);
    const LD h = x_[i] - x_[i - 1], t = (c - x_[i - 1]) / h;
    const LD t2 = t * t, t3 = t2 * t;
    s.value = static_cast<double>((2 * t3 - 3 * t2 + 1) * u_[i - 1] +
                                  (t3 - 2 * t2 + t) * h * d_[i - 1] + (-2 * t3 + 3 * t2) * u_[i] +
                                  (t3 - t2) * h * d_[i]);
    s.deriv = static_cast<double>((6 * t2 - 6 * t) / h * u_[i - 1] +
                                  (3 * t2 - 4 * t + 1) * d_[i - 1] +
                                  (-6 * t2 + 6 * t) / h * u_[i] + (3 * t2 - 2 * t) * d_[i]);
    return s;
  }

  /// Mismatch of u'/u where the series hands over to the integration;
  /// small only at an eigenvalue.
  double log_derivative_jump() const { return log_derivative_jump_; }

  /// First sign change of u on (1, hi), bisected.
  std::optional<double> first_node() const {
    double prev = 1.0001, fp = (*this)(prev).value;
    for (double x = 1.001; x < static_cast<double>(hi_); x += 0.001) {
      const double fx = (*this)(x).value;
      if (fx * fp < 0) {
        double lo = prev, hi = x;
        for (int k = 0; k < 60; ++k) {
          const double mid = 0.5 * (lo + hi);
          ((*this)(mid).value * fp > 0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
      }
      prev = x;
      fp = fx;
    }
    return std::nullopt;
  }

 private:
  static constexpr LD kSplit = 0.8L;
  TaylorSeries series_;
  LD hi_ = 0;
  std::vector<LD> x_, u_, d_;
  double log_derivative_jump_ = 0;
};

struct ExactState {
  OracleResult eigen;
  std::shared_ptr<RadialSolution> xi;
  TransitionState state;
};

inline ExactState exact_state(const std::string& name, double R) {
  const StateLabel label = *label_from_name(name);
  PhysicalSetup setup;
  setup.R = R;
  ExactState out;
  out.eigen = solve_bispectral(label, setup, {Precision::Extended, {}});
  const auto& e = out.eigen;
  out.xi = std::make_shared<RadialSolution>(e.p, e.A, LD(2) * R, label.lambda);
  auto eta = std::make_shared<TaylorSeries>(regular_series(e.p, e.A, 0, label.lambda, 200));
  const int parity = sign_of(label.parity);
  out.state.label = label;
  out.state.E_total = e.E_total;
  out.state.p = e.p;
  out.state.xi = [xi = out.xi](double c) { return (*xi)(c); };
  out.state.eta = [eta, parity](double c) {
    ChannelSample<double> s{0, 0, 0, std::nan("")};
    s.value = static_cast<double>(eta->value(std::abs(c) - 1));
    s.deriv = static_cast<double>(eta->deriv(std::abs(c) - 1));
    if (c < 0) {
      s.value *= parity;
      s.deriv *= -parity;
    }
    return s;
  };
  return out;
}

inline PhysicalSetup at(double R) {
  PhysicalSetup s;
  s.R = R;
  return s;
}

inline StateLabel label(const std::string& name) { return *label_from_name(name); }

/// Optimized states shared across test cases (seed and warm start from
/// the nearest smaller cached R of the same label, lower energy kept).
/// Nodal states are placed against the cached sector ground state.
inline const OptimizationResult& optimized(const std::string& name, double R) {
  static std::map<std::pair<std::string, double>, OptimizationResult> cache;
  const auto key = std::make_pair(name, R);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const TrialParamsd* warm = nullptr;
  for (const auto& [k, v] : cache)
    if (k.first == name && k.second < R) warm = &v.params;
  const TrialParamsd* ground = nullptr;
  if (label(name).n == 1) {
    const auto g = io::sector_ground(label(name));
    ground = &optimized(io::label_name(g), R).params;
  }
  auto r = io::optimize_best(label(name), at(R), io::RunOptions{}, warm, ground);
  return cache.emplace(key, std::move(r)).first->second;
}

/// Transition state of the optimized trial (phase-corrected when nodeless).
inline const TransitionState& trial_state(const std::string& name, double R) {
  static std::map<std::pair<std::string, double>, TransitionState> cache;
  const auto key = std::make_pair(name, R);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto t = io::transition_state(label(name), optimized(name, R).params, at(R));
  return cache.emplace(key, std::move(t)).first->second;
}

inline std::filesystem::path golden_dir() {
#ifdef TWOCENTER_DATA_SOURCE
  return std::filesystem::path(TWOCENTER_DATA_SOURCE) / "golden";
#else
  return io::golden_dir();
#endif
}

struct GoldenValue {
  double value = 0;
  std::string printed;
};

/// Value of the golden row (dataset, state, R as printed, quantity, source).
inline std::optional<GoldenValue> golden(const std::string& dataset, const std::string& state,
                                         const std::string& R, const std::string& quantity,
                                         const std::string& source = "ansatz") {
  static std::map<std::string, io::CsvTable> tables;
  auto it = tables.find(dataset);
  if (it == tables.end())
    it = tables.emplace(dataset, io::read_csv(golden_dir() / (dataset + ".csv"))).first;
  for (const auto& row : it->second.rows)
    if (row[0] == state && row[1] == R && row[2] == quantity && row[4] == source)
      return GoldenValue{std::stod(row[3]), row[3]};
  return std::nullopt;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace twocenter::test

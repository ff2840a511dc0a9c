#pragma once

// Variational optimization of the trial parameters at fixed R, the
// orthogonality condition fixing the xi node of n = 1 states, and
// continuation scans in R.

#include <optional>
#include <string>
#include <vector>

#include "twocenter/core.hpp"
#include "twocenter/nelder_mead.hpp"
#include "twocenter/trial.hpp"

namespace twocenter {

struct OptimizeOptions {
  int quad_N = 64;
  Precision precision = Precision::Standard;
  // tighter than the simplex defaults: the energy valley is long and flat,
  // and a looser spread stops the rounds early
  NelderMeadOptions simplex{0, 1e-12, 1e-15};
  int max_rounds = 6;           // fresh simplices around the incumbent
  double round_tol = 1e-13;     // stop when a round gains less than this (Ry)
  /// Ground state of the same parity and Lambda, used to place the node of
  /// an n = 1 state. Optimized internally when absent.
  std::optional<TrialParamsd> node_reference;
};

struct OptimizationResult {
  TrialParamsd params;
  EnergyPair energy;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  double p_consistency = 0;       // |p_opt - p_from_energy(E_opt)|
  std::vector<double> history;    // best energy after each simplex iteration
};

/// Minimize the Rayleigh quotient over (alpha, gamma, a1, a2, b2, b3, p);
/// for n = 1 the node follows from orthogonality at every evaluation.
OptimizationResult optimize_state(const StateLabel& label, const PhysicalSetup& setup,
                                  const TrialParamsd& init, const OptimizeOptions& options = {});

/// Node xi0 of an n = 1 state making it orthogonal to `reference`
/// (the n = 0 state of the same symmetry). Throws ConvergenceError when
/// the overlap has no sign change on [1 + eps, xi_max].
double solve_node(const StateLabel& label, const PhysicalSetup& setup, const TrialParamsd& params,
                  const TrialParamsd& reference, int quad_N = 64);

/// <a|b> / sqrt(<a|a><b|b>) for two states with the same Lambda.
double normalized_overlap(const TrialParamsd& a, const StateLabel& la, const TrialParamsd& b,
                          const StateLabel& lb, const PhysicalSetup& setup, int quad_N = 64);

/// |p_opt - sqrt(-E' R^2 / 4)|.
double p_consistency_check(const OptimizationResult& result, const PhysicalSetup& setup);

/// Built-in starting parameters: tabulated sets where available (scaled
/// or interpolated in R), otherwise a crude interpolation between the
/// united-atom and separated-atom limits.
TrialParamsd seed_params(const StateLabel& label, double R);

struct ScanPoint {
  double R = 0;
  std::optional<OptimizationResult> result;
  std::string error;
};

/// Optimize along an increasing R grid. With warm_start each point starts
/// from the previous optimum; otherwise from seed_params. Failures are
/// recorded per point and the scan continues.
std::vector<ScanPoint> scan_R(const StateLabel& label, const std::vector<double>& R_grid,
                              bool warm_start, const OptimizeOptions& options = {});

}  // namespace twocenter

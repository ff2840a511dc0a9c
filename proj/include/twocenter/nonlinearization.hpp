#pragma once

// Non-linearization perturbation theory around a trial state.
//
// Each channel function is written as f exp(-phi). Substituting the trial
// phase into the Riccati form of the channel equation with A0 = 0 defines
// the potential V0 it solves exactly; V1 = V - V0 is the perturbation.
// The channel operator is
//
//   L = (c^2 - 1) d^2/dc^2 + 2 (Lambda + 1) c d/dc,   L u = (U - A) u,
//
// with U = p^2 xi^2 - R (Z1 + Z2) xi on xi and U = p^2 eta^2 + R (Z1 - Z2) eta
// on eta. First order gives
//
//   A1 = int V1 w u0^2 / int w u0^2,
//   x1 = sigma / (P u0^2) int_anchor^c (A1 - V1) w u0^2,
//
// w = |c^2-1|^Lambda, P = |c^2-1|^{Lambda+1}, sigma = +1 on xi and -1 on eta.
// The integral vanishes at both ends of the channel (that is what fixes
// A1), so it is taken from whichever end keeps the cancellation harmless.

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "twocenter/core.hpp"
#include "twocenter/quadrature.hpp"
#include "twocenter/trial.hpp"

namespace twocenter {

struct PTOptions {
  /// Spectral p entering U. Absent: taken from the trial's own Rayleigh
  /// quotient energy, which is what the channel equations refer to.
  std::optional<double> p;
  int panels = 48;       // composite Gauss-Legendre panels per channel
  int panel_order = 12;  // nodes per panel
  int energy_N = kDefaultQuadratureNodes;
};

/// Phase correction sampled on the panel grid; `slope` is the analytic
/// derivative (x1 or y1) at each node.
struct CorrectionTable {
  std::vector<double> nodes;
  std::vector<double> phase;
  std::vector<double> slope;

  /// Cubic Hermite interpolation using the tabulated slopes; constant
  /// extrapolation of the slope outside the table.
  double interpolate(double c) const;
};

namespace detail {
struct PTChannelImpl;
}

/// Perturbation potential of one channel.
struct PerturbationPotential {
  Channel channel = Channel::Xi;
  std::function<double(double)> V1;
  double bound_C = 0;                 // sup |V1| over the sampled domain
  std::optional<double> singular_at;  // pole of V1 (node of a prefactor)
};

struct ChannelPT {
  Channel channel = Channel::Xi;
  double p = 0;  // spectral p used in U
  double A1 = 0;
  PerturbationPotential potential;
  /// First-order node shift of an n = 1 xi channel: f1(xi0) / f0'(xi0)
  /// moved to the monomial. Zero for nodeless channels.
  double node_shift = 0;
  /// Empty for channels with a node off the symmetry point (n = 1 on xi).
  CorrectionTable table;

  bool has_correction() const { return impl_ != nullptr; }
  /// phi1 (or rho1) by direct integration of the slope; phi1(1) = 0 on
  /// xi, rho1(0) = 0 on eta.
  double phase(double c) const;
  /// x1 (or y1) from the integral formula.
  double slope(double c) const;

  std::shared_ptr<const detail::PTChannelImpl> impl_;
};

/// Left side minus right side of the xi Riccati equation for the trial
/// phase, with V = p^2 xi^2 - R (Z1 + Z2) xi and p from the parameters.
double riccati_residual_xi(const TrialParamsd& params, const StateLabel& label,
                           const PhysicalSetup& setup, double A, double xi);

/// p^2 = -E' R^2 / 4 with E from the trial's Rayleigh quotient.
double spectral_p(const TrialParamsd& params, const StateLabel& label,
                  const PhysicalSetup& setup, int quad_N = kDefaultQuadratureNodes);

PerturbationPotential build_V1_xi(const TrialParamsd& params, const StateLabel& label,
                                  const PhysicalSetup& setup, const PTOptions& options = {});
PerturbationPotential build_W1_eta(const TrialParamsd& params, const StateLabel& label,
                                   const PhysicalSetup& setup, const PTOptions& options = {});

ChannelPT first_correction_xi(const TrialParamsd& params, const StateLabel& label,
                              const PhysicalSetup& setup, const PTOptions& options = {});
ChannelPT first_correction_eta(const TrialParamsd& params, const StateLabel& label,
                               const PhysicalSetup& setup, const PTOptions& options = {});

struct ConsistencyResidual {
  double absolute = 0;
  double relative = 0;
};

ConsistencyResidual consistency_residual(double A1_xi, double A1_eta);

/// X0 Y0 exp(-phi1 - rho1) for a nodeless xi channel.
struct CorrectedState {
  TrialParamsd params;
  StateLabel label;
  PhysicalSetup setup;
  ChannelPT xi;
  ChannelPT eta;

  ChannelSample<double> sample_xi(double xi) const;
  ChannelSample<double> sample_eta(double eta) const;
};

/// Throws DomainError for n = 1 states (the xi correction has a pole at
/// the node; only A1 and the node shift are produced there).
CorrectedState corrected_state(const TrialParamsd& params, const StateLabel& label,
                               const PhysicalSetup& setup, const PTOptions& options = {});

/// Rayleigh quotient of the corrected state with the N vs 2N plateau check.
EnergyPair corrected_energy(const CorrectedState& state, const QuadratureOptions& options = {});

struct CorrectedOptimum {
  double p = 0;
  double E_total = 0;
  int evaluations = 0;
};

/// Minimize the corrected energy over p (trial and spectral p moved
/// together, other parameters fixed) inside p0 (1 +- rel_window).
CorrectedOptimum reoptimize_p_corrected(const TrialParamsd& params, const StateLabel& label,
                                        const PhysicalSetup& setup, double rel_window = 1e-4,
                                        const PTOptions& options = {});

/// CSV "<c>,<phase>,<slope>" rows of the correction table, 17 s.d.
void write_correction_csv(std::ostream& out, const ChannelPT& pt);

}  // namespace twocenter

#pragma once

// E1, B1 and E2 oscillator strengths between two-center states.
//
// States are products u(xi) v(eta) with the (xi^2-1)^{Lambda/2} and
// (1-eta^2)^{Lambda/2} prefactors split off, times exp(i Lambda phi). The phi
// integrals are done in closed form, so every matrix element reduces to
// short sums of products of 1D integrals. Lengths in bohr, energies in Ry.

#include <functional>
#include <optional>
#include <string>

#include "twocenter/core.hpp"
#include "twocenter/nonlinearization.hpp"
#include "twocenter/quadrature.hpp"
#include "twocenter/trial.hpp"

namespace twocenter {

/// Fine-structure constant (CODATA 2018).
constexpr double kFineStructure = 7.2973525693e-3;
/// Bohr magneton in Rydberg atomic units (hbar = 1, m = 1/2, e^2 = 2).
extern const double kBohrMagnetonRy;
/// Scale of S(2) relative to |<i| r^2 C(2)_mu |f>|^2 (Racah-normalized C).
extern const double kQuadrupoleNorm;

enum class Multipole { E1, B1, E2 };

std::string to_string(Multipole kind);

/// A state ready for matrix elements: reduced channel samplers, its
/// energy and the decay scale used to build the xi rule.
struct TransitionState {
  StateLabel label;
  double E_total = 0;
  double p = 0;
  std::function<ChannelSample<double>(double)> xi;
  std::function<ChannelSample<double>(double)> eta;
};

/// Plain trial state; the energy is its Rayleigh quotient.
TransitionState plain_state(const TrialParamsd& params, const StateLabel& label,
                            const PhysicalSetup& setup, int quad_N = kDefaultQuadratureNodes);

/// Phase-corrected state X0 Y0 exp(-phi1 - rho1) with its corrected energy.
TransitionState corrected_transition_state(const CorrectedState& state,
                                           int quad_N = kDefaultQuadratureNodes);

/// u or g under inversion: the eta parity flag times (-1)^Lambda.
bool is_gerade(const StateLabel& label);

/// G = 2 for pi and delta finals, 1 for sigma finals.
int degeneracy_factor(const StateLabel& final_state);

/// Whether the multipole connects the two labels (Lambda and g/u rules).
bool allowed(Multipole kind, const StateLabel& initial, const StateLabel& final_state);

/// |<i| r |f>|^2 summed over components, normalized states.
double dipole_matrix_element(const TransitionState& i, const TransitionState& f,
                             const PhysicalSetup& setup, int quad_N = kDefaultQuadratureNodes);

/// |S|^2 with S = -mu_B <i| L |f>, summed over components.
double magnetic_matrix_element(const TransitionState& i, const TransitionState& f,
                               const PhysicalSetup& setup, int quad_N = kDefaultQuadratureNodes);

/// S(2) for the rank-2 component mu = Lambda_f - Lambda_i.
double quadrupole_matrix_element(const TransitionState& i, const TransitionState& f,
                                 const PhysicalSetup& setup,
                                 int quad_N = kDefaultQuadratureNodes);

/// f = G dE S / 3 (Ry, bohr). Throws DomainError unless dE > 0.
double oscillator_strength_E1(double dE, double S1, int G);
/// f = dE |S|^2 / 3.
double oscillator_strength_B1(double dE, double S_squared);
/// f = alpha^2 G dE^3 S2 / 240.
double oscillator_strength_E2(double dE, double S2, int G);

struct TransitionRecord {
  Multipole kind = Multipole::E1;
  StateLabel initial;
  StateLabel final_state;
  double R = 0;
  double deltaE = 0;  // Ry
  double S = 0;       // S(1), |S|^2 or S(2) according to kind
  int G = 1;
  double f = 0;
  bool forbidden = false;
};

/// Matrix element and oscillator strength, with an N vs 2N plateau check
/// on S (relative tolerance plateau_tol). Forbidden pairs give S = f = 0.
TransitionRecord compute_transition(Multipole kind, const TransitionState& initial,
                                    const TransitionState& final_state,
                                    const PhysicalSetup& setup,
                                    const QuadratureOptions& options = {});

}  // namespace twocenter

#pragma once

// Independent solver for the separated two-center equations. The angular
// channel is a tridiagonal eigenproblem in associated Legendre functions;
// the radial channel is shot from both ends by power-series continuation
// and matched near the classical turning point. The eigenvalue is located
// as a root in p, with A = A(p) from the angular channel.

#include <optional>

#include "twocenter/core.hpp"

namespace twocenter {

template <typename Scalar>
struct AngularEigen {
  Scalar A = 0;
  int basis_size = 0;
};

/// m-th (descending) separation constant of the eta equation within the
/// given parity class. Requires Z1 == Z2 upstream (parity is exact).
template <typename Scalar>
AngularEigen<Scalar> angular_eigenvalue(Scalar p, int lambda, int m, Parity parity);

template <typename Scalar>
struct RadialMatch {
  Scalar mismatch = 0;    // sin of the angle between the two (u, u'/k) vectors
  int nodes = 0;          // zeros of the matched function on (1, inf)
  Scalar xi_match = 0;
  Scalar xi_far = 0;
};

/// Mismatch of the xi equation at (p, A), with B = R (Z1 + Z2).
template <typename Scalar>
RadialMatch<Scalar> radial_match(Scalar p, Scalar A, Scalar B, int lambda);

/// Same, driven by the total energy (Ry). Throws DomainError when E' >= 0.
RadialMatch<double> radial_mismatch(double E_total, double A, const PhysicalSetup& setup,
                                    int lambda);

struct OracleOptions {
  Precision precision = Precision::Standard;
  std::optional<double> p_guess;
};

struct OracleResult {
  double E_total = 0;
  double E_prime = 0;
  double A = 0;
  double p = 0;
  int angular_basis_size = 0;
  double radial_mismatch = 0;
  int bracket_iterations = 0;
  int radial_nodes = 0;
};

/// Joint (E, A) eigenpair of the state with the requested quantum numbers.
/// Throws ConvergenceError when no root with n radial nodes is found.
OracleResult solve_bispectral(const StateLabel& label, const PhysicalSetup& setup,
                              const OracleOptions& options = {});

}  // namespace twocenter

#pragma once

// R -> 0 limit: He+ reference orbitals, the correspondence between
// molecular labels and atomic orbitals, and numerical probes of the limit
// along a geometric sequence of R.

#include <optional>
#include <vector>

#include "twocenter/core.hpp"
#include "twocenter/oracle.hpp"

namespace twocenter {

/// Hydrogen-like orbital R_nl(r) P_l^m(cos theta) e^{i m phi}, both
/// factors unit-normalized (r^2 dr and d Omega). Lengths in bohr.
struct HydrogenicOrbital {
  AtomicOrbital orbital;
  double Z = 2.0;

  double energy() const;  // -Z^2 / n^2 Ry
  double radial(double r) const;
  /// Normalized theta factor including 1/sqrt(2 pi) from phi.
  double angular(double cos_theta) const;
  /// Zeros of the radial and angular factors: (n-l-1, l-m).
  int radial_nodes() const { return orbital.n - orbital.l - 1; }
  int angular_nodes() const { return orbital.l - orbital.m; }
};

/// Throws DomainError unless 0 <= m <= l < n and Z > 0.
HydrogenicOrbital hydrogenic_reference(int n, int l, int m, double Z = 2.0);

/// Limiting form of the trial function for a label with a designation:
/// the atomic orbital and the constant c of the node polynomial, if any.
struct LimitForm {
  StateLabel label;
  AtomicOrbital orbital;
  std::optional<double> node_constant;
};

/// Throws DomainError for labels without a designation.
LimitForm limit_form(const StateLabel& label);

/// A at p = 0: -(l - Lambda)(l + Lambda + 1).
double united_atom_A(const StateLabel& label);

struct LimitPoint {
  double R = 0;
  double E_prime = 0;
  double A = 0;
  double R_over_p = 0;
  double dev_R_over_p = 0;  // R/p - n
  double dev_E_prime = 0;   // E' + 4/n^2
  double dev_A = 0;         // A - A(p = 0)
};

struct LimitReport {
  LimitForm form;
  std::vector<LimitPoint> points;
  /// log2 of successive deviation ratios (one entry per consecutive pair
  /// of points): the apparent order of convergence in R.
  std::vector<double> order_R_over_p;
  std::vector<double> order_E_prime;
  std::vector<double> order_A;
};

/// R = 0.5 * 2^-k, k = 0..count-1.
std::vector<double> limit_sequence(int count = 5);

/// Oracle solves along the sequence. Oracle failures propagate.
LimitReport limit_convergence_probe(const StateLabel& label,
                                    const std::vector<double>& R_sequence = limit_sequence(),
                                    const OracleOptions& options = {});

}  // namespace twocenter

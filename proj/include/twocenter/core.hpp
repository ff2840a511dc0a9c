#pragma once

// Domain types shared by every module: state labels, the physical setup
// (internuclear distance and charges) and the energy/p bookkeeping.
//
// Units: energies in Rydberg, lengths in bohr.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace twocenter {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input (bad label, parameter outside its domain, bad flags).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to converge or produced an unusable result.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

enum class Parity { Plus, Minus };

inline int sign_of(Parity p) { return p == Parity::Plus ? 1 : -1; }

/// Quantum numbers (n, m, Lambda, parity): n nodes in xi, m nodes in eta,
/// Lambda = |projection of L on the molecular axis|, parity under eta -> -eta.
struct StateLabel {
  int n = 0;
  int m = 0;
  int lambda = 0;
  Parity parity = Parity::Plus;

  friend bool operator==(const StateLabel&, const StateLabel&) = default;
};

/// Hydrogenic orbital (n, l, m) of the united atom He+.
struct AtomicOrbital {
  int n = 1;
  int l = 0;
  int m = 0;

  friend bool operator==(const AtomicOrbital&, const AtomicOrbital&) = default;
};

/// One row of the molecular-orbital / united-atom correspondence.
struct Designation {
  StateLabel label;
  std::string_view name;        // e.g. "1sσg"
  std::string_view ascii_name;  // e.g. "1ssg"
  AtomicOrbital orbital;
  double node_constant = 0.0;   // c of the limiting polynomial, 0 when absent
};

/// Spectroscopic name of a label; empty when the label has no designation.
std::optional<Designation> united_atom_designation(const StateLabel& label);

/// Inverse lookup, accepting the unicode name ("3dπg"), the ASCII name
/// ("3dpg") or the tuple form "(0,0,1,-)".
std::optional<StateLabel> label_from_name(std::string_view name);

/// Labels with variational presets: n=m=0 at Lambda=0,1,2 and n=1, m=0 at
/// Lambda=0, both parities.
bool has_variational_preset(const StateLabel& label);

std::string to_string(const StateLabel& label);

struct PhysicalSetup {
  double R = 2.0;
  double Z1 = 1.0;
  double Z2 = 1.0;

  double nuclear_repulsion() const { return 2.0 * Z1 * Z2 / R; }
};

/// Throws DomainError unless R > 0 and both charges are positive.
void validate_molecular(const PhysicalSetup& setup);

struct EnergyPair {
  double E_total = 0.0;
  double E_prime = 0.0;  // E_total - 2 Z1 Z2 / R
  double p = 0.0;        // sqrt(-E_prime R^2 / 4)
};

/// p = sqrt(-(E - 2 Z1 Z2/R) R^2 / 4). Throws DomainError("unbound channel")
/// when E' >= 0.
double p_from_energy(double E_total, const PhysicalSetup& setup);

/// Inverse of p_from_energy.
double energy_from_p(double p, const PhysicalSetup& setup);

EnergyPair make_energy_pair(double E_total, const PhysicalSetup& setup);

struct SeparatedState {
  StateLabel label;
  PhysicalSetup setup;
  EnergyPair energy;
  double A = 0.0;
  double norm = 1.0;
};

/// Scalar used by the numerical kernels: double or long double.
enum class Precision { Standard, Extended };

constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace twocenter

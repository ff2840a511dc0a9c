#include "twocenter/core.hpp"

#include <array>
#include <cstdio>

namespace twocenter {

namespace {

constexpr Parity P = Parity::Plus;
constexpr Parity M = Parity::Minus;

const std::array<Designation, 10> kDesignations = {{
    {{0, 0, 0, P}, "1sσg", "1ssg", {1, 0, 0}, 0.0},
    {{0, 0, 0, M}, "2pσu", "2psu", {2, 1, 0}, 0.0},
    {{0, 0, 1, P}, "2pπu", "2ppu", {2, 1, 1}, 0.0},
    {{0, 0, 1, M}, "3dπg", "3dpg", {3, 2, 1}, 0.0},
    {{0, 0, 2, P}, "3dδg", "3ddg", {3, 2, 2}, 0.0},
    {{0, 0, 2, M}, "4fδu", "4fdu", {4, 3, 2}, 0.0},
    {{1, 0, 0, P}, "2sσg", "2ssg", {2, 0, 0}, 2.0},
    {{1, 0, 0, M}, "3pσu", "3psu", {3, 1, 0}, 3.0},
    {{0, 1, 0, P}, "3dσg", "3dsg", {3, 2, 0}, 1.0 / 3.0},
    {{0, 1, 0, M}, "4fσu", "4fsu", {4, 3, 0}, 3.0 / 5.0},
}};

std::optional<StateLabel> parse_tuple(std::string_view s) {
  // "(n,m,L,+)" with optional spaces
  std::string buf(s);
  int n = 0, m = 0, l = 0;
  char sign = 0;
  if (std::sscanf(buf.c_str(), " ( %d , %d , %d , %c )", &n, &m, &l, &sign) != 4)
    return std::nullopt;
  if (n < 0 || m < 0 || l < 0) return std::nullopt;
  if (sign != '+' && sign != '-') return std::nullopt;
  return StateLabel{n, m, l, sign == '+' ? P : M};
}

}  // namespace

std::optional<Designation> united_atom_designation(const StateLabel& label) {
  for (const auto& d : kDesignations)
    if (d.label == label) return d;
  return std::nullopt;
}

std::optional<StateLabel> label_from_name(std::string_view name) {
  for (const auto& d : kDesignations)
    if (d.name == name || d.ascii_name == name) return d.label;
  return parse_tuple(name);
}

bool has_variational_preset(const StateLabel& label) {
  if (label.m != 0) return false;
  if (label.n == 0) return label.lambda <= 2;
  return label.n == 1 && label.lambda == 0;
}

std::string to_string(const StateLabel& label) {
  std::string s = "(" + std::to_string(label.n) + "," + std::to_string(label.m) +
                  "," + std::to_string(label.lambda) + "," +
                  (label.parity == P ? "+" : "-") + ")";
  return s;
}

void validate_molecular(const PhysicalSetup& setup) {
  if (!(setup.R > 0.0) || !std::isfinite(setup.R))
    throw DomainError("internuclear distance must be positive, got R=" +
                      std::to_string(setup.R));
  if (!(setup.Z1 > 0.0) || !(setup.Z2 > 0.0))
    throw DomainError("nuclear charges must be positive");
}

double p_from_energy(double E_total, const PhysicalSetup& setup) {
  validate_molecular(setup);
  const double e_prime = E_total - setup.nuclear_repulsion();
  if (!(e_prime < 0.0)) throw DomainError("unbound channel: E' >= 0");
  return std::sqrt(-e_prime) * setup.R / 2.0;
}

double energy_from_p(double p, const PhysicalSetup& setup) {
  validate_molecular(setup);
  const double e_prime = -4.0 * p * p / (setup.R * setup.R);
  return e_prime + setup.nuclear_repulsion();
}

EnergyPair make_energy_pair(double E_total, const PhysicalSetup& setup) {
  EnergyPair e;
  e.E_total = E_total;
  e.E_prime = E_total - setup.nuclear_repulsion();
  e.p = p_from_energy(E_total, setup);
  return e;
}

}  // namespace twocenter

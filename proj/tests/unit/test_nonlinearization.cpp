#include <doctest.h>

#include <sstream>

#include "support.hpp"

using namespace twocenter;
using namespace twocenter::test;

namespace {

// X = exp(-p (xi - 1)) solves the xi equation exactly for p = R, A = R^2:
// the (gamma + xi) power vanishes and alpha = p gamma kills the rational term.
TrialParamsd hydrogenic_fixture(double R) {
  TrialParamsd t;
  t.p = R;
  t.gamma = 0.7;
  t.alpha = t.p * t.gamma;
  t.a1 = 0.8;
  t.a2 = t.b2 = t.b3 = 0;
  return t;
}

PTOptions at_p(double p) {
  PTOptions o;
  o.p = p;
  return o;
}

}  // namespace

TEST_SUITE("nonlinearization") {

TEST_CASE("Riccati residual vanishes on the hydrogenic fixture") {
  for (double R : {0.5, 2.0, 5.0}) {
    const auto t = hydrogenic_fixture(R);
    for (double xi = 1.001; xi < 20; xi *= 1.3)
      CHECK(std::abs(riccati_residual_xi(t, label("1ssg"), at(R), R * R, xi)) <= 1e-10);
  }
}

TEST_CASE("Riccati residual of the optimized ground state is small") {
  const auto& r = optimized("1ssg", 2.0);
  const auto pt = first_correction_xi(r.params, label("1ssg"), at(2.0));
  const double p2 = r.params.p * r.params.p;
  double sup = 0;
  for (double xi = 1.0 + 1e-6; xi <= 10; xi += 0.01)
    sup = std::max(sup, std::abs(riccati_residual_xi(r.params, label("1ssg"), at(2.0), pt.A1, xi)));
  CHECK(sup > 0);
  CHECK(sup < 1e-3 * p2);
}

TEST_CASE("hydrogenic fixture: constant perturbation and no phase correction") {
  // with A0 = 0 the whole separation constant sits in V1 = p^2
  const double R = 2.0;
  const auto t = hydrogenic_fixture(R);
  const auto V = build_V1_xi(t, label("1ssg"), at(R), at_p(R));
  for (double xi : {1.0, 1.5, 4.0, 30.0}) CHECK(V.V1(xi) == doctest::Approx(R * R).epsilon(1e-12));
  const auto pt = first_correction_xi(t, label("1ssg"), at(R), at_p(R));
  CHECK(pt.A1 == doctest::Approx(R * R).epsilon(1e-12));
  for (double xi : {1.0, 1.2, 3.0, 9.0}) {
    CHECK(std::abs(pt.phase(xi)) <= 1e-10);
    CHECK(std::abs(pt.slope(xi)) <= 1e-10);
  }
}

TEST_CASE("V1 of the ground state is bounded and levels off") {
  const auto& r = optimized("1ssg", 2.0);
  // at the trial's own p; the spectral p differs by ~1e-6 relative, which
  // leaves a 2 p dp xi^2 term in the tail
  const auto V = build_V1_xi(r.params, label("1ssg"), at(2.0), at_p(r.params.p));
  CHECK_FALSE(V.singular_at);
  CHECK(std::isfinite(V.bound_C));
  double sup = 0;
  for (double xi = 1.0; xi <= 50; xi += 0.005) {
    const double v = V.V1(xi);
    REQUIRE(std::isfinite(v));
    sup = std::max(sup, std::abs(v));
  }
  CHECK(sup <= 1.01 * V.bound_C + 1e-12);
  // tail: successive differences shrink like 1/xi^2
  const double d1 = V.V1(25) - V.V1(20), d2 = V.V1(50) - V.V1(40);
  CHECK(std::abs(d2) < std::abs(d1));
  CHECK(std::abs(V.V1(50) - V.V1(40)) < 1e-3 * std::abs(V.V1(50)));
}

TEST_CASE("first-order separation constants at R = 2") {
  const auto& r = optimized("1ssg", 2.0);
  const auto x = first_correction_xi(r.params, label("1ssg"), at(2.0));
  const auto y = first_correction_eta(r.params, label("1ssg"), at(2.0));
  CHECK(std::abs(x.A1 - 0.8117295877) <= 1e-7);
  CHECK(std::abs(y.A1 - 0.8117295852) <= 1e-7);
  const auto c = consistency_residual(x.A1, y.A1);
  CHECK(c.absolute == doctest::Approx(std::abs(x.A1 - y.A1)));
  CHECK(c.relative <= 1e-7);
  CHECK(x.p == doctest::Approx(spectral_p(r.params, label("1ssg"), at(2.0))));
}

TEST_CASE("3dpg at R = 10 channel agreement") {
  const auto& r = optimized("3dpg", 10.0);
  const auto x = first_correction_xi(r.params, label("3dpg"), at(10.0));
  const auto y = first_correction_eta(r.params, label("3dpg"), at(10.0));
  CHECK(rel(x.A1, 0.9355443423) <= 1e-7);
  CHECK(rel(y.A1, 0.9355443394) <= 1e-7);
  CHECK(consistency_residual(x.A1, y.A1).relative <= 1e-7);
}

TEST_CASE("first corrections are small and anchored") {
  const auto& r = optimized("1ssg", 2.0);
  const auto x = first_correction_xi(r.params, label("1ssg"), at(2.0));
  const auto y = first_correction_eta(r.params, label("1ssg"), at(2.0));
  REQUIRE(x.has_correction());
  CHECK(x.phase(1.0) == 0.0);
  CHECK(y.phase(0.0) == 0.0);
  double sup = 0;
  for (double xi = 1.0; xi <= 10; xi += 0.01) sup = std::max(sup, std::abs(x.phase(xi)));
  CHECK(sup <= 1e-4);
  for (double eta : {0.1, 0.5, 0.95})
    CHECK(y.phase(-eta) == doctest::Approx(y.phase(eta)).epsilon(1e-10));
}

TEST_CASE("odd eta channel correction is finite through the node") {
  const auto& r = optimized("2psu", 2.0);
  const auto y = first_correction_eta(r.params, label("2psu"), at(2.0));
  const double a = y.slope(1e-9), b = y.slope(-1e-9), c = y.slope(0.0);
  CHECK(std::isfinite(c));
  CHECK(a == doctest::Approx(-b).epsilon(1e-4).scale(1e-6));
}

TEST_CASE("A1 is invariant under rescaling the trial") {
  auto t = optimized("1ssg", 2.0).params;
  const auto a = first_correction_xi(t, label("1ssg"), at(2.0), at_p(1.485));
  const auto ay = first_correction_eta(t, label("1ssg"), at(2.0), at_p(1.485));
  t.P_coeffs = {2.0};
  t.Q_coeffs = {3.0};
  const auto b = first_correction_xi(t, label("1ssg"), at(2.0), at_p(1.485));
  const auto by = first_correction_eta(t, label("1ssg"), at(2.0), at_p(1.485));
  CHECK(std::abs(a.A1 - b.A1) <= 1e-14 * std::abs(a.A1));
  CHECK(std::abs(ay.A1 - by.A1) <= 1e-14 * std::abs(ay.A1));
}

TEST_CASE("corrected state barely moves the energy") {
  const auto& r = optimized("1ssg", 2.0);
  const auto cs = corrected_state(r.params, label("1ssg"), at(2.0));
  const double E = corrected_energy(cs).E_total;
  CHECK(std::abs(E - r.energy.E_total) <= 1e-8);
}

TEST_CASE("hydrogenic fixture: correction leaves the energy alone") {
  const auto t = hydrogenic_fixture(2.0);
  const auto cs = corrected_state(t, label("1ssg"), at(2.0), at_p(2.0));
  const double plain = rayleigh_quotient(t, label("1ssg"), at(2.0)).E_total;
  // eta is not exact, so only the xi part is trivially zero
  CHECK(std::abs(cs.xi.phase(3.0)) <= 1e-10);
  CHECK(std::isfinite(corrected_energy(cs).E_total));
  CHECK(plain < 0);
}

TEST_CASE("nodal states get A1 and a node shift but no phase table") {
  const auto& r = optimized("2ssg", 4.0);
  const auto x = first_correction_xi(r.params, label("2ssg"), at(4.0));
  CHECK(std::isfinite(x.A1));
  CHECK(std::isfinite(x.node_shift));
  CHECK(x.table.nodes.empty());
  CHECK_THROWS_AS(corrected_state(r.params, label("2ssg"), at(4.0)), DomainError);
}

TEST_CASE("fewer parameters make a larger perturbation") {
  const auto full = optimized("1ssg", 2.0).params;
  auto reduced = full;
  reduced.a2 = reduced.b2 = 0;
  const auto a = build_W1_eta(full, label("1ssg"), at(2.0), at_p(1.485));
  const auto b = build_W1_eta(reduced, label("1ssg"), at(2.0), at_p(1.485));
  CHECK(b.bound_C > a.bound_C);
}

TEST_CASE("correction table export") {
  const auto& r = optimized("1ssg", 2.0);
  const auto x = first_correction_xi(r.params, label("1ssg"), at(2.0));
  std::ostringstream os;
  write_correction_csv(os, x);
  std::istringstream is(os.str());
  int rows = 0;
  for (std::string line; std::getline(is, line);) {
    if (line.empty() || !std::isdigit(static_cast<unsigned char>(line[0]))) continue;
    CHECK(std::count(line.begin(), line.end(), ',') == 2);
    ++rows;
  }
  CHECK(rows == static_cast<int>(x.table.nodes.size()));
  CHECK(x.table.interpolate(x.table.nodes[3]) == doctest::Approx(x.table.phase[3]));
}

}

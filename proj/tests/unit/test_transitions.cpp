#include <doctest.h>

#include "support.hpp"

using namespace twocenter;
using namespace twocenter::test;

namespace {

double f_of(Multipole k, const TransitionState& i, const TransitionState& f, double R) {
  return compute_transition(k, i, f, at(R)).f;
}

double trial_f(Multipole k, const std::string& fin, double R) {
  return f_of(k, trial_state("1ssg", R), trial_state(fin, R), R);
}

double exact_f(Multipole k, const std::string& fin, double R) {
  QuadratureOptions q;
  q.plateau_tol = 1e-9;  // the dense-output interpolant is smooth only to ~1e-10
  return compute_transition(k, exact_state("1ssg", R).state, exact_state(fin, R).state, at(R), q)
      .f;
}

}  // namespace

TEST_SUITE("transitions") {

TEST_CASE("selection rules") {
  CHECK_FALSE(allowed(Multipole::E1, label("1ssg"), label("3ddg")));
  CHECK_FALSE(allowed(Multipole::E1, label("1ssg"), label("2ssg")));
  CHECK(allowed(Multipole::E1, label("1ssg"), label("2ppu")));
  CHECK(allowed(Multipole::E1, label("1ssg"), label("3psu")));
  CHECK_FALSE(allowed(Multipole::B1, label("1ssg"), label("2ppu")));
  CHECK_FALSE(allowed(Multipole::B1, label("1ssg"), label("2ssg")));
  CHECK(allowed(Multipole::B1, label("1ssg"), label("3dpg")));
  CHECK(allowed(Multipole::E2, label("1ssg"), label("3ddg")));
  CHECK_FALSE(allowed(Multipole::E2, label("1ssg"), label("4fdu")));
  CHECK(is_gerade(label("3dpg")));
  CHECK_FALSE(is_gerade(label("2ppu")));
  CHECK(degeneracy_factor(label("2ppu")) == 2);
  CHECK(degeneracy_factor(label("3psu")) == 1);
}

TEST_CASE("forbidden pairs give exact zeros") {
  const auto r = compute_transition(Multipole::E1, trial_state("1ssg", 2.0),
                                    trial_state("3ddg", 2.0), at(2.0));
  CHECK(r.forbidden);
  CHECK(r.S == 0.0);
  CHECK(r.f == 0.0);
  // the integrals vanish on their own, not only by the rule table
  CHECK(dipole_matrix_element(trial_state("1ssg", 2.0), trial_state("3ddg", 2.0), at(2.0)) == 0.0);
  CHECK(dipole_matrix_element(trial_state("1ssg", 2.0), trial_state("2psu", 2.0), at(2.0)) != 0.0);
}

TEST_CASE("hydrogenic oscillator strength convention") {
  // He+ 1s -> 2p: dE = 3 Ry, |<1s|z|2p0>|^2 = 2^15 / 3^10 / Z^2
  const double S = std::pow(2.0, 15) / std::pow(3.0, 10) / 4;
  CHECK(oscillator_strength_E1(3.0, S, 1) == doctest::Approx(0.41620 / 3).epsilon(1e-4));
  CHECK(oscillator_strength_E1(3.0, S, 2) == doctest::Approx(2 * 0.41620 / 3).epsilon(1e-4));
}

TEST_CASE("zero strength and bad energy ordering") {
  CHECK(oscillator_strength_E1(0.5, 0.0, 2) == 0.0);
  CHECK(oscillator_strength_B1(0.5, 0.0) == 0.0);
  CHECK(oscillator_strength_E2(0.5, 0.0, 1) == 0.0);
  CHECK_THROWS_AS(oscillator_strength_E1(-0.5, 1.0, 1), DomainError);
  CHECK_THROWS_AS(oscillator_strength_E2(0.0, 1.0, 1), DomainError);
}

TEST_CASE("E1 to 2ppu at R = 2") {
  CHECK(rel(trial_f(Multipole::E1, "2ppu", 2.0), 0.460187135) <= 2e-6);
}

TEST_CASE("E1 to 2ppu: trial states against exact eigenfunctions") {
  CHECK(rel(trial_f(Multipole::E1, "2ppu", 2.0), exact_f(Multipole::E1, "2ppu", 2.0)) <= 2e-6);
}

TEST_CASE("E1 to 2ppu: exact eigenfunctions against the independent accurate column") {
  for (const char* R : {"1", "2", "6", "20"}) {
    const auto g = golden("e1", "2ppu", R, "f", "independent-accurate");
    REQUIRE(g);
    CHECK(rel(exact_f(Multipole::E1, "2ppu", std::stod(R)), g->value) <= 1e-8);
  }
}

TEST_CASE("E1 to 2ppu at R = 1 against exact eigenfunctions") {
  CHECK(rel(trial_f(Multipole::E1, "2ppu", 1.0), exact_f(Multipole::E1, "2ppu", 1.0)) <= 1e-7);
}

// the printed ansatz value is 2.8e-6 away from the exact strength
TEST_CASE("E1 to 2ppu at R = 1 against the printed value" * doctest::may_fail()) {
  CHECK(rel(trial_f(Multipole::E1, "2ppu", 1.0), golden("e1", "2ppu", "1", "f")->value) <= 2e-6);
}

TEST_CASE("E1 to 3psu at R = 4 against exact eigenfunctions") {
  // nodal trial states are not phase-corrected; their E1 strengths carry
  // a few 1e-5 of wavefunction error
  CHECK(rel(trial_f(Multipole::E1, "3psu", 4.0), exact_f(Multipole::E1, "3psu", 4.0)) <= 1e-4);
}

TEST_CASE("E1 to 3psu at R = 4 against the printed value" * doctest::may_fail()) {
  CHECK(rel(trial_f(Multipole::E1, "3psu", 4.0), 1.61437952e-2) <= 2e-6);
}

TEST_CASE("E1 to 3psu grows about twenty-fold from R = 2 to 4") {
  const double ratio = trial_f(Multipole::E1, "3psu", 4.0) / trial_f(Multipole::E1, "3psu", 2.0);
  CHECK(std::abs(ratio - 19.57) <= 0.1);
}

TEST_CASE("B1 to 3dpg") {
  const double f2 = trial_f(Multipole::B1, "3dpg", 2.0);
  CHECK(rel(f2, 1.6661760e-7) <= 5e-6);
  CHECK(rel(f2, 1.67e-7) <= 5e-3);
  const double ratio = trial_f(Multipole::B1, "3dpg", 4.0) / f2;
  CHECK(ratio > 11);
  CHECK(ratio < 13);
}

TEST_CASE("E2 to 3ddg at R = 2") {
  CHECK(rel(trial_f(Multipole::E2, "3ddg", 2.0), 1.5573573e-6) <= 5e-6);
}

TEST_CASE("E2 to 2ssg at R = 1 against exact eigenfunctions") {
  CHECK(rel(trial_f(Multipole::E2, "2ssg", 1.0), exact_f(Multipole::E2, "2ssg", 1.0)) <= 2e-6);
}

TEST_CASE("E2 to 2ssg at R = 1 against the printed value" * doctest::may_fail()) {
  CHECK(rel(trial_f(Multipole::E2, "2ssg", 1.0), 1.3865140e-9) <= 5e-6);
}

TEST_CASE("E1, E2 and B1 strengths are orders of magnitude apart") {
  const double e1 = trial_f(Multipole::E1, "2ppu", 2.0);
  const double e2 = trial_f(Multipole::E2, "3dpg", 2.0);
  const double b1 = trial_f(Multipole::B1, "3dpg", 2.0);
  CHECK(e1 / e2 == doctest::Approx(1.8e5).epsilon(0.05));
  CHECK(e1 / b1 == doctest::Approx(2.8e6).epsilon(0.05));
}

TEST_CASE("matrix elements are symmetric and scale free") {
  const auto& g = trial_state("1ssg", 2.0);
  const auto& p = trial_state("2ppu", 2.0);
  const auto& d = trial_state("3ddg", 2.0);
  const auto& q = trial_state("3dpg", 2.0);
  CHECK(dipole_matrix_element(g, p, at(2.0)) ==
        doctest::Approx(dipole_matrix_element(p, g, at(2.0))).epsilon(1e-13));
  CHECK(quadrupole_matrix_element(g, d, at(2.0)) ==
        doctest::Approx(quadrupole_matrix_element(d, g, at(2.0))).epsilon(1e-13));
  CHECK(magnetic_matrix_element(g, q, at(2.0)) ==
        doctest::Approx(magnetic_matrix_element(q, g, at(2.0))).epsilon(1e-13));
  TransitionState scaled = p;
  scaled.xi = [f = p.xi](double c) {
    auto s = f(c);
    s.log_scale += std::log(7.0);
    return s;
  };
  CHECK(dipole_matrix_element(g, scaled, at(2.0)) ==
        doctest::Approx(dipole_matrix_element(g, p, at(2.0))).epsilon(1e-13));
}

TEST_CASE("record fields") {
  const auto r = compute_transition(Multipole::E2, trial_state("1ssg", 2.0),
                                    trial_state("3ddg", 2.0), at(2.0));
  CHECK_FALSE(r.forbidden);
  CHECK(r.G == 2);
  CHECK(r.deltaE == doctest::Approx(trial_state("3ddg", 2.0).E_total -
                                    trial_state("1ssg", 2.0).E_total));
  CHECK(r.f == doctest::Approx(oscillator_strength_E2(r.deltaE, r.S, 2)));
  CHECK(to_string(Multipole::B1) == "B1");
}

}

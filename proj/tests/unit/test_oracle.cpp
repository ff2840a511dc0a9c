#include <doctest.h>

#include "support.hpp"

using namespace twocenter;
using namespace twocenter::test;

TEST_SUITE("oracle") {

TEST_CASE("angular constants at p = 0 follow the Legendre values") {
  CHECK(angular_eigenvalue<double>(0.0, 0, 0, Parity::Plus).A == doctest::Approx(0.0).scale(1));
  CHECK(angular_eigenvalue<double>(0.0, 0, 0, Parity::Minus).A == doctest::Approx(-2.0));
  CHECK(angular_eigenvalue<double>(0.0, 2, 0, Parity::Minus).A == doctest::Approx(-6.0));
  CHECK(angular_eigenvalue<double>(0.0, 1, 0, Parity::Minus).A == doctest::Approx(-4.0));
  // second root in the even class: l = 2
  CHECK(angular_eigenvalue<double>(0.0, 0, 1, Parity::Plus).A == doctest::Approx(-6.0));
}

TEST_CASE("angular constant is even in p") {
  for (double p : {0.3, 1.7, 6.0}) {
    const double a = angular_eigenvalue<double>(p, 1, 0, Parity::Minus).A;
    const double b = angular_eigenvalue<double>(-p, 1, 0, Parity::Minus).A;
    CHECK(a == doctest::Approx(b).epsilon(1e-14));
  }
}

TEST_CASE("2psu separation constant at R = 1") {
  const auto o = solve_bispectral(label("2psu"), at(1.0));
  CHECK(std::abs(o.A - -1.8300104198) <= 1e-9);
  const auto small = solve_bispectral(label("2psu"), at(0.05));
  CHECK(std::abs(small.A + 2) < std::abs(o.A + 2));
}

TEST_CASE("ground state root at R = 2") {
  const auto o = solve_bispectral(label("1ssg"), at(2.0));
  CHECK(std::abs(o.E_total - -1.20526842899) <= 5e-11);
  CHECK(o.radial_nodes == 0);
  // the mismatch changes sign across the root at fixed A
  const double lo = radial_mismatch(o.E_total - 1e-4, o.A, at(2.0), 0).mismatch;
  const double hi = radial_mismatch(o.E_total + 1e-4, o.A, at(2.0), 0).mismatch;
  CHECK(lo * hi < 0);
}

TEST_CASE("p bookkeeping of the oracle result") {
  const auto o = solve_bispectral(label("3dpg"), at(4.0));
  CHECK(o.p * o.p == doctest::Approx(-o.E_prime * 4.0 * 4.0 / 4).epsilon(1e-14));
  CHECK(o.E_prime == doctest::Approx(o.E_total - 0.5).epsilon(1e-15));
}

TEST_CASE("2ssg root has one radial node") {
  const auto o = solve_bispectral(label("2ssg"), at(4.0));
  CHECK(o.radial_nodes == 1);
  CHECK(std::abs(o.E_total - -0.0770297349) <= 1e-9);
}

TEST_CASE("a wrong separation constant has no nearby root") {
  const auto o = solve_bispectral(label("1ssg"), at(2.0));
  const double s0 = radial_mismatch(o.E_total - 0.01, o.A + 0.1, at(2.0), 0).mismatch;
  for (double dE = -0.01; dE <= 0.01; dE += 5e-4) {
    const double s = radial_mismatch(o.E_total + dE, o.A + 0.1, at(2.0), 0).mismatch;
    CHECK(s * s0 > 0);
  }
}

TEST_CASE("intermediate-distance reference energies") {
  CHECK(std::abs(solve_bispectral(label("1ssg"), at(12.5)).E_total - -1.0002611116) <= 1e-10);
  CHECK(std::abs(solve_bispectral(label("2psu"), at(12.54525)).E_total - -1.0001215811) <= 1e-10);
}

TEST_CASE("ground separation constant at R = 6") {
  CHECK(std::abs(solve_bispectral(label("1ssg"), at(6.0)).A - 6.4536037429) <= 1e-8);
}

TEST_CASE("gerade below ungerade, both tending to the hydrogen level") {
  const auto g = solve_bispectral(label("1ssg"), at(20.0));
  const auto u = solve_bispectral(label("2psu"), at(20.0));
  CHECK(g.E_total < u.E_total);
  CHECK(u.E_total - g.E_total < 1e-4);
  CHECK(std::abs(g.E_total + 1) < 1e-3);
}

TEST_CASE("extended precision agrees with standard") {
  for (const char* n : {"1ssg", "3ddg", "3psu"}) {
    const auto a = solve_bispectral(label(n), at(3.0));
    const auto b = solve_bispectral(label(n), at(3.0), {Precision::Extended, {}});
    CHECK(std::abs(a.E_total - b.E_total) <= 1e-11);
  }
}

TEST_CASE("unbound energy is rejected") {
  CHECK_THROWS_AS(radial_mismatch(5.0, 0.0, at(2.0), 0), DomainError);
}

}

#include <doctest.h>

#include "support.hpp"
#include "twocenter/united_atom.hpp"

using namespace twocenter;
using namespace twocenter::test;

namespace {

const char* kNames[] = {"1ssg", "2psu", "2ppu", "3dpg", "3ddg",
                        "4fdu", "2ssg", "3psu", "3dsg", "4fsu"};

}  // namespace

TEST_SUITE("united_atom") {

TEST_CASE("He+ energies") {
  CHECK(hydrogenic_reference(1, 0, 0).energy() == -4.0);
  CHECK(hydrogenic_reference(3, 2, 1).energy() == doctest::Approx(-4.0 / 9));
  CHECK(hydrogenic_reference(2, 1, 0, 1.0).energy() == doctest::Approx(-0.25));
}

TEST_CASE("reference orbitals are normalized") {
  for (auto [n, l, m] : {std::tuple{1, 0, 0}, {2, 1, 0}, {3, 2, 1}, {4, 3, 2}, {3, 0, 0}}) {
    const auto h = hydrogenic_reference(n, l, m);
    const auto r = build_rules<double>(1.0, 128);
    // radial: map xi in [1, inf) to r = xi - 1
    const double rad = integrate(r.xi, [&](double x) {
      const double rr = x - 1, v = h.radial(rr);
      return v * v * rr * rr;
    });
    CHECK(rad == doctest::Approx(1.0).epsilon(1e-12));
    const double ang = 2 * kPi * integrate(r.eta, [&](double c) {
      const double v = h.angular(c);
      return v * v;
    });
    CHECK(ang == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("2p0 angular factor is proportional to cos theta") {
  const auto h = hydrogenic_reference(2, 1, 0);
  const double k = h.angular(1.0);
  for (double c : {-0.7, -0.1, 0.3, 0.9}) CHECK(h.angular(c) == doctest::Approx(k * c));
}

TEST_CASE("reference orbital domain") {
  CHECK_THROWS_AS(hydrogenic_reference(1, 1, 0), DomainError);
  CHECK_THROWS_AS(hydrogenic_reference(2, 1, 2), DomainError);
  CHECK_THROWS_AS(hydrogenic_reference(2, 1, 0, -2.0), DomainError);
}

TEST_CASE("limit forms") {
  const auto a = limit_form(label("2ssg"));
  CHECK(a.orbital == AtomicOrbital{2, 0, 0});
  REQUIRE(a.node_constant);
  CHECK(*a.node_constant == 2.0);
  CHECK(limit_form(label("4fdu")).orbital == AtomicOrbital{4, 3, 2});
  const auto b = limit_form(label("4fsu"));
  CHECK(b.orbital == AtomicOrbital{4, 3, 0});
  CHECK(*b.node_constant == doctest::Approx(0.6));
  CHECK(*limit_form(label("3psu")).node_constant == 3.0);
  CHECK(*limit_form(label("3dsg")).node_constant == doctest::Approx(1.0 / 3));
  CHECK_FALSE(limit_form(label("1ssg")).node_constant);
  CHECK_THROWS_AS(limit_form(StateLabel{2, 1, 1, Parity::Plus}), DomainError);
}

TEST_CASE("node counts carry over to the atomic orbital") {
  for (const char* n : kNames) {
    const auto l = label(n);
    const auto h = hydrogenic_reference(limit_form(l).orbital.n, limit_form(l).orbital.l,
                                        limit_form(l).orbital.m);
    CHECK(h.radial_nodes() == l.n);
    CHECK(h.angular_nodes() == 2 * l.m + (l.parity == Parity::Minus ? 1 : 0));
    CHECK(h.orbital.m == l.lambda);
  }
}

TEST_CASE("A at p = 0 from the Legendre equation") {
  CHECK(united_atom_A(label("2psu")) == -2.0);
  CHECK(united_atom_A(label("4fdu")) == -6.0);
  CHECK(united_atom_A(label("1ssg")) == 0.0);
  for (const char* n : kNames) {
    const auto l = label(n);
    const double a = angular_eigenvalue<double>(0.0, l.lambda, l.m, l.parity).A;
    CHECK(std::abs(a - united_atom_A(l)) <= 1e-12);
  }
}

TEST_CASE("limit sequence") {
  const auto s = limit_sequence(4);
  REQUIRE(s.size() == 4);
  CHECK(s[0] == 0.5);
  CHECK(s[3] == 0.0625);
}

TEST_CASE("ground state: R/p tends to 1") {
  const auto rep = limit_convergence_probe(label("1ssg"));
  REQUIRE(rep.points.size() == 5);
  for (std::size_t i = 1; i < rep.points.size(); ++i)
    CHECK(std::abs(rep.points[i].dev_R_over_p) < std::abs(rep.points[i - 1].dev_R_over_p));
  CHECK(std::abs(rep.points.back().dev_R_over_p) < 0.02);
  CHECK(rep.order_R_over_p.size() == 4);
}

TEST_CASE("2psu: A tends to -2") {
  const auto rep = limit_convergence_probe(label("2psu"));
  CHECK(std::abs(rep.points.back().A + 2) < std::abs(rep.points.front().A + 2));
  CHECK(std::abs(rep.points.back().dev_A) < 1e-3);
}

TEST_CASE("3ddg: E' tends to -4/9") {
  const auto rep = limit_convergence_probe(label("3ddg"), {0.5, 0.2, 0.1});
  CHECK(std::abs(rep.points.back().E_prime + 4.0 / 9) < std::abs(rep.points.front().E_prime + 4.0 / 9));
  CHECK(std::abs(rep.points.back().dev_E_prime) < 1e-3);
}

}

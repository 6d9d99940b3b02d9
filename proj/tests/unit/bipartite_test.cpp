#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "generators.hpp"
#include "varq/bipartite.hpp"

using namespace varq;

namespace {

GridSpec torus(std::size_t n, double len) {
  const Axis ax{n, -len / 2.0, len / 2.0, Boundary::periodic};
  return GridSpec::plane(ax, ax);
}

}  // namespace

TEST_SUITE("bipartite") {
  TEST_CASE("reduced and total masses") {
    BipartiteParams p;
    p.mass_a = 1.0;
    p.mass_b = 3.0;
    CHECK(p.total_mass() == 4.0);
    CHECK(p.reduced_mass() == doctest::Approx(0.75));
    CHECK(p.reduced().mass(0) == doctest::Approx(0.75));
    CHECK(p.physical().mass(1) == 3.0);
    p.mass_b = -1.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
  }

  TEST_CASE("relative grid shares the plane spacing") {
    const GridSpec plane = torus(64, 16.0);
    const GridSpec line = relative_grid_for(plane);
    CHECK(line.axis(0).n_points == 65);
    CHECK(line.axis(0).boundary == Boundary::dirichlet);
    CHECK(line.axis(0).spacing() == doctest::Approx(plane.axis(0).spacing()));
    CHECK(line.axis(0).x_min == doctest::Approx(-8.0));
    CHECK_THROWS_AS(relative_grid_for(GridSpec::plane({64, -8.0, 8.0, Boundary::periodic}, {32, -8.0, 8.0, Boundary::periodic})),
                    InvalidArgument);
  }

  TEST_CASE("lifted relative states satisfy the total-momentum constraint") {
    // Property over random smooth relative profiles.
    std::mt19937_64 rng(50);
    const GridSpec plane = torus(64, 16.0);
    const GridSpec line = relative_grid_for(plane);
    BipartiteParams p;
    for (int trial = 0; trial < 10; ++trial) {
      const testing::SmoothPeriodic shape(rng, 3, 1.0, -8.0, 16.0);
      const RealField f = RealField::sample(line, [&](double x) { return std::exp(-x * x / 2.0 + shape(x)); });
      const ComplexField psi = lift_relative_state(f, plane);
      CHECK(norm(psi) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(constraint_residual(psi, p) <= 1e-6);
      // Flat along the center-of-mass diagonal.
      CHECK(std::abs(psi[plane.flat(3, 7)] - psi[plane.flat(10, 14)]) < 1e-14);
    }
  }

  TEST_CASE("a center-of-mass perturbation breaks the constraint") {
    const GridSpec plane = torus(64, 16.0);
    BipartiteParams p;
    const SpectrumResult s = reduced_eigensolve(p, relative_grid_for(plane), 1);
    const ComplexField psi = lift_relative_state(s.states[0], plane, {0.1});
    CHECK(constraint_residual(psi, p) > 1e-3);
    CHECK_THROWS_AS(constrained_2d_eigensolve(p, plane, 1, {0.1}), VerificationFailure);
  }

  TEST_CASE("lifted eigenstates are plane eigenstates") {
    const GridSpec plane = torus(128, 16.0);
    BipartiteParams p;
    p.mass_b = 2.0;
    const ConstrainedSpectrum c = constrained_2d_eigensolve(p, plane, 2);
    REQUIRE(c.lifted.size() == 2);
    for (std::size_t n = 0; n < 2; ++n) {
      CHECK(c.lifted[n].passed);
      CHECK(c.lifted[n].energy == doctest::Approx(c.reduced.energies[n]).epsilon(1e-6));
      const double omega = std::sqrt(1.0 / p.reduced_mass());
      CHECK(c.reduced.energies[n] == doctest::Approx(omega * (n + 0.5)).epsilon(5e-3));
    }
  }

  TEST_CASE("swapping the masses leaves the spectrum unchanged") {
    const GridSpec plane = torus(64, 16.0);
    BipartiteParams ab, ba;
    ab.mass_a = ba.mass_b = 1.0;
    ab.mass_b = ba.mass_a = 3.0;
    const RouteComparison x = three_route_comparison(ab, plane, 2);
    const RouteComparison y = three_route_comparison(ba, plane, 2);
    for (std::size_t n = 0; n < 2; ++n) {
      CHECK(x.rows[n].reduced == doctest::Approx(y.rows[n].reduced).epsilon(1e-12));
      CHECK(x.rows[n].dirac == doctest::Approx(y.rows[n].dirac).epsilon(1e-9));
      CHECK(x.rows[n].simultaneous == doctest::Approx(y.rows[n].simultaneous).epsilon(1e-9));
    }
  }

  TEST_CASE("three routes agree on the oscillator spectrum") {
    const GridSpec plane = torus(128, 16.0);
    BipartiteParams p;
    const RouteComparison r = three_route_comparison(p, plane, 2);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.max_deviation < 2e-3);
    CHECK(r.max_constraint_residual < 1e-6);
    for (const RouteRow& row : r.rows) {
      CHECK(row.detail.multipliers[0] == 0.0);
      CHECK(row.detail.active[0] == 0);
    }
    CHECK(r.rows[0].reduced == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(2e-3));
  }

  TEST_CASE("information metric of a Gaussian product") {
    // Each axis contributes hbar / (4 m sigma^2); sigma^2 = 1/2 on both.
    const GridSpec plane = torus(128, 16.0);
    BipartiteParams p;
    p.mass_b = 2.0;
    const RealField rho = RealField::sample(plane, [](double a, double b) {
      return std::exp(-a * a - b * b) / std::numbers::pi;
    });
    CHECK(bipartite_information_metric(rho, p) == doctest::Approx(0.5 + 0.25).epsilon(1e-6));
  }
}

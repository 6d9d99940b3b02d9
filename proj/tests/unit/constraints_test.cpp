#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "generators.hpp"
#include "varq/solvers.hpp"

using namespace varq;

namespace {

constexpr double ring = 2.0 * std::numbers::pi;

MadelungState random_ring_state(std::mt19937_64& rng, const GridSpec& g) {
  const testing::SmoothPeriodic lr(rng, 3, 0.5, 0.0, ring), s(rng, 3, 1.0, 0.0, ring);
  return normalize(MadelungState(RealField::sample(g, [&](double x) { return std::exp(lr(x)); }),
                                 RealField::sample(g, s)));
}

MadelungState random_torus_state(std::mt19937_64& rng, const GridSpec& g) {
  const testing::SmoothPeriodic la(rng, 2, 0.4, 0.0, ring), lb(rng, 2, 0.4, 0.0, ring);
  const testing::SmoothPeriodic sa(rng, 2, 0.8, 0.0, ring), sb(rng, 2, 0.8, 0.0, ring);
  return normalize(MadelungState(RealField::sample(g, [&](double a, double b) { return std::exp(la(a) + lb(b)); }),
                                 RealField::sample(g, [&](double a, double b) { return sa(a) + sb(b); })));
}

MadelungState oscillator_ground(const GridSpec& g) {
  PhysicalParams p;
  p.potential = PotentialSpec::harmonic(1.0);
  const SpectrumResult s = eigensolve_1d(p, g, 1);
  RealField rho(g);
  for (std::size_t k = 0; k < g.size(); ++k) rho[k] = s.states[0][k] * s.states[0][k];
  return MadelungState(rho, RealField(g, 0.0));
}

}  // namespace

TEST_SUITE("constraints") {
  TEST_CASE("local momentum on a uniform density with a periodic phase") {
    // The mean of dS/dx over a full period is zero, leaving -p_c.
    const auto g = GridSpec::line({128, 0.0, ring, Boundary::periodic});
    const MadelungState q(RealField(g, 1.0 / ring), RealField::sample(g, [](double x) { return std::sin(x); }));
    CHECK(std::abs(evaluate_constraint(ConstraintFunctional::local_momentum(0.0), q)) < 1e-12);
    CHECK(evaluate_constraint(ConstraintFunctional::local_momentum(0.7), q) == doctest::Approx(-0.7).epsilon(1e-12));
    CHECK_THROWS_AS(evaluate_constraint(ConstraintFunctional::density_stationarity(), q), InvalidArgument);
    const RealField rate(g, 0.0);
    CHECK(evaluate_constraint(ConstraintFunctional::density_stationarity(), q, &rate) == 0.0);
  }

  TEST_CASE("two-particle constraints vanish on relative-coordinate states") {
    const Axis ax{64, 0.0, ring, Boundary::periodic};
    const auto g = GridSpec::plane(ax, ax);
    const MadelungState s(RealField::sample(g, [](double a, double b) { return 1.0 + 0.5 * std::cos(a - b); }),
                          RealField::sample(g, [](double a, double b) { return std::sin(2.0 * (a - b)); }));
    CHECK(std::abs(evaluate_constraint(ConstraintFunctional::total_momentum(), s)) < 1e-12);
    CHECK(std::abs(evaluate_constraint(ConstraintFunctional::relative_density(), s)) < 1e-12);
    CHECK_THROWS_AS(evaluate_constraint(ConstraintFunctional::local_momentum(), s), InvalidArgument);
  }

  TEST_CASE("analytic and numeric functional derivatives agree") {
    // Dual-route property over random smooth states for every functional.
    // The analytic density derivative of the Fisher term is the continuum
    // one, so the grids are fine enough for the stencil error to sit well
    // below the tolerance.
    std::mt19937_64 rng(30);
    const auto line = GridSpec::line({256, 0.0, ring, Boundary::periodic});
    PhysicalParams p;
    p.potential = PotentialSpec::harmonic(0.5, 3.0);
    for (int trial = 0; trial < 3; ++trial) {
      const MadelungState s = random_ring_state(rng, line);
      const RealField aux = RealField::sample(line, [](double x) { return 0.1 * std::cos(2.0 * x); });
      const std::vector<Functional> fs{ConstraintFunctional::local_momentum(0.3),
                                       ConstraintFunctional::density_stationarity(), EnsembleHamiltonian{}};
      for (const auto& f : fs) {
        for (Component c : {Component::density, Component::phase}) {
          const RealField a = functional_derivative(f, s, p, c, &aux);
          const RealField n = functional_derivative(f, s, p, c, &aux, {GradientBackend::numeric, 1e-6});
          double scale = 1e-12, diff = 0.0;
          for (std::size_t k = 0; k < line.size(); ++k) {
            scale = std::max(scale, std::abs(a[k]));
            diff = std::max(diff, std::abs(a[k] - n[k]));
          }
          CHECK_MESSAGE(diff / scale < 1e-5, functional_name(f));
        }
      }
    }
    const Axis ax{96, 0.0, ring, Boundary::periodic};
    const auto plane = GridSpec::plane(ax, ax);
    PhysicalParams p2;
    p2.masses = {1.0, 2.0};
    p2.potential = PotentialSpec::pairwise(PotentialSpec::harmonic(0.5));
    const MadelungState s2 = random_torus_state(rng, plane);
    for (const Functional& f : {Functional{ConstraintFunctional::total_momentum()}, Functional{EnsembleHamiltonian{}}}) {
      for (Component c : {Component::density, Component::phase}) {
        const RealField a = functional_derivative(f, s2, p2, c);
        const RealField n = functional_derivative(f, s2, p2, c, nullptr, {GradientBackend::numeric, 1e-6});
        double scale = 1e-12, diff = 0.0;
        for (std::size_t k = 0; k < plane.size(); ++k) {
          scale = std::max(scale, std::abs(a[k]));
          diff = std::max(diff, std::abs(a[k] - n[k]));
        }
        CHECK_MESSAGE(diff / scale < 1e-5, functional_name(f));
      }
    }
  }

  TEST_CASE("Poisson bracket is antisymmetric on random functional pairs") {
    std::mt19937_64 rng(31);
    const auto g = GridSpec::line({128, 0.0, ring, Boundary::periodic});
    PhysicalParams p;
    p.potential = PotentialSpec::harmonic(0.5, 3.0);
    const RealField aux = RealField::sample(g, [](double x) { return 0.2 * std::sin(x); });
    const std::vector<Functional> fs{ConstraintFunctional::local_momentum(0.1), ConstraintFunctional::local_momentum(-0.4),
                                     ConstraintFunctional::density_stationarity(), EnsembleHamiltonian{}};
    for (int trial = 0; trial < 4; ++trial) {
      const MadelungState s = random_ring_state(rng, g);
      for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t j = 0; j < fs.size(); ++j) {
          const BracketReport fg = poisson_bracket(fs[i], fs[j], s, p, &aux, &aux);
          const BracketReport gf = poisson_bracket(fs[j], fs[i], s, p, &aux, &aux);
          CHECK(std::abs(fg.value + gf.value) <= 1e-13 * std::max(1.0, fg.scale * fg.scale));
          if (i == j) CHECK(std::abs(fg.value) <= 1e-13 * std::max(1.0, fg.scale * fg.scale));
        }
      }
    }
  }

  TEST_CASE("brackets with the ensemble Hamiltonian on the constraint surface") {
    const auto g = GridSpec::line({1024, -10.0, 10.0, Boundary::dirichlet});
    PhysicalParams p;
    p.potential = PotentialSpec::harmonic(1.0);
    const MadelungState ground = oscillator_ground(g);
    const RealField zero_rate(g, 0.0);
    const BracketReport phi = poisson_bracket(ConstraintFunctional::local_momentum(0.0), EnsembleHamiltonian{}, ground, p);
    CHECK(std::abs(phi.normalized) <= 1e-4);
    CHECK(phi.consistent);
    const BracketReport theta =
        poisson_bracket(ConstraintFunctional::density_stationarity(), EnsembleHamiltonian{}, ground, p, &zero_rate);
    CHECK(theta.value == 0.0);

    // A displaced packet is off the surface: the bracket is the force.
    RealField rho(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double x = g.coordinate(0, k) - 1.5;
      rho[k] = std::exp(-x * x) / std::sqrt(std::numbers::pi);
    }
    const BracketReport off =
        poisson_bracket(ConstraintFunctional::local_momentum(0.0), EnsembleHamiltonian{}, MadelungState(rho, RealField(g, 0.0)), p);
    CHECK(!off.consistent);
    CHECK(std::abs(off.value) == doctest::Approx(1.5).epsilon(1e-4));
  }

  TEST_CASE("weak equality thresholds") {
    CHECK(weakly_zero(0.9e-6, 0.0));
    CHECK(!weakly_zero(2e-6, 0.0));
    CHECK(weakly_zero(1e-3, 10.0));
    CHECK(!weakly_zero(2e-3, 10.0));
  }

  TEST_CASE("classical consistency yields the force as a secondary constraint") {
    const auto g = GridSpec::line({101, -5.0, 5.0, Boundary::dirichlet});
    const ConsistencyResult h = classical_consistency(PhaseSpaceCase::vanishing_momentum, g, PotentialSpec::harmonic(2.0));
    CHECK(h.secondary);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(h.bracket[k] == doctest::Approx(-2.0 * g.coordinate(0, k)).epsilon(1e-9));
    const ConsistencyResult f = classical_consistency(PhaseSpaceCase::vanishing_momentum, g, PotentialSpec::free());
    CHECK(!f.secondary);
    const Axis ax{32, -4.0, 4.0, Boundary::periodic};
    const ConsistencyResult b = classical_consistency(PhaseSpaceCase::bipartite, GridSpec::plane(ax, ax),
                                                      PotentialSpec::pairwise(PotentialSpec::harmonic(1.0)));
    CHECK(!b.secondary);
    CHECK(b.max_abs < 1e-10);
  }

  TEST_CASE("augmented action adds multiplier-weighted constraint integrals") {
    std::mt19937_64 rng(32);
    const auto g = GridSpec::line({128, 0.0, ring, Boundary::periodic});
    Trajectory t;
    t.dt = 0.05;
    for (int j = 0; j < 4; ++j) t.slices.push_back(random_ring_state(rng, g));
    const std::vector<ConstraintFunctional> cs{ConstraintFunctional::local_momentum(0.2),
                                               ConstraintFunctional::density_stationarity()};
    PhysicalParams p;
    const AugmentedAction a = augmented_total_action(t, p, cs, {0.7, -1.3});
    REQUIRE(a.constraint_integrals.size() == 2);
    CHECK(a.total == doctest::Approx(a.base.total + 0.7 * a.constraint_integrals[0] - 1.3 * a.constraint_integrals[1]));
    CHECK_THROWS_AS(augmented_total_action(t, p, cs, {1.0}), InvalidArgument);
  }

  TEST_CASE("multiplier least squares never increases the residual") {
    std::mt19937_64 rng(33);
    const auto g = GridSpec::line({128, 0.0, ring, Boundary::periodic});
    PhysicalParams p;
    const std::vector<ConstraintFunctional> cs{ConstraintFunctional::local_momentum(0.2),
                                               ConstraintFunctional::density_stationarity()};
    for (int trial = 0; trial < 3; ++trial) {
      Trajectory t;
      t.dt = 0.05;
      for (int j = 0; j < 5; ++j) t.slices.push_back(random_ring_state(rng, g));
      const MultiplierSolution m = solve_multipliers(t, p, cs, {});
      CHECK(m.residual_after <= m.residual_before + 1e-12);
    }
  }
}

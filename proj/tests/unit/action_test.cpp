#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "generators.hpp"
#include "varq/action.hpp"

using namespace varq;

namespace {

double gaussian(double x, double sigma) {
  return std::exp(-x * x / (2.0 * sigma * sigma)) / std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
}

// Harmonic ground state history with S = -E t, oscillator frequency 1.
Trajectory ground_history(const GridSpec& g, std::size_t slices, double dt) {
  const double e0 = 0.5;
  Trajectory t;
  t.dt = dt;
  for (std::size_t j = 0; j < slices; ++j)
    t.slices.emplace_back(RealField::sample(g, [](double x) { return gaussian(x, std::sqrt(0.5)); }),
                          RealField(g, -e0 * dt * static_cast<double>(j)));
  return t;
}

PhysicalParams unit_oscillator() {
  PhysicalParams p;
  p.potential = PotentialSpec::harmonic(1.0);
  return p;
}

}  // namespace

TEST_SUITE("action") {
  TEST_CASE("Bohm potential of a Gaussian matches the closed form with hbar and mass scaling") {
    const double sigma = 0.8, hbar = 1.3, m = 2.0;
    const auto g = GridSpec::line({2048, -10.0, 10.0, Boundary::dirichlet});
    PhysicalParams p;
    p.hbar = hbar;
    p.masses = {m, m};
    const BohmPotential q = bohm_potential(RealField::sample(g, [&](double x) { return gaussian(x, sigma); }), p);
    // -(hbar^2/2m) (sqrt rho)''/sqrt rho with sqrt rho ~ exp(-x^2 / 4 sigma^2).
    auto exact = [&](double x) {
      return hbar * hbar / (4.0 * m * sigma * sigma) - hbar * hbar * x * x / (8.0 * m * std::pow(sigma, 4));
    };
    double err = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double x = g.coordinate(0, k);
      if (std::abs(x) < 4.0 * sigma) err = std::max(err, std::abs(q.value[k] - exact(x)));
    }
    CHECK(err < 1e-6);
  }

  TEST_CASE("nodes below the density floor are flagged and zeroed") {
    const auto g = GridSpec::line({512, -20.0, 20.0, Boundary::dirichlet});
    const BohmPotential q = bohm_potential(RealField::sample(g, [](double x) { return gaussian(x, 1.0); }), PhysicalParams{});
    CHECK(!q.flagged.empty());
    for (auto k : q.flagged) CHECK(q.value[k] == 0.0);
    CHECK(std::find(q.flagged.begin(), q.flagged.end(), std::size_t{256}) == q.flagged.end());
  }

  TEST_CASE("Fisher information of a Gaussian is hbar / (4 m sigma^2)") {
    const double sigma = 1.7, hbar = 0.9, m = 1.5;
    const auto g = GridSpec::line({2048, -15.0, 15.0, Boundary::dirichlet});
    PhysicalParams p;
    p.hbar = hbar;
    p.masses = {m, m};
    const double metric = information_metric(RealField::sample(g, [&](double x) { return gaussian(x, sigma); }), p);
    CHECK(metric == doctest::Approx(hbar / (4.0 * m * sigma * sigma)).epsilon(1e-6));
    CHECK(std::abs(information_metric(RealField(g, 0.05), p)) < 1e-20);
  }

  TEST_CASE("trapezoid time weights") {
    const auto w = time_weights(5, 0.1);
    REQUIRE(w.size() == 5);
    CHECK(w[0] == doctest::Approx(0.05));
    CHECK(w[2] == doctest::Approx(0.1));
    CHECK(w[4] == doctest::Approx(0.05));
  }

  TEST_CASE("time differences are exact on linear histories") {
    const auto g = GridSpec::line({16, 0.0, 1.0, Boundary::periodic});
    const Trajectory t = ground_history(GridSpec::line({64, -6.0, 6.0, Boundary::dirichlet}), 4, 0.2);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(phase_rate(t, j)[10] == doctest::Approx(-0.5).epsilon(1e-12));
      CHECK(density_rate(t, j)[10] == 0.0);
    }
    Trajectory bad;
    bad.dt = 0.1;
    bad.slices.emplace_back(RealField(g, 1.0), RealField(g, 0.0));
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  }

  TEST_CASE("total action vanishes on the oscillator ground state") {
    // Per unit time: <V> - E = -1/4 and (hbar/2) I_f = 1/4.
    const auto g = GridSpec::line({1024, -10.0, 10.0, Boundary::dirichlet});
    const Trajectory t = ground_history(g, 6, 0.1);
    const ActionBreakdown a = total_action(t, unit_oscillator());
    const double duration = 0.5;
    CHECK(a.classical == doctest::Approx(-0.25 * duration).epsilon(1e-6));
    CHECK(a.information == doctest::Approx(0.5 * duration).epsilon(1e-6));
    CHECK(a.total == doctest::Approx(a.classical + 0.5 * a.information).epsilon(1e-14));
    CHECK(std::abs(a.total) < 1e-7);
  }

  TEST_CASE("density gradient of the total action vanishes on an eigenstate") {
    const auto g = GridSpec::line({1024, -10.0, 10.0, Boundary::dirichlet});
    const Trajectory t = ground_history(g, 5, 0.01);
    const RealField grad = functional_gradient(ActionTerm::total, t, unit_oscillator(), 2, Component::density);
    const RealField& rho = t.slices[2].density;
    double peak = 0.0, err = 0.0;
    for (double r : rho.values()) peak = std::max(peak, r);
    for (std::size_t k = 0; k < g.size(); ++k)
      if (rho[k] > 1e-6 * peak) err = std::max(err, std::abs(grad[k]));
    CHECK(err < 1e-5);
  }

  TEST_CASE("numeric and analytic gradients agree on random smooth states") {
    // Property over random histories on a ring; the numeric backend is the
    // independent oracle for the analytic expressions.
    std::mt19937_64 rng(20);
    const double len = 2.0 * std::numbers::pi;
    const auto g = GridSpec::line({256, 0.0, len, Boundary::periodic});
    PhysicalParams p;
    p.potential = PotentialSpec::harmonic(0.3, 3.0);
    for (int trial = 0; trial < 3; ++trial) {
      Trajectory t;
      t.dt = 0.01;
      const testing::SmoothPeriodic lr0(rng, 3, 0.4, 0.0, len), lr1(rng, 3, 0.4, 0.0, len);
      const testing::SmoothPeriodic s0(rng, 3, 0.8, 0.0, len), s1(rng, 3, 0.8, 0.0, len);
      for (std::size_t j = 0; j < 5; ++j) {
        const double tau = 0.01 * static_cast<double>(j);
        t.slices.emplace_back(
            RealField::sample(g, [&](double x) { return std::exp(lr0(x) + tau * lr1(x)); }),
            RealField::sample(g, [&](double x) { return s0(x) + tau * s1(x); }));
      }
      for (Component c : {Component::density, Component::phase}) {
        const GradientDiagnostic d = compare_gradient_backends(ActionTerm::total, t, p, 2, c, 1e-5);
        CHECK(d.relative_error < 1e-5);
        CHECK(d.agree);
      }
      const GradientDiagnostic dq = compare_gradient_backends(ActionTerm::quantum, t, p, 2, Component::density, 1e-5);
      CHECK(dq.agree);
    }
  }
}

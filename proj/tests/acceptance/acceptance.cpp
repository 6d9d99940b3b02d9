// Acceptance run: one PASS/FAIL line per criterion with its runtime budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "varq/scenario.hpp"

using namespace varq;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void note(bool ok, const std::string& text) {
    detail += (detail.empty() ? "" : "; ") + text + (ok ? "" : " FAILED");
    passed = passed && ok;
  }
  void compare(bool ok, const std::string& what, double value, const char* relation, double limit) {
    std::ostringstream os;
    os << what << " " << value << " " << relation << " " << limit;
    note(ok, os.str());
  }
  void at_most(const std::string& what, double value, double limit) {
    compare(value <= limit, what, value, "<=", limit);
  }
  void at_least(const std::string& what, double value, double limit) {
    compare(value > limit, what, value, ">", limit);
  }
  void require(bool ok, const std::string& what) { note(ok, what); }
};

double gaussian(double x, double sigma) {
  return std::exp(-x * x / (2.0 * sigma * sigma)) / std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
}

// Nodes kept by the eigenstate checks: rho above a relative cut and away
// from sign changes of the real amplitude.
std::vector<char> node_mask(const RealField& amplitude, double cut, std::size_t exclusion) {
  const std::size_t n = amplitude.size();
  double peak = 0.0;
  for (double a : amplitude.values()) peak = std::max(peak, a * a);
  std::vector<char> mask(n, 1);
  for (std::size_t k = 0; k < n; ++k)
    if (!(amplitude[k] * amplitude[k] > cut * peak)) mask[k] = 0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (amplitude[k] * amplitude[k + 1] > 0.0) continue;
    const std::size_t lo = k >= exclusion ? k - exclusion : 0;
    for (std::size_t j = lo; j <= std::min(n - 1, k + 1 + exclusion); ++j) mask[j] = 0;
  }
  return mask;
}

const Check& find_check(const ScenarioReport& r, const std::string& name) {
  for (const Check& c : r.checks)
    if (c.name == name) return c;
  throw InvalidArgument("acceptance: report has no check " + name);
}

Outcome bohm_identity() {
  // Unit Gaussian, fourth-order stencils; sup-norm relative error where
  // rho > 1e-6 max (Q itself crosses zero at x = sqrt 2).
  Outcome out;
  const auto g = GridSpec::line({2048, -10.0, 10.0, Boundary::dirichlet});
  const BohmPotential q = bohm_potential(RealField::sample(g, [](double x) { return gaussian(x, 1.0); }),
                                         PhysicalParams{}, StencilOrder::fourth);
  double err = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double x = g.coordinate(0, k);
    if (std::exp(-0.5 * x * x) <= 1e-6) continue;
    const double exact = 0.25 - x * x / 8.0;
    err = std::max(err, std::abs(q.value[k] - exact));
    scale = std::max(scale, std::abs(exact));
  }
  out.at_most("relative error", err / scale, 1e-5);
  return out;
}

Outcome variational_derivation() {
  Outcome out;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double len = 2.0 * std::numbers::pi;
  const auto ring = GridSpec::line({256, 0.0, len, Boundary::periodic});
  PhysicalParams p;
  p.potential = PotentialSpec::harmonic(0.3, 3.0);
  auto smooth = [&](double amp) {
    std::vector<double> a(3), b(3);
    for (int m = 0; m < 3; ++m) {
      a[m] = amp * u(rng) / (m + 1);
      b[m] = amp * u(rng) / (m + 1);
    }
    return [a, b](double x) {
      double s = 0.0;
      for (int m = 0; m < 3; ++m) s += a[m] * std::cos((m + 1) * x) + b[m] * std::sin((m + 1) * x);
      return s;
    };
  };
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto lr0 = smooth(0.4), lr1 = smooth(0.4), s0 = smooth(0.8), s1 = smooth(0.8);
    Trajectory t;
    t.dt = 0.01;
    for (std::size_t j = 0; j < 5; ++j) {
      const double tau = 0.01 * static_cast<double>(j);
      t.slices.emplace_back(RealField::sample(ring, [&](double x) { return std::exp(lr0(x) + tau * lr1(x)); }),
                            RealField::sample(ring, [&](double x) { return s0(x) + tau * s1(x); }));
    }
    for (Component c : {Component::density, Component::phase})
      worst = std::max(worst, compare_gradient_backends(ActionTerm::total, t, p, 2, c, 1e-5, {}, 1e-5).relative_error);
  }
  out.at_most("numeric vs analytic", worst, 1e-5);

  // Closed-form oscillator eigenstates H_n(x) exp(-x^2/2) with S = -E t.
  const auto line = GridSpec::line({1024, -10.0, 10.0, Boundary::dirichlet});
  PhysicalParams osc;
  osc.potential = PotentialSpec::harmonic(1.0);
  double gradient = 0.0;
  for (int level = 0; level <= 4; ++level) {
    const RealField amp = RealField::sample(line, [level](double x) {
      double h0 = 1.0, h1 = 2.0 * x;
      if (level == 0) return std::exp(-x * x / 2.0);
      for (int k = 1; k < level; ++k) {
        const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
        h0 = h1;
        h1 = h2;
      }
      return h1 * std::exp(-x * x / 2.0);
    });
    RealField rho(line);
    for (std::size_t k = 0; k < line.size(); ++k) rho[k] = amp[k] * amp[k];
    const double norm = integrate(rho);
    for (double& r : rho.values()) r /= norm;
    const double e = level + 0.5;
    Trajectory t;
    t.dt = 0.01;
    for (std::size_t j = 0; j < 5; ++j) t.slices.emplace_back(rho, RealField(line, -e * t.dt * static_cast<double>(j)));
    const RealField grad = functional_gradient(ActionTerm::total, t, osc, 2, Component::density);
    gradient = std::max(gradient, masked_max_abs(grad, node_mask(amp, 1e-6, 3)));
  }
  out.at_most("eigenstate density gradient", gradient, 1e-5);
  return out;
}

Outcome fluctuation() {
  Outcome out;
  TransitionSetup s;
  const TransitionDistribution exact = optimal_transition(s);
  const std::vector<double> uniform(exact.mass.size(), 1.0 / static_cast<double>(exact.mass.size()));
  const NumericTransition numeric = optimize_transition_numeric(s, uniform);
  out.at_most("KL", kl_divergence(numeric.distribution.mass, exact.mass), 1e-8);

  const FluctuationStats st = sample_fluctuations(exact, 1000000, 42);
  out.at_most("uncertainty product relative error", std::abs(st.uncertainty_product[0] - 0.5) / 0.5, 1e-2);

  TransitionSetup pair;
  pair.dimension = 2;
  pair.masses = {1.0, 1.0};
  const FluctuationStats st2 = sample_fluctuations(optimal_transition(pair), 1000000, 42);
  out.at_most("covariance in MC sigmas", std::abs(st2.covariance) / st2.covariance_sigma, 3.0);
  return out;
}

struct VanishingMomentum {
  PhysicalParams params;
  GridSpec grid = GridSpec::line({1024, -10.0, 10.0, Boundary::dirichlet});
  VanishingMomentumReport report;
  DiracComparison dirac;

  VanishingMomentum() {
    params.potential = PotentialSpec::harmonic(1.0);
    report = vanishing_momentum_scenario(params, grid, 5);
    dirac = dirac_vs_simultaneous_report(report, params, grid);
  }
};

Outcome stationary_scenario() {
  Outcome out;
  const VanishingMomentum vm;
  double energy = 0.0, identity = 0.0, rate = 0.0, nonlinear = 0.0;
  double ratio = std::numeric_limits<double>::infinity();
  bool nontrivial = true;
  for (const EigenstateCheck& st : vm.report.states) {
    energy = std::max(energy, std::abs(st.energy - (st.level + 0.5)));
    identity = std::max(identity, st.identity_residual_max);
    rate = std::max(rate, st.density_rate_max);
    nontrivial = nontrivial && st.branch == Branch::nontrivial;
  }
  for (const DiracCheck& d : vm.dirac.eigenstates) {
    ratio = std::min(ratio, d.momentum_ratio);
    nonlinear = std::max(nonlinear, d.nonlinear_residual);
  }
  out.at_most("energy error", energy, 1e-3);
  out.at_most("V + Q - E", identity, 1e-4);
  out.at_most("drho/dt", rate, 1e-8);
  out.require(nontrivial, "all states on the nontrivial branch");
  out.at_least("min ||p Psi|| / ||Psi||", ratio, 0.0);
  out.at_most("nonlinear residual", nonlinear, 1e-6);
  return out;
}

Outcome trivial_branch() {
  Outcome out;
  const VanishingMomentum vm;
  const TrivialBranchCheck& t = vm.report.trivial;
  out.require(t.branch == Branch::trivial, "uniform state on the trivial branch");
  out.at_most("density gradient", t.density_gradient_max, 1e-10);
  out.at_most("Hamilton-Jacobi residual", t.hamilton_jacobi_residual, 1e-10);
  out.at_most("continuity residual", t.continuity_residual, 1e-10);
  double constraint = 0.0;
  for (double c : t.constraint_values) constraint = std::max(constraint, std::abs(c));
  out.at_most("constraint values", constraint, 1e-10);
  out.at_most("||p Psi|| / ||Psi||", t.dirac_residual, 1e-10);
  out.require(vm.dirac.trivial.linear_satisfied && vm.dirac.trivial.nonlinear_satisfied,
              "linear and nonlinear momentum constraints both hold");
  return out;
}

Outcome brackets() {
  Outcome out;
  const ScenarioReport line = run_scenario(parse_config(R"({"scenario": "constraint-check",
    "grid": {"axes": [{"points": 1024, "min": -10, "max": 10, "boundary": "dirichlet"}]},
    "physics": {"potential": {"type": "harmonic", "k": 1}}})"));
  const ScenarioReport plane = run_scenario(parse_config(R"({"scenario": "constraint-check",
    "grid": {"axes": [{"points": 128, "min": -8, "max": 8, "boundary": "periodic"},
                      {"points": 128, "min": -8, "max": 8, "boundary": "periodic"}]},
    "physics": {"masses": [1, 1], "potential": {"type": "harmonic", "k": 1}}})"));
  for (const ScenarioReport* r : {&line, &plane}) {
    const std::string tag = r == &line ? "1D " : "2D ";
    out.at_most(tag + "|{phi,H}|/scale", find_check(*r, "phi_h_normalized").value, 1e-4);
    out.at_most(tag + "|{theta,H}|", find_check(*r, "theta_h_abs").value, 0.0);
  }

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double len = 2.0 * std::numbers::pi;
  const auto ring = GridSpec::line({128, 0.0, len, Boundary::periodic});
  PhysicalParams p;
  p.potential = PotentialSpec::harmonic(0.5, 3.0);
  const std::vector<Functional> fs{ConstraintFunctional::local_momentum(0.1), ConstraintFunctional::local_momentum(-0.4),
                                   ConstraintFunctional::density_stationarity(), EnsembleHamiltonian{}};
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const double a = 0.5 * u(rng), b = 0.5 * u(rng), c = u(rng), d = u(rng), e = 0.2 * u(rng);
    const MadelungState s = normalize(
        MadelungState(RealField::sample(ring, [&](double x) { return std::exp(a * std::cos(x) + b * std::sin(2.0 * x)); }),
                      RealField::sample(ring, [&](double x) { return c * std::sin(x) + d * std::cos(3.0 * x); })));
    const RealField aux = RealField::sample(ring, [&](double x) { return e * std::sin(x); });
    for (std::size_t i = 0; i < fs.size(); ++i)
      for (std::size_t j = 0; j < fs.size(); ++j) {
        const BracketReport fg = poisson_bracket(fs[i], fs[j], s, p, &aux, &aux);
        const BracketReport gf = poisson_bracket(fs[j], fs[i], s, p, &aux, &aux);
        worst = std::max(worst, std::abs(fg.value + gf.value) / std::max(1.0, fg.scale * fg.scale));
      }
  }
  out.at_most("antisymmetry", worst, 1e-10);
  return out;
}

Outcome three_routes() {
  Outcome out;
  const Axis ax{256, -8.0, 8.0, Boundary::periodic};
  BipartiteParams p;
  const RouteComparison r = three_route_comparison(p, GridSpec::plane(ax, ax), 3);
  out.at_most("max pairwise deviation", r.max_deviation, 2e-3);
  out.at_most("constraint residual", r.max_constraint_residual, 1e-6);
  out.at_most("|E0 - sqrt(2)/2|", std::abs(r.rows[0].reduced - std::sqrt(0.5)), 2e-3);
  return out;
}

Outcome propagators() {
  // Coherent packet in a trap of period 10 pi; 31416 steps cover one period.
  Outcome out;
  const ScenarioReport r = run_scenario(parse_config(R"({"scenario": "compare-propagators",
    "grid": {"axes": [{"points": 512, "min": -8, "max": 8, "boundary": "periodic"}]},
    "physics": {"potential": {"type": "harmonic", "k": 0.04}},
    "evolve": {"dt": 0.001, "steps": 31416, "record_every": 1000,
               "packet": {"center": 0.5, "width": 1.5811388300841898, "momentum": 0}}})"));
  out.at_most("density L2", find_check(r, "max_density_l2").value, 1e-3);
  out.at_most("norm drift per 1000 steps", find_check(r, "norm_drift_per_1000_steps").value, 1e-10);
  return out;
}

struct Criterion {
  const char* id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1", "Bohm potential identity", 1.0, bohm_identity},
      {"AC2", "variational derivation", 30.0, variational_derivation},
      {"AC3", "fluctuation step", 10.0, fluctuation},
      {"AC4", "vanishing-momentum scenario", 60.0, stationary_scenario},
      {"AC5", "trivial branch", 1.0, trivial_branch},
      {"AC6", "constraint brackets", 10.0, brackets},
      {"AC7", "three-route agreement", 120.0, three_routes},
      {"AC8", "propagator cross-validation", 60.0, propagators},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs < c.budget_seconds;
    const bool ok = o.passed && in_budget;
    failures += ok ? 0 : 1;
    std::printf("%s %s %s (%.2f s, budget %.0f s%s): %s\n", ok ? "PASS" : "FAIL", c.id, c.title, secs,
                c.budget_seconds, in_budget ? "" : ", OVER BUDGET", o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

#include "varq/bipartite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace varq {

PhysicalParams BipartiteParams::physical() const {
  PhysicalParams p;
  p.hbar = hbar;
  p.masses = {mass_a, mass_b};
  p.potential = PotentialSpec::pairwise(relative);
  return p;
}

PhysicalParams BipartiteParams::reduced() const {
  PhysicalParams p;
  p.hbar = hbar;
  p.masses = {reduced_mass(), reduced_mass()};
  p.potential = relative;
  return p;
}

void BipartiteParams::validate() const {
  if (!(hbar > 0.0)) throw InvalidArgument("bipartite: hbar must be positive");
  if (!(mass_a > 0.0) || !(mass_b > 0.0) || !std::isfinite(mass_a) || !std::isfinite(mass_b))
    throw InvalidArgument("bipartite: masses must be positive");
  physical().validate();
}

double constraint_residual(const ComplexField& psi, const BipartiteParams& params) {
  const GridSpec& g = psi.grid();
  if (g.dimension() != 2) throw GridMismatch("constraint_residual: needs a 2D field");
  const ComplexField da = derivative(psi, 0), db = derivative(psi, 1);
  ComplexField sum(g);
  for (std::size_t k = 0; k < g.size(); ++k) sum[k] = da[k] + db[k];
  return params.hbar * norm(sum) / norm(psi);
}

SpectrumResult reduced_eigensolve(const BipartiteParams& params, const GridSpec& line, std::size_t k) {
  params.validate();
  return eigensolve_1d(params.reduced(), line, k);
}

namespace {

void require_square_torus(const GridSpec& plane) {
  if (plane.dimension() != 2) throw InvalidArgument("bipartite routes need a 2D grid");
  const Axis& a = plane.axis(0);
  const Axis& b = plane.axis(1);
  if (a.boundary != Boundary::periodic || b.boundary != Boundary::periodic || a.n_points != b.n_points ||
      std::abs(a.length() - b.length()) > 1e-12 * a.length() || std::abs(a.x_min - b.x_min) > 1e-12 * a.length() ||
      a.n_points % 2 != 0)
    throw InvalidArgument("bipartite routes need a square periodic plane with an even node count");
}

// Index of x_a - x_b on the relative line, separation wrapped to [-L/2, L/2).
std::size_t relative_index(const GridSpec& plane, std::size_t k) {
  const std::size_t n = plane.axis(0).n_points;
  const auto [i, j] = plane.index(k);
  const std::size_t m = (i + n - j) % n;  // separation in cells, in [0, n)
  return (m + n / 2) % n;                 // shift so index 0 is r = -L/2
}

}  // namespace

GridSpec relative_grid_for(const GridSpec& plane) {
  require_square_torus(plane);
  const double half = 0.5 * plane.axis(0).length();
  return GridSpec::line({plane.axis(0).n_points + 1, -half, half, Boundary::dirichlet});
}

ComplexField lift_relative_state(const RealField& f, const GridSpec& plane, const LiftOptions& options) {
  require_square_torus(plane);
  const GridSpec line = relative_grid_for(plane);
  if (!(f.grid() == line)) throw GridMismatch("lift_relative_state: f must live on relative_grid_for(plane)");
  const double length = plane.axis(0).length();
  ComplexField psi(plane);
  for (std::size_t k = 0; k < plane.size(); ++k) {
    double value = f[relative_index(plane, k)] / std::sqrt(length);
    if (options.com_perturbation != 0.0)
      value *= 1.0 + options.com_perturbation *
                         std::sin(2.0 * std::numbers::pi * (plane.coordinate(0, k) - plane.axis(0).x_min) / length);
    psi[k] = value;
  }
  return normalize(psi);
}

LiftVerification verify_lifted_state(const ComplexField& psi, double energy, const BipartiteParams& params,
                                     double eigen_tolerance, double constraint_tolerance) {
  const PhysicalParams phys = params.physical();
  const ComplexField hpsi = apply_hamiltonian(psi, phys);
  LiftVerification v;
  const double nn = std::real(inner(psi, psi));
  v.energy = std::real(inner(psi, hpsi)) / nn;
  ComplexField r(psi.grid());
  for (std::size_t k = 0; k < psi.size(); ++k) r[k] = hpsi[k] - energy * psi[k];
  v.eigen_residual = norm(r) / std::sqrt(nn);
  v.constraint_residual = constraint_residual(psi, params);
  v.passed = v.eigen_residual <= eigen_tolerance && v.constraint_residual <= constraint_tolerance;
  return v;
}

ConstrainedSpectrum constrained_2d_eigensolve(const BipartiteParams& params, const GridSpec& plane, std::size_t k,
                                              const LiftOptions& options, double eigen_tolerance,
                                              double constraint_tolerance) {
  ConstrainedSpectrum out;
  out.reduced = reduced_eigensolve(params, relative_grid_for(plane), k);
  for (std::size_t level = 0; level < k; ++level) {
    const ComplexField psi = lift_relative_state(out.reduced.states[level], plane, options);
    const LiftVerification v =
        verify_lifted_state(psi, out.reduced.energies[level], params, eigen_tolerance, constraint_tolerance);
    if (!v.passed) {
      std::ostringstream msg;
      msg << "lifted level " << level << " fails verification: eigen residual " << v.eigen_residual << " (tol "
          << eigen_tolerance << "), constraint residual " << v.constraint_residual << " (tol "
          << constraint_tolerance << ")";
      throw VerificationFailure(msg.str());
    }
    out.lifted.push_back(v);
  }
  return out;
}

SimultaneousLevel simultaneous_level(const ComplexField& psi, const BipartiteParams& params,
                                     double relative_density_cut, std::size_t node_exclusion) {
  const GridSpec& g = psi.grid();
  if (g.dimension() != 2) throw InvalidArgument("simultaneous_level: needs a 2D state");
  const PhysicalParams phys = params.physical();
  RealField rho(g);
  for (std::size_t k = 0; k < g.size(); ++k) rho[k] = std::norm(psi[k]);
  const double rho_max = *std::max_element(rho.values().begin(), rho.values().end());

  // Skip low density and a few cells either side of every sign change.
  std::vector<char> mask(g.size(), 1);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!(rho[k] > relative_density_cut * rho_max)) mask[k] = 0;
  for (int a = 0; a < 2; ++a) {
    const Axis& ax = g.axis(a);
    const std::size_t n = ax.n_points;
    const std::size_t stride = g.stride(a);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const std::size_t i = g.index(k)[a];
      const std::size_t base = k - i * stride;
      if (i + 1 == n && ax.boundary != Boundary::periodic) continue;
      const std::size_t next = base + ((i + 1) % n) * stride;
      if (std::real(psi[k]) * std::real(psi[next]) >= 0.0 && std::real(psi[k]) != 0.0) continue;
      for (std::size_t d = 0; d <= 2 * node_exclusion + 1; ++d) {
        const std::size_t j = (i + n + d - node_exclusion) % n;
        mask[base + j * stride] = 0;
      }
    }
  }

  SimultaneousLevel out;
  const RealField v = sample_potential(phys.potential, g);
  const BohmPotential q = bohm_potential(rho, phys, StencilOrder::second);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!mask[k]) continue;
    ++out.checked_nodes;
    num += g.weight(k) * rho[k] * (v[k] + q.value[k]);
    den += g.weight(k) * rho[k];
  }
  if (!(den > 0.0)) throw NumericalFailure("simultaneous_level: no valid nodes");
  out.energy = num / den;

  Trajectory traj;
  traj.dt = 0.01;
  for (std::size_t j = 0; j < 5; ++j)
    traj.slices.emplace_back(rho, RealField(g, -out.energy * static_cast<double>(j) * traj.dt));
  const std::vector<ConstraintFunctional> constraints{ConstraintFunctional::total_momentum(),
                                                      ConstraintFunctional::relative_density()};
  const MultiplierSolution lambda = solve_multipliers(traj, phys, constraints, mask, 2, StencilOrder::second);
  out.multipliers = {lambda.multipliers[0], lambda.multipliers[1]};
  out.active = {lambda.active[0], lambda.active[1]};
  const StationarityResiduals res =
      stationarity_residuals(traj, phys, constraints, lambda.multipliers, 2, StencilOrder::second);
  out.hamilton_jacobi_residual = masked_max_abs(res.hamilton_jacobi, mask);
  out.continuity_residual = masked_max_abs(res.continuity, mask);
  out.constraint_values = res.constraint_values;
  return out;
}

RouteComparison three_route_comparison(const BipartiteParams& params, const GridSpec& plane, std::size_t k) {
  const ConstrainedSpectrum dirac = constrained_2d_eigensolve(params, plane, k);
  RouteComparison out;
  for (std::size_t level = 0; level < k; ++level) {
    RouteRow row;
    row.level = level;
    row.reduced = dirac.reduced.energies[level];
    row.dirac = dirac.lifted[level].energy;
    row.constraint_residual = dirac.lifted[level].constraint_residual;
    row.eigen_residual = dirac.lifted[level].eigen_residual;
    const ComplexField psi = lift_relative_state(dirac.reduced.states[level], plane);
    row.detail = simultaneous_level(psi, params);
    row.simultaneous = row.detail.energy;
    row.max_deviation = std::max({std::abs(row.reduced - row.dirac), std::abs(row.reduced - row.simultaneous),
                                  std::abs(row.dirac - row.simultaneous)});
    out.max_deviation = std::max(out.max_deviation, row.max_deviation);
    out.max_constraint_residual = std::max(out.max_constraint_residual, row.constraint_residual);
    out.max_stationarity_residual = std::max(
        {out.max_stationarity_residual, row.detail.hamilton_jacobi_residual, row.detail.continuity_residual});
    out.max_multiplier =
        std::max({out.max_multiplier, std::abs(row.detail.multipliers[0]), std::abs(row.detail.multipliers[1])});
    out.rows.push_back(std::move(row));
  }
  return out;
}

double bipartite_information_metric(const RealField& rho, const BipartiteParams& params) {
  if (rho.grid().dimension() != 2) throw GridMismatch("bipartite_information_metric: needs a 2D density");
  return information_metric(rho, params.physical());
}

}  // namespace varq

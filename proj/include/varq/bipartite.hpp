#pragma once

// Two particles interacting through V(x_a - x_b): reduced, operator-
// constrained and multiplier-constrained routes to the same spectrum.

#include <array>
#include <string>
#include <vector>

#include "varq/solvers.hpp"

namespace varq {

struct BipartiteParams {
  double hbar = 1.0;
  double mass_a = 1.0;
  double mass_b = 1.0;
  PotentialSpec relative = PotentialSpec::harmonic(1.0);  // 1D, evaluated at x_a - x_b
  /// Center-of-mass velocity. Kept for the record only; its kinetic term
  /// drops out of the short-time fluctuation step.
  double com_velocity = 0.0;

  double total_mass() const { return mass_a + mass_b; }
  double reduced_mass() const { return mass_a * mass_b / (mass_a + mass_b); }
  /// Two-axis parameters with the pairwise potential.
  PhysicalParams physical() const;
  /// One-axis parameters in the relative coordinate with the reduced mass.
  PhysicalParams reduced() const;
  void validate() const;
};

/// ||(p_a + p_b) Psi|| / ||Psi|| with fourth-order derivatives.
double constraint_residual(const ComplexField& psi, const BipartiteParams& params);

/// Lowest `k` levels of the relative-coordinate problem with the reduced mass.
SpectrumResult reduced_eigensolve(const BipartiteParams& params, const GridSpec& line, std::size_t k);

/// Relative-coordinate line matching a square periodic plane of n x n nodes
/// and side L: Dirichlet on [-L/2, L/2] with n + 1 nodes, so both grids share
/// the spacing L/n.
GridSpec relative_grid_for(const GridSpec& plane);

struct LiftOptions {
  /// Amplitude of an added x_a dependence, (1 + eps sin(2 pi x_a / L)).
  /// Non-zero values produce states off the constraint surface.
  double com_perturbation = 0.0;
};

/// Psi(x_a, x_b) = f(x_a - x_b) / sqrt(L), with the separation wrapped to
/// the nearest image. Flat along the center-of-mass direction.
ComplexField lift_relative_state(const RealField& f, const GridSpec& plane, const LiftOptions& options = {});

struct LiftVerification {
  double energy = 0.0;           // Rayleigh quotient with the plane Hamiltonian
  double eigen_residual = 0.0;   // ||H Psi - E Psi|| / ||Psi||
  double constraint_residual = 0.0;
  bool passed = false;
};

LiftVerification verify_lifted_state(const ComplexField& psi, double energy, const BipartiteParams& params,
                                     double eigen_tolerance = 1e-3, double constraint_tolerance = 1e-6);

struct ConstrainedSpectrum {
  SpectrumResult reduced;
  std::vector<LiftVerification> lifted;
};

/// Lifts each reduced eigenfunction onto the plane and verifies it against
/// the full plane Hamiltonian and the momentum constraint. Throws
/// VerificationFailure naming the first level that misses a tolerance.
ConstrainedSpectrum constrained_2d_eigensolve(const BipartiteParams& params, const GridSpec& plane, std::size_t k,
                                              const LiftOptions& options = {}, double eigen_tolerance = 1e-3,
                                              double constraint_tolerance = 1e-6);

struct SimultaneousLevel {
  double energy = 0.0;
  std::array<double, 2> multipliers{0.0, 0.0};  // total momentum, relative density
  std::array<char, 2> active{0, 0};
  double hamilton_jacobi_residual = 0.0;
  double continuity_residual = 0.0;
  std::vector<double> constraint_values;
  std::size_t checked_nodes = 0;
};

/// Energy and multiplier-augmented stationarity of a lifted state: the
/// energy is the density-weighted mean of V + Q_a + Q_b, the phase is
/// S = -E t, and the multipliers are fitted by least squares.
SimultaneousLevel simultaneous_level(const ComplexField& psi, const BipartiteParams& params,
                                     double relative_density_cut = 1e-6, std::size_t node_exclusion = 3);

struct RouteRow {
  std::size_t level = 0;
  double reduced = 0.0;
  double dirac = 0.0;
  double simultaneous = 0.0;
  double max_deviation = 0.0;
  double constraint_residual = 0.0;
  double eigen_residual = 0.0;
  SimultaneousLevel detail;
};

struct RouteComparison {
  std::vector<RouteRow> rows;
  double max_deviation = 0.0;
  double max_constraint_residual = 0.0;
  double max_stationarity_residual = 0.0;
  double max_multiplier = 0.0;
};

RouteComparison three_route_comparison(const BipartiteParams& params, const GridSpec& plane, std::size_t k);

/// Mass-weighted sum of per-axis Fisher terms.
double bipartite_information_metric(const RealField& rho, const BipartiteParams& params);

}  // namespace varq

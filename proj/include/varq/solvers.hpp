#pragma once

// Stationary states, time propagation in both representations, and the
// vanishing-local-momentum scenario.

#include <string>
#include <vector>

#include "varq/constraints.hpp"

namespace varq {

struct SpectrumResult {
  std::vector<double> energies;   // ascending
  std::vector<RealField> states;  // orthonormal under integrate()
  std::vector<double> residuals;  // ||H psi - E psi|| / ||psi|| with the discrete H
};

/// Discrete Hamiltonian with the 3-point (per axis) Laplacian. Dirichlet
/// boundary nodes are pinned to zero; periodic axes wrap.
RealField apply_hamiltonian(const RealField& psi, const PhysicalParams& params);
ComplexField apply_hamiltonian(const ComplexField& psi, const PhysicalParams& params);

/// Lowest `k` eigenpairs of the tridiagonal Hamiltonian on a Dirichlet line
/// (axis-0 mass). States are sign-fixed to a positive mean, or a positive
/// first lobe when the mean vanishes by symmetry.
SpectrumResult eigensolve_1d(const PhysicalParams& params, const GridSpec& grid, std::size_t k);

/// (4 E(h/2) - E(h)) / 3 from solves on `grid` and on a grid with twice the
/// resolution.
std::vector<double> richardson_energies(const PhysicalParams& params, const GridSpec& grid, std::size_t k);

struct WaveTrajectory {
  std::vector<ComplexField> frames;
  std::vector<double> times;
  std::vector<double> norms;  // ||psi|| per frame
  std::string warning;        // non-empty when dt max|V| / hbar > 0.5
};

/// Crank-Nicolson (Cayley) stepping of a 1D wavefunction. Records the
/// initial frame, every `record_every` steps, and the final frame.
WaveTrajectory propagate_wavefunction(const ComplexField& psi0, const PhysicalParams& params, double dt,
                                      std::size_t steps, std::size_t record_every = 0);

struct MadelungTrajectory {
  std::vector<MadelungState> frames;
  std::vector<double> times;
  std::vector<double> norms;  // integral of the density per frame, uncorrected
};

/// Classical RK4 on drho/dt = -div(rho grad S / m) and
/// dS/dt = -(|grad S|^2 / 2m + V + Q). Requires a nodeless initial density
/// (min >= 1e-8 max) and aborts with DensityFloorBreach if any stage drops
/// below the density floor.
MadelungTrajectory propagate_madelung(const MadelungState& state0, const PhysicalParams& params, double dt,
                                      std::size_t steps, std::size_t record_every = 0,
                                      StencilOrder order = StencilOrder::fourth);

enum class Branch { trivial, nontrivial };
const char* branch_name(Branch b);

struct EigenstateCheck {
  std::size_t level = 0;
  double energy = 0.0;
  Branch branch = Branch::nontrivial;
  double multiplier = 0.0;          // fixed value -p_c / m
  double phase_gradient_max = 0.0;  // max |dS/dx|
  double density_gradient_max = 0.0;
  double density_rate_max = 0.0;     // max |drho/dt| under propagation
  double identity_residual_max = 0.0;  // max |V + Q - E| over checked nodes
  std::size_t checked_nodes = 0;
  std::size_t excluded_nodes = 0;  // node neighbourhoods and low density
  double hamilton_jacobi_residual = 0.0;  // stationarity residuals, lambda = 0
  double continuity_residual = 0.0;
  std::vector<double> constraint_values;  // local momentum, density stationarity
  std::vector<double> quantum_potential;  // second-order Q per node
};

struct TrivialBranchCheck {
  Branch branch = Branch::trivial;
  double density_gradient_max = 0.0;
  double hamilton_jacobi_residual = 0.0;
  double continuity_residual = 0.0;
  std::vector<double> constraint_values;
  double dirac_residual = 0.0;  // ||p Psi|| / ||Psi||
};

struct ScenarioOptions {
  double propagation_time = 1.0;
  double propagation_dt = 1e-2;
  std::size_t record_every = 10;
  double relative_density_cut = 1e-6;  // identity checked where rho > cut * max rho
  std::size_t node_exclusion = 3;      // cells excluded around each sign change
  std::size_t trivial_points = 256;
};

struct VanishingMomentumReport {
  SpectrumResult spectrum;
  std::vector<EigenstateCheck> states;
  TrivialBranchCheck trivial;
};

/// Builds the lowest `k` eigenstates with S spatially constant (p_c = 0),
/// checks the stationarity and quantum Hamilton-Jacobi identities on each,
/// and separately constructs the uniform-density branch.
VanishingMomentumReport vanishing_momentum_scenario(const PhysicalParams& params, const GridSpec& grid, std::size_t k,
                                                    const ScenarioOptions& options = {});

struct DiracCheck {
  std::size_t level = 0;
  double momentum_ratio = 0.0;   // ||p Psi|| / ||Psi||
  double momentum_real = 0.0;    // ||sqrt(rho) dS/dx||
  double momentum_imag = 0.0;    // ||hbar d sqrt(rho)/dx||
  double nonlinear_residual = 0.0;  // rho-weighted norm of p(ln Psi - ln Psi*)
  bool linear_satisfied = false;
  bool nonlinear_satisfied = false;
};

struct DiracComparison {
  std::vector<DiracCheck> eigenstates;
  DiracCheck trivial;
};

/// Contrasts the linear operator constraint p Psi = 0 with the nonlinear
/// form p(ln Psi - ln Psi*) = 0 on the scenario states. Wavefunctions are
/// evaluated at `time` so they carry a non-trivial global phase.
DiracComparison dirac_vs_simultaneous_report(const VanishingMomentumReport& report, const PhysicalParams& params,
                                             const GridSpec& grid, double time = 0.7, double tolerance = 1e-6);

}  // namespace varq

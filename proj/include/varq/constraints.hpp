#pragma once

// Constraint functionals on (density, phase) fields, multiplier-augmented
// actions, and the functional Poisson bracket.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "varq/action.hpp"

namespace varq {

enum class ConstraintKind {
  local_momentum,        // int rho (dS/dx - p_c), 1D
  density_stationarity,  // int rho * drho/dt, 1D; drho/dt supplied as aux
  total_momentum,        // int rho (d_a S + d_b S), 2D
  relative_density,      // int rho (d_a rho + d_b rho), 2D
};

struct ConstraintFunctional {
  ConstraintKind kind = ConstraintKind::local_momentum;
  double target_momentum = 0.0;  // p_c for local_momentum

  static ConstraintFunctional local_momentum(double p_c = 0.0) { return {ConstraintKind::local_momentum, p_c}; }
  static ConstraintFunctional density_stationarity() { return {ConstraintKind::density_stationarity, 0.0}; }
  static ConstraintFunctional total_momentum() { return {ConstraintKind::total_momentum, 0.0}; }
  static ConstraintFunctional relative_density() { return {ConstraintKind::relative_density, 0.0}; }

  bool needs_aux() const { return kind == ConstraintKind::density_stationarity; }
  std::string name() const;
};

/// int rho (sum_a |d_a S|^2 / 2 m_a + V) + hbar/2 * Fisher metric.
struct EnsembleHamiltonian {};

using Functional = std::variant<ConstraintFunctional, EnsembleHamiltonian>;

std::string functional_name(const Functional& f);

/// `aux` is the density rate field; required by density_stationarity and
/// ignored otherwise.
double evaluate_constraint(const ConstraintFunctional& c, const MadelungState& state,
                           const RealField* aux = nullptr, StencilOrder order = StencilOrder::fourth);

double evaluate_functional(const Functional& f, const MadelungState& state, const PhysicalParams& params,
                           const RealField* aux = nullptr, StencilOrder order = StencilOrder::fourth);

struct DerivativeOptions {
  GradientBackend backend = GradientBackend::analytic;
  double step = 1e-6;
  StencilOrder order = StencilOrder::fourth;
};

/// Node-wise functional derivative per unit volume. The aux field of
/// density_stationarity is held fixed, so its derivative is aux itself with
/// respect to the density and zero with respect to the phase.
RealField functional_derivative(const Functional& f, const MadelungState& state, const PhysicalParams& params,
                                Component component, const RealField* aux = nullptr,
                                const DerivativeOptions& options = {});

/// |value| <= 1e-6 + 1e-4 * scale.
bool weakly_zero(double value, double scale);

struct BracketReport {
  double value = 0.0;
  double scale = 0.0;  // max of the two gradient norms
  double normalized = 0.0;
  double tolerance = 0.0;
  bool consistent = false;  // false means a secondary constraint is indicated
};

/// {F, G} = int (dF/drho dG/dS - dF/dS dG/drho).
BracketReport poisson_bracket(const Functional& f, const Functional& g, const MadelungState& state,
                              const PhysicalParams& params, const RealField* aux_f = nullptr,
                              const RealField* aux_g = nullptr, double tolerance = 1e-4,
                              const DerivativeOptions& options = {});

struct AugmentedAction {
  ActionBreakdown base;
  std::vector<double> constraint_integrals;  // time-integrated constraint values
  double total = 0.0;                        // base.total + sum lambda_i * integral_i
};

/// Density rates for density_stationarity come from differencing the
/// trajectory, never from the continuity equation.
AugmentedAction augmented_total_action(const Trajectory& traj, const PhysicalParams& params,
                                       const std::vector<ConstraintFunctional>& constraints,
                                       const std::vector<double>& multipliers,
                                       StencilOrder order = StencilOrder::fourth);

struct StationarityResiduals {
  std::size_t slice = 0;
  /// Variation with respect to the density: dS/dt + |grad S|^2/2m + V + Q
  /// + sum_i lambda_i dC_i/drho.
  RealField hamilton_jacobi;
  /// Minus the variation with respect to the phase: drho/dt +
  /// div(rho grad S / m) - sum_i lambda_i dC_i/dS.
  RealField continuity;
  std::vector<double> constraint_values;
};

/// Residuals at `slice` (defaults to the middle slice).
StationarityResiduals stationarity_residuals(const Trajectory& traj, const PhysicalParams& params,
                                             const std::vector<ConstraintFunctional>& constraints,
                                             const std::vector<double>& multipliers,
                                             std::optional<std::size_t> slice = std::nullopt,
                                             StencilOrder order = StencilOrder::fourth);

struct MultiplierSolution {
  std::vector<double> multipliers;
  std::vector<char> active;  // 0 where the constraint gradient vanishes
  double residual_before = 0.0;
  double residual_after = 0.0;
};

/// Minimum-norm least-squares multipliers that best zero both residual
/// fields over `mask`. Constraints whose gradients vanish on the mask get
/// multiplier 0 and are marked inactive.
MultiplierSolution solve_multipliers(const Trajectory& traj, const PhysicalParams& params,
                                     const std::vector<ConstraintFunctional>& constraints,
                                     const std::vector<char>& mask, std::optional<std::size_t> slice = std::nullopt,
                                     StencilOrder order = StencilOrder::fourth);

/// Max |field| over nodes with mask != 0 (all nodes if the mask is empty).
double masked_max_abs(const RealField& field, const std::vector<char>& mask = {});

enum class PhaseSpaceCase {
  vanishing_momentum,  // phi = p - p_c, H = p^2/2m + V(x)
  bipartite,           // phi = p_a + p_b, H = sum p^2/2m + V(x_a - x_b)
};

struct ConsistencyResult {
  /// {phi, H} evaluated on the constraint surface, node-wise.
  RealField bracket;
  double max_abs = 0.0;
  bool secondary = false;
  std::string description;
};

/// Point-particle consistency of the primary constraint. For the
/// vanishing-momentum case the bracket is -dV/dx; a non-zero field is the
/// secondary constraint.
ConsistencyResult classical_consistency(PhaseSpaceCase which, const GridSpec& grid, const PotentialSpec& potential);

}  // namespace varq

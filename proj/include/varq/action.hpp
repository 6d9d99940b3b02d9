#pragma once

// Classical ensemble action, the Fisher information term, the quantum
// (Bohm) potential, and functional gradients of the total action.

#include <cstddef>
#include <vector>

#include "varq/fields.hpp"

namespace varq {

/// Time slices of a (density, phase) history at uniform spacing dt.
struct Trajectory {
  std::vector<MadelungState> slices;
  double dt = 0.0;

  const GridSpec& grid() const { return slices.at(0).grid(); }
  void validate() const;
};

struct ActionBreakdown {
  double classical = 0.0;
  double information = 0.0;  // time integral of the Fisher metric
  double total = 0.0;        // classical + hbar/2 * information
  RealField classical_density;    // time-integrated node densities
  RealField information_density;  // time-integrated, hbar/2 already applied
};

/// rho * (dS/dt + sum_a |d_a S|^2 / 2 m_a + V), node-wise.
RealField classical_action_density(const MadelungState& state, const PhysicalParams& params,
                                   const RealField& phase_rate, StencilOrder order = StencilOrder::fourth);

/// sum_a (hbar / 4 m_a) (d_a rho)^2 / rho; nodes below the density floor
/// contribute nothing.
RealField information_density(const RealField& rho, const PhysicalParams& params,
                              StencilOrder order = StencilOrder::fourth);
double information_metric(const RealField& rho, const PhysicalParams& params,
                          StencilOrder order = StencilOrder::fourth);

struct BohmPotential {
  RealField value;
  std::vector<std::size_t> flagged;  // nodes below the density floor, set to 0
};

/// -(hbar^2 / 2 m_axis) d^2 sqrt(rho) / sqrt(rho) along one axis.
BohmPotential bohm_potential_axis(const RealField& rho, const PhysicalParams& params, int axis,
                                  StencilOrder order = StencilOrder::fourth);
/// Sum of the per-axis terms.
BohmPotential bohm_potential(const RealField& rho, const PhysicalParams& params,
                             StencilOrder order = StencilOrder::fourth);

/// Trapezoid weights over `count` slices.
std::vector<double> time_weights(std::size_t count, double dt);
/// Centered differences across slices, one-sided at the ends.
RealField phase_rate(const Trajectory& traj, std::size_t slice);
RealField density_rate(const Trajectory& traj, std::size_t slice);

ActionBreakdown total_action(const Trajectory& traj, const PhysicalParams& params,
                             StencilOrder order = StencilOrder::fourth);

enum class ActionTerm { total, classical, quantum };
enum class Component { density, phase };
enum class GradientBackend { analytic, numeric };

struct GradientOptions {
  GradientBackend backend = GradientBackend::analytic;
  double step = 1e-6;  // relative perturbation for the numeric backend
  StencilOrder order = StencilOrder::fourth;
};

/// Functional derivative of an action term with respect to one slice of
/// the density or phase, per unit time and volume.
///
/// The analytic backend returns dS/dt + |grad S|^2/2m + V + Q for the
/// density and -(d rho/dt + div(rho grad S / m)) for the phase. The numeric
/// backend perturbs each node of the discrete action. The phase derivative
/// of the time-derivative term matches the analytic form only on slices at
/// least two away from either end.
RealField functional_gradient(ActionTerm term, const Trajectory& traj, const PhysicalParams& params,
                              std::size_t slice, Component component, const GradientOptions& options = {});

struct GradientDiagnostic {
  double max_abs_difference = 0.0;
  double scale = 0.0;  // max |analytic| over compared nodes
  double relative_error = 0.0;
  std::size_t worst_node = 0;
  std::size_t compared = 0;
  bool agree = false;
};

/// Runs both backends and reports their sup-norm disagreement relative to
/// the analytic sup norm. Nodes with mask[k] == 0 are skipped; an empty mask
/// compares everything.
GradientDiagnostic compare_gradient_backends(ActionTerm term, const Trajectory& traj, const PhysicalParams& params,
                                             std::size_t slice, Component component, double tolerance = 1e-5,
                                             const std::vector<char>& mask = {}, double step = 1e-6);

}  // namespace varq

#include "varq/action.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace varq {

void Trajectory::validate() const {
  if (slices.size() < 2) throw InvalidArgument("trajectory needs at least 2 slices");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("trajectory dt must be positive");
  for (const auto& s : slices)
    if (!(s.grid() == slices.front().grid())) throw GridMismatch("trajectory slices live on different grids");
}

RealField classical_action_density(const MadelungState& state, const PhysicalParams& params,
                                   const RealField& rate, StencilOrder order) {
  require_same_grid(state.density, rate, "classical_action_density");
  const GridSpec& g = state.grid();
  const RealField v = sample_potential(params.potential, g);
  RealField kinetic(g);
  for (int a = 0; a < g.dimension(); ++a) {
    const RealField ds = derivative(state.phase, a, order);
    const double inv2m = 0.5 / params.mass(a);
    for (std::size_t k = 0; k < g.size(); ++k) kinetic[k] += inv2m * ds[k] * ds[k];
  }
  RealField out(g);
  for (std::size_t k = 0; k < g.size(); ++k) out[k] = state.density[k] * (rate[k] + kinetic[k] + v[k]);
  return out;
}

RealField information_density(const RealField& rho, const PhysicalParams& params, StencilOrder order) {
  const GridSpec& g = rho.grid();
  RealField out(g);
  for (int a = 0; a < g.dimension(); ++a) {
    const RealField d = derivative(rho, a, order);
    const double c = params.hbar / (4.0 * params.mass(a));
    for (std::size_t k = 0; k < g.size(); ++k)
      if (rho[k] >= density_floor) out[k] += c * d[k] * d[k] / rho[k];
  }
  return out;
}

double information_metric(const RealField& rho, const PhysicalParams& params, StencilOrder order) {
  return integrate(information_density(rho, params, order));
}

BohmPotential bohm_potential_axis(const RealField& rho, const PhysicalParams& params, int axis, StencilOrder order) {
  const GridSpec& g = rho.grid();
  RealField amp(g);
  for (std::size_t k = 0; k < g.size(); ++k) amp[k] = std::sqrt(std::max(rho[k], 0.0));
  const RealField d2 = second_derivative(amp, axis, order);
  const double c = -params.hbar * params.hbar / (2.0 * params.mass(axis));
  BohmPotential out{RealField(g), {}};
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (rho[k] < density_floor) {
      out.flagged.push_back(k);
      continue;
    }
    out.value[k] = c * d2[k] / amp[k];
  }
  return out;
}

BohmPotential bohm_potential(const RealField& rho, const PhysicalParams& params, StencilOrder order) {
  BohmPotential out = bohm_potential_axis(rho, params, 0, order);
  for (int a = 1; a < rho.grid().dimension(); ++a) {
    const BohmPotential part = bohm_potential_axis(rho, params, a, order);
    for (std::size_t k = 0; k < rho.size(); ++k) out.value[k] += part.value[k];
  }
  return out;
}

std::vector<double> time_weights(std::size_t count, double dt) {
  std::vector<double> tau(count, dt);
  if (count >= 1) {
    tau.front() *= 0.5;
    tau.back() *= 0.5;
  }
  return tau;
}

namespace {

RealField slice_rate(const Trajectory& traj, std::size_t slice, bool phase) {
  traj.validate();
  const std::size_t n = traj.slices.size();
  if (slice >= n) throw InvalidArgument("slice index out of range");
  auto field = [&](std::size_t j) -> const RealField& { return phase ? traj.slices[j].phase : traj.slices[j].density; };
  std::size_t lo = slice == 0 ? 0 : slice - 1;
  std::size_t hi = slice + 1 == n ? slice : slice + 1;
  const double span = static_cast<double>(hi - lo) * traj.dt;
  RealField out(traj.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = (field(hi)[k] - field(lo)[k]) / span;
  return out;
}

}  // namespace

RealField phase_rate(const Trajectory& traj, std::size_t slice) { return slice_rate(traj, slice, true); }
RealField density_rate(const Trajectory& traj, std::size_t slice) { return slice_rate(traj, slice, false); }

ActionBreakdown total_action(const Trajectory& traj, const PhysicalParams& params, StencilOrder order) {
  traj.validate();
  params.validate();
  const GridSpec& g = traj.grid();
  const auto tau = time_weights(traj.slices.size(), traj.dt);
  ActionBreakdown out{0.0, 0.0, 0.0, RealField(g), RealField(g)};
  for (std::size_t j = 0; j < traj.slices.size(); ++j) {
    const auto& s = traj.slices[j];
    const RealField cd = classical_action_density(s, params, phase_rate(traj, j), order);
    const RealField id = information_density(s.density, params, order);
    out.classical += tau[j] * integrate(cd);
    out.information += tau[j] * integrate(id);
    for (std::size_t k = 0; k < g.size(); ++k) {
      out.classical_density[k] += tau[j] * cd[k];
      out.information_density[k] += tau[j] * 0.5 * params.hbar * id[k];
    }
  }
  out.total = out.classical + 0.5 * params.hbar * out.information;
  return out;
}

namespace {

RealField analytic_gradient(ActionTerm term, const Trajectory& traj, const PhysicalParams& params,
                            std::size_t slice, Component component, StencilOrder order) {
  const auto& s = traj.slices[slice];
  const GridSpec& g = s.grid();
  RealField out(g);
  if (component == Component::density) {
    if (term != ActionTerm::quantum) {
      const RealField rate = phase_rate(traj, slice);
      const RealField v = sample_potential(params.potential, g);
      for (std::size_t k = 0; k < g.size(); ++k) out[k] = rate[k] + v[k];
      for (int a = 0; a < g.dimension(); ++a) {
        const RealField ds = derivative(s.phase, a, order);
        for (std::size_t k = 0; k < g.size(); ++k) out[k] += 0.5 * ds[k] * ds[k] / params.mass(a);
      }
    }
    if (term != ActionTerm::classical) {
      const BohmPotential q = bohm_potential(s.density, params, order);
      for (std::size_t k = 0; k < g.size(); ++k) out[k] += q.value[k];
    }
    return out;
  }
  if (term == ActionTerm::quantum) return out;
  const RealField rate = density_rate(traj, slice);
  for (std::size_t k = 0; k < g.size(); ++k) out[k] = -rate[k];
  for (int a = 0; a < g.dimension(); ++a) {
    const RealField ds = derivative(s.phase, a, order);
    RealField flux(g);
    for (std::size_t k = 0; k < g.size(); ++k) flux[k] = s.density[k] * ds[k] / params.mass(a);
    const RealField div = derivative(flux, a, order);
    for (std::size_t k = 0; k < g.size(); ++k) out[k] -= div[k];
  }
  return out;
}

// Node-local evaluation of the discrete action so a single-node
// perturbation only re-sums the terms it can reach.
class LocalAction {
 public:
  LocalAction(ActionTerm term, const Trajectory& traj, const PhysicalParams& params, StencilOrder order)
      : term_(term), grid_(traj.grid()), params_(params), dt_(traj.dt),
        tau_(time_weights(traj.slices.size(), traj.dt)), potential_(sample_potential(params.potential, grid_)) {
    for (const auto& s : traj.slices) {
      rho_.emplace_back(s.density.values().begin(), s.density.values().end());
      phase_.emplace_back(s.phase.values().begin(), s.phase.values().end());
    }
    for (int a = 0; a < grid_.dimension(); ++a) stencils_.emplace_back(grid_.axis(a), 1, order);
    reach_ = 0;
    for (const auto& st : stencils_) reach_ = std::max(reach_, st.reach());
  }

  std::vector<double>& rho(std::size_t j) { return rho_[j]; }
  std::vector<double>& phase(std::size_t j) { return phase_[j]; }
  std::size_t reach() const { return reach_; }
  std::size_t slices() const { return rho_.size(); }

  double term(std::size_t j, std::size_t l) const {
    const double r = rho_[j][l];
    double value = 0.0;
    if (term_ != ActionTerm::quantum) {
      double kinetic = 0.0;
      for (int a = 0; a < grid_.dimension(); ++a) {
        const double ds = stencil_at<double>(stencils_[a], phase_[j], grid_, a, l);
        kinetic += 0.5 * ds * ds / params_.mass(a);
      }
      value += r * (rate(j, l) + kinetic + potential_[l]);
    }
    if (term_ != ActionTerm::classical && r >= density_floor) {
      double fisher = 0.0;
      for (int a = 0; a < grid_.dimension(); ++a) {
        const double dr = stencil_at<double>(stencils_[a], rho_[j], grid_, a, l);
        fisher += dr * dr / params_.mass(a);
      }
      value += params_.hbar * params_.hbar / 8.0 * fisher / r;
    }
    return tau_[j] * grid_.weight(l) * value;
  }

  double tau(std::size_t j) const { return tau_[j]; }

 private:
  double rate(std::size_t j, std::size_t l) const {
    const std::size_t n = phase_.size();
    const std::size_t lo = j == 0 ? 0 : j - 1;
    const std::size_t hi = j + 1 == n ? j : j + 1;
    return (phase_[hi][l] - phase_[lo][l]) / (static_cast<double>(hi - lo) * dt_);
  }

  ActionTerm term_;
  GridSpec grid_;
  const PhysicalParams& params_;
  double dt_;
  std::vector<double> tau_;
  RealField potential_;
  std::vector<std::vector<double>> rho_, phase_;
  std::vector<Stencil> stencils_;
  std::size_t reach_ = 0;
};

RealField numeric_gradient(ActionTerm term, const Trajectory& traj, const PhysicalParams& params,
                           std::size_t slice, Component component, double step, StencilOrder order) {
  LocalAction local(term, traj, params, order);
  const GridSpec& g = traj.grid();
  const std::size_t n_slices = local.slices();
  const std::size_t j_lo = component == Component::phase && slice > 0 ? slice - 1 : slice;
  const std::size_t j_hi = component == Component::phase ? std::min(slice + 1, n_slices - 1) : slice;
  auto& values = component == Component::density ? local.rho(slice) : local.phase(slice);
  const double rho_max = *std::max_element(local.rho(slice).begin(), local.rho(slice).end());

  RealField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto nodes = stencil_neighborhood(g, i, local.reach());
    auto local_sum = [&] {
      double sum = 0.0;
      for (std::size_t j = j_lo; j <= j_hi; ++j)
        for (std::size_t l : nodes) sum += local.term(j, l);
      return sum;
    };
    const double x0 = values[i];
    const double h = component == Component::density ? step * std::max(std::abs(x0), 1e-8 * rho_max)
                                                      : step * std::max(1.0, std::abs(x0));
    values[i] = x0 + h;
    const double plus = local_sum();
    values[i] = x0 - h;
    const double minus = local_sum();
    values[i] = x0;
    out[i] = (plus - minus) / (2.0 * h * local.tau(slice) * g.weight(i));
  }
  return out;
}

}  // namespace

RealField functional_gradient(ActionTerm term, const Trajectory& traj, const PhysicalParams& params,
                              std::size_t slice, Component component, const GradientOptions& options) {
  traj.validate();
  params.validate();
  if (slice >= traj.slices.size()) throw InvalidArgument("functional_gradient: slice out of range");
  if (options.backend == GradientBackend::analytic)
    return analytic_gradient(term, traj, params, slice, component, options.order);
  if (!(options.step > 0.0)) throw InvalidArgument("functional_gradient: step must be positive");
  return numeric_gradient(term, traj, params, slice, component, options.step, options.order);
}

GradientDiagnostic compare_gradient_backends(ActionTerm term, const Trajectory& traj, const PhysicalParams& params,
                                             std::size_t slice, Component component, double tolerance,
                                             const std::vector<char>& mask, double step) {
  GradientOptions opts;
  const RealField ana = functional_gradient(term, traj, params, slice, component, opts);
  opts.backend = GradientBackend::numeric;
  opts.step = step;
  const RealField num = functional_gradient(term, traj, params, slice, component, opts);
  if (!mask.empty() && mask.size() != ana.size()) throw GridMismatch("compare_gradient_backends: mask size");
  GradientDiagnostic d;
  for (std::size_t k = 0; k < ana.size(); ++k) {
    if (!mask.empty() && !mask[k]) continue;
    ++d.compared;
    d.scale = std::max(d.scale, std::abs(ana[k]));
    const double diff = std::abs(ana[k] - num[k]);
    if (diff > d.max_abs_difference) {
      d.max_abs_difference = diff;
      d.worst_node = k;
    }
  }
  d.relative_error = d.scale > 0.0 ? d.max_abs_difference / d.scale : d.max_abs_difference;
  d.agree = d.relative_error <= tolerance;
  return d;
}

}  // namespace varq

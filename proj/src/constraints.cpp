#include "varq/constraints.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace varq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_dimension(const ConstraintFunctional& c, const GridSpec& g) {
  const int want = (c.kind == ConstraintKind::total_momentum || c.kind == ConstraintKind::relative_density) ? 2 : 1;
  if (g.dimension() != want)
    throw InvalidArgument(c.name() + " is defined on " + std::to_string(want) + "D grids only");
}

const RealField& require_aux(const ConstraintFunctional& c, const MadelungState& s, const RealField* aux) {
  if (!aux) throw InvalidArgument(c.name() + " needs the density rate field as aux");
  require_same_grid(s.density, *aux, c.name().c_str());
  return *aux;
}

// Node-local integrand of a functional; perturbing one node only requires
// re-summing the nodes whose stencils reach it.
class LocalFunctional {
 public:
  LocalFunctional(const Functional& f, const MadelungState& s, const PhysicalParams& params, const RealField* aux,
                  StencilOrder order)
      : f_(f), grid_(s.grid()), params_(params), aux_(aux),
        rho_(s.density.values().begin(), s.density.values().end()),
        phase_(s.phase.values().begin(), s.phase.values().end()) {
    for (int a = 0; a < grid_.dimension(); ++a) {
      stencils_.emplace_back(grid_.axis(a), 1, order);
      reach_ = std::max(reach_, stencils_.back().reach());
    }
    if (std::holds_alternative<EnsembleHamiltonian>(f)) {
      const RealField v = sample_potential(params.potential, grid_);
      potential_.assign(v.values().begin(), v.values().end());
    }
  }

  std::vector<double>& values(Component c) { return c == Component::density ? rho_ : phase_; }
  std::size_t reach() const { return reach_; }

  double term(std::size_t l) const {
    const double w = grid_.weight(l);
    const double r = rho_[l];
    auto d = [&](const std::vector<double>& v, int a) { return stencil_at<double>(stencils_[a], v, grid_, a, l); };
    return std::visit(
        overloaded{
            [&](const ConstraintFunctional& c) {
              switch (c.kind) {
                case ConstraintKind::local_momentum:
                  return w * r * (d(phase_, 0) - c.target_momentum);
                case ConstraintKind::density_stationarity:
                  return w * r * (*aux_)[l];
                case ConstraintKind::total_momentum:
                  return w * r * (d(phase_, 0) + d(phase_, 1));
                case ConstraintKind::relative_density:
                  return w * r * (d(rho_, 0) + d(rho_, 1));
              }
              return 0.0;
            },
            [&](const EnsembleHamiltonian&) {
              double kinetic = 0.0, fisher = 0.0;
              for (int a = 0; a < grid_.dimension(); ++a) {
                const double ds = d(phase_, a);
                kinetic += 0.5 * ds * ds / params_.mass(a);
                if (r >= density_floor) {
                  const double dr = d(rho_, a);
                  fisher += dr * dr / params_.mass(a);
                }
              }
              double value = r * (kinetic + potential_[l]);
              if (r >= density_floor) value += params_.hbar * params_.hbar / 8.0 * fisher / r;
              return w * value;
            },
        },
        f_);
  }

 private:
  const Functional& f_;
  GridSpec grid_;
  const PhysicalParams& params_;
  const RealField* aux_;
  std::vector<double> rho_, phase_, potential_;
  std::vector<Stencil> stencils_;
  std::size_t reach_ = 0;
};

}  // namespace

std::string ConstraintFunctional::name() const {
  switch (kind) {
    case ConstraintKind::local_momentum:
      return "local_momentum";
    case ConstraintKind::density_stationarity:
      return "density_stationarity";
    case ConstraintKind::total_momentum:
      return "total_momentum";
    case ConstraintKind::relative_density:
      return "relative_density";
  }
  return "unknown";
}

std::string functional_name(const Functional& f) {
  return std::visit(overloaded{[](const ConstraintFunctional& c) { return c.name(); },
                               [](const EnsembleHamiltonian&) { return std::string("hamiltonian"); }},
                    f);
}

double evaluate_constraint(const ConstraintFunctional& c, const MadelungState& s, const RealField* aux,
                           StencilOrder order) {
  const GridSpec& g = s.grid();
  require_dimension(c, g);
  RealField integrand(g);
  switch (c.kind) {
    case ConstraintKind::local_momentum: {
      const RealField ds = derivative(s.phase, 0, order);
      for (std::size_t k = 0; k < g.size(); ++k) integrand[k] = s.density[k] * (ds[k] - c.target_momentum);
      break;
    }
    case ConstraintKind::density_stationarity: {
      const RealField& rate = require_aux(c, s, aux);
      for (std::size_t k = 0; k < g.size(); ++k) integrand[k] = s.density[k] * rate[k];
      break;
    }
    case ConstraintKind::total_momentum: {
      const RealField da = derivative(s.phase, 0, order), db = derivative(s.phase, 1, order);
      for (std::size_t k = 0; k < g.size(); ++k) integrand[k] = s.density[k] * (da[k] + db[k]);
      break;
    }
    case ConstraintKind::relative_density: {
      const RealField da = derivative(s.density, 0, order), db = derivative(s.density, 1, order);
      for (std::size_t k = 0; k < g.size(); ++k) integrand[k] = s.density[k] * (da[k] + db[k]);
      break;
    }
  }
  return integrate(integrand);
}

double evaluate_functional(const Functional& f, const MadelungState& s, const PhysicalParams& params,
                           const RealField* aux, StencilOrder order) {
  if (const auto* c = std::get_if<ConstraintFunctional>(&f)) return evaluate_constraint(*c, s, aux, order);
  const GridSpec& g = s.grid();
  const RealField v = sample_potential(params.potential, g);
  RealField classical(g);
  for (std::size_t k = 0; k < g.size(); ++k) classical[k] = s.density[k] * v[k];
  for (int a = 0; a < g.dimension(); ++a) {
    const RealField ds = derivative(s.phase, a, order);
    for (std::size_t k = 0; k < g.size(); ++k) classical[k] += s.density[k] * 0.5 * ds[k] * ds[k] / params.mass(a);
  }
  return integrate(classical) + 0.5 * params.hbar * information_metric(s.density, params, order);
}

namespace {

RealField analytic_derivative(const Functional& f, const MadelungState& s, const PhysicalParams& params,
                              Component component, const RealField* aux, StencilOrder order) {
  const GridSpec& g = s.grid();
  RealField out(g);
  if (const auto* c = std::get_if<ConstraintFunctional>(&f)) {
    require_dimension(*c, g);
    switch (c->kind) {
      case ConstraintKind::local_momentum:
        if (component == Component::density) {
          out = derivative(s.phase, 0, order);
          for (double& v : out.values()) v -= c->target_momentum;
        } else {
          out = derivative(s.density, 0, order);
          for (double& v : out.values()) v = -v;
        }
        break;
      case ConstraintKind::density_stationarity:
        if (component == Component::density) out = require_aux(*c, s, aux);
        break;
      case ConstraintKind::total_momentum: {
        const RealField& src = component == Component::density ? s.phase : s.density;
        const RealField da = derivative(src, 0, order), db = derivative(src, 1, order);
        const double sign = component == Component::density ? 1.0 : -1.0;
        for (std::size_t k = 0; k < g.size(); ++k) out[k] = sign * (da[k] + db[k]);
        break;
      }
      case ConstraintKind::relative_density:
        // rho d rho integrates to a boundary term, so both variations vanish.
        break;
    }
    return out;
  }
  if (component == Component::density) {
    const RealField v = sample_potential(params.potential, g);
    const BohmPotential q = bohm_potential(s.density, params, order);
    for (std::size_t k = 0; k < g.size(); ++k) out[k] = v[k] + q.value[k];
    for (int a = 0; a < g.dimension(); ++a) {
      const RealField ds = derivative(s.phase, a, order);
      for (std::size_t k = 0; k < g.size(); ++k) out[k] += 0.5 * ds[k] * ds[k] / params.mass(a);
    }
  } else {
    for (int a = 0; a < g.dimension(); ++a) {
      const RealField ds = derivative(s.phase, a, order);
      RealField flux(g);
      for (std::size_t k = 0; k < g.size(); ++k) flux[k] = s.density[k] * ds[k] / params.mass(a);
      const RealField div = derivative(flux, a, order);
      for (std::size_t k = 0; k < g.size(); ++k) out[k] -= div[k];
    }
  }
  return out;
}

RealField numeric_derivative(const Functional& f, const MadelungState& s, const PhysicalParams& params,
                             Component component, const RealField* aux, double step, StencilOrder order) {
  if (const auto* c = std::get_if<ConstraintFunctional>(&f)) {
    require_dimension(*c, s.grid());
    if (c->needs_aux()) require_aux(*c, s, aux);
  }
  LocalFunctional local(f, s, params, aux, order);
  const GridSpec& g = s.grid();
  auto& values = local.values(component);
  const auto rho = s.density.values();
  const double rho_max = *std::max_element(rho.begin(), rho.end());
  RealField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto nodes = stencil_neighborhood(g, i, local.reach());
    auto sum = [&] {
      double acc = 0.0;
      for (std::size_t l : nodes) acc += local.term(l);
      return acc;
    };
    const double x0 = values[i];
    const double h = component == Component::density ? step * std::max(std::abs(x0), 1e-8 * rho_max)
                                                      : step * std::max(1.0, std::abs(x0));
    values[i] = x0 + h;
    const double plus = sum();
    values[i] = x0 - h;
    const double minus = sum();
    values[i] = x0;
    out[i] = (plus - minus) / (2.0 * h * g.weight(i));
  }
  return out;
}

}  // namespace

RealField functional_derivative(const Functional& f, const MadelungState& state, const PhysicalParams& params,
                                Component component, const RealField* aux, const DerivativeOptions& options) {
  params.validate();
  if (options.backend == GradientBackend::analytic)
    return analytic_derivative(f, state, params, component, aux, options.order);
  if (!(options.step > 0.0)) throw InvalidArgument("functional_derivative: step must be positive");
  return numeric_derivative(f, state, params, component, aux, options.step, options.order);
}

bool weakly_zero(double value, double scale) { return std::abs(value) <= 1e-6 + 1e-4 * std::abs(scale); }

BracketReport poisson_bracket(const Functional& f, const Functional& g, const MadelungState& state,
                              const PhysicalParams& params, const RealField* aux_f, const RealField* aux_g,
                              double tolerance, const DerivativeOptions& options) {
  const RealField fr = functional_derivative(f, state, params, Component::density, aux_f, options);
  const RealField fs = functional_derivative(f, state, params, Component::phase, aux_f, options);
  const RealField gr = functional_derivative(g, state, params, Component::density, aux_g, options);
  const RealField gs = functional_derivative(g, state, params, Component::phase, aux_g, options);
  const GridSpec& grid = state.grid();
  RealField integrand(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) integrand[k] = fr[k] * gs[k] - fs[k] * gr[k];
  BracketReport out;
  out.value = integrate(integrand);
  const double norm_f = std::sqrt(inner(fr, fr) + inner(fs, fs));
  const double norm_g = std::sqrt(inner(gr, gr) + inner(gs, gs));
  out.scale = std::max(norm_f, norm_g);
  out.normalized = out.scale > 0.0 ? std::abs(out.value) / out.scale : std::abs(out.value);
  out.tolerance = tolerance;
  out.consistent = out.normalized <= tolerance;
  return out;
}

AugmentedAction augmented_total_action(const Trajectory& traj, const PhysicalParams& params,
                                       const std::vector<ConstraintFunctional>& constraints,
                                       const std::vector<double>& multipliers, StencilOrder order) {
  if (constraints.size() != multipliers.size())
    throw InvalidArgument("augmented_total_action: " + std::to_string(constraints.size()) + " constraints but " +
                          std::to_string(multipliers.size()) + " multipliers");
  AugmentedAction out{total_action(traj, params, order), std::vector<double>(constraints.size(), 0.0), 0.0};
  const auto tau = time_weights(traj.slices.size(), traj.dt);
  for (std::size_t j = 0; j < traj.slices.size(); ++j) {
    const RealField rate = density_rate(traj, j);
    for (std::size_t i = 0; i < constraints.size(); ++i)
      out.constraint_integrals[i] += tau[j] * evaluate_constraint(constraints[i], traj.slices[j], &rate, order);
  }
  out.total = out.base.total;
  for (std::size_t i = 0; i < constraints.size(); ++i) out.total += multipliers[i] * out.constraint_integrals[i];
  return out;
}

StationarityResiduals stationarity_residuals(const Trajectory& traj, const PhysicalParams& params,
                                             const std::vector<ConstraintFunctional>& constraints,
                                             const std::vector<double>& multipliers,
                                             std::optional<std::size_t> slice, StencilOrder order) {
  traj.validate();
  if (constraints.size() != multipliers.size())
    throw InvalidArgument("stationarity_residuals: constraint/multiplier count mismatch");
  const std::size_t j = slice.value_or(traj.slices.size() / 2);
  if (j >= traj.slices.size()) throw InvalidArgument("stationarity_residuals: slice out of range");
  GradientOptions go;
  go.order = order;
  StationarityResiduals out{j, functional_gradient(ActionTerm::total, traj, params, j, Component::density, go),
                            functional_gradient(ActionTerm::total, traj, params, j, Component::phase, go), {}};
  for (double& v : out.continuity.values()) v = -v;
  const auto& state = traj.slices[j];
  const RealField rate = density_rate(traj, j);
  DerivativeOptions dopt;
  dopt.order = order;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    out.constraint_values.push_back(evaluate_constraint(constraints[i], state, &rate, order));
    if (multipliers[i] == 0.0) continue;
    const RealField dr = functional_derivative(constraints[i], state, params, Component::density, &rate, dopt);
    const RealField ds = functional_derivative(constraints[i], state, params, Component::phase, &rate, dopt);
    for (std::size_t k = 0; k < state.grid().size(); ++k) {
      out.hamilton_jacobi[k] += multipliers[i] * dr[k];
      out.continuity[k] -= multipliers[i] * ds[k];
    }
  }
  return out;
}

MultiplierSolution solve_multipliers(const Trajectory& traj, const PhysicalParams& params,
                                     const std::vector<ConstraintFunctional>& constraints,
                                     const std::vector<char>& mask, std::optional<std::size_t> slice,
                                     StencilOrder order) {
  const std::vector<double> zeros(constraints.size(), 0.0);
  const StationarityResiduals base = stationarity_residuals(traj, params, constraints, zeros, slice, order);
  const GridSpec& g = traj.grid();
  if (!mask.empty() && mask.size() != g.size()) throw GridMismatch("solve_multipliers: mask size");
  std::vector<std::size_t> rows;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (mask.empty() || mask[k]) rows.push_back(k);
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::VectorXd r0(2 * m);
  for (Eigen::Index r = 0; r < m; ++r) {
    r0(r) = base.hamilton_jacobi[rows[static_cast<std::size_t>(r)]];
    r0(m + r) = base.continuity[rows[static_cast<std::size_t>(r)]];
  }
  const auto& state = traj.slices[base.slice];
  const RealField rate = density_rate(traj, base.slice);
  DerivativeOptions dopt;
  dopt.order = order;

  MultiplierSolution out;
  out.multipliers.assign(constraints.size(), 0.0);
  out.active.assign(constraints.size(), 0);
  out.residual_before = r0.norm();
  std::vector<Eigen::VectorXd> columns;
  std::vector<std::size_t> active_index;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const RealField dr = functional_derivative(constraints[i], state, params, Component::density, &rate, dopt);
    const RealField ds = functional_derivative(constraints[i], state, params, Component::phase, &rate, dopt);
    Eigen::VectorXd col(2 * m);
    for (Eigen::Index r = 0; r < m; ++r) {
      col(r) = dr[rows[static_cast<std::size_t>(r)]];
      col(m + r) = -ds[rows[static_cast<std::size_t>(r)]];
    }
    if (col.norm() <= 1e-10 * (1.0 + out.residual_before)) continue;
    columns.push_back(std::move(col));
    active_index.push_back(i);
  }
  if (columns.empty()) {
    out.residual_after = out.residual_before;
    return out;
  }
  Eigen::MatrixXd a(2 * m, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) a.col(static_cast<Eigen::Index>(c)) = columns[c];
  const Eigen::VectorXd lambda = a.completeOrthogonalDecomposition().solve(-r0);
  for (std::size_t c = 0; c < active_index.size(); ++c) {
    out.multipliers[active_index[c]] = lambda(static_cast<Eigen::Index>(c));
    out.active[active_index[c]] = 1;
  }
  out.residual_after = (r0 + a * lambda).norm();
  return out;
}

double masked_max_abs(const RealField& field, const std::vector<char>& mask) {
  if (!mask.empty() && mask.size() != field.size()) throw GridMismatch("masked_max_abs: mask size");
  double m = 0.0;
  for (std::size_t k = 0; k < field.size(); ++k)
    if (mask.empty() || mask[k]) m = std::max(m, std::abs(field[k]));
  return m;
}

ConsistencyResult classical_consistency(PhaseSpaceCase which, const GridSpec& grid, const PotentialSpec& potential) {
  const RealField v = sample_potential(potential, grid);
  ConsistencyResult out{RealField(grid), 0.0, false, {}};
  if (which == PhaseSpaceCase::vanishing_momentum) {
    if (grid.dimension() != 1) throw InvalidArgument("classical_consistency: vanishing-momentum case is 1D");
    // {p - p_c, p^2/2m + V} = -dV/dx.
    out.bracket = derivative(v, 0);
    for (double& b : out.bracket.values()) b = -b;
  } else {
    if (grid.dimension() != 2) throw InvalidArgument("classical_consistency: bipartite case is 2D");
    // {p_a + p_b, H} = -(d_a V + d_b V), which vanishes for V(x_a - x_b).
    const RealField da = derivative(v, 0), db = derivative(v, 1);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto idx = grid.index(k);
      bool edge = false;
      for (int a = 0; a < 2; ++a) {
        const Axis& ax = grid.axis(a);
        if (ax.boundary == Boundary::dirichlet && (idx[a] < 2 || idx[a] + 2 >= ax.n_points)) edge = true;
      }
      // One-sided rows on Dirichlet edges do not cancel pairwise.
      out.bracket[k] = edge ? 0.0 : -(da[k] + db[k]);
    }
  }
  out.max_abs = masked_max_abs(out.bracket);
  double v_scale = 0.0;
  for (double x : v.values()) v_scale = std::max(v_scale, std::abs(x));
  out.secondary = !weakly_zero(out.max_abs, 1e-8 * v_scale);
  std::ostringstream msg;
  if (out.secondary)
    msg << "secondary constraint dV/dx ~ 0 required (max |{phi,H}| = " << out.max_abs << ")";
  else
    msg << "primary constraint preserved; no secondary constraint";
  out.description = msg.str();
  return out;
}

}  // namespace varq

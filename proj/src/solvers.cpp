#include "varq/solvers.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace varq {

namespace {

using cplx = std::complex<double>;

template <class T>
Field<T> apply_h(const Field<T>& psi, const PhysicalParams& params) {
  const GridSpec& g = psi.grid();
  const RealField v = sample_potential(params.potential, g);
  Field<T> out(g);
  for (std::size_t k = 0; k < g.size(); ++k) out[k] = v[k] * psi[k];
  for (int a = 0; a < g.dimension(); ++a) {
    const Axis& ax = g.axis(a);
    const double h = ax.spacing();
    const double c = -params.hbar * params.hbar / (2.0 * params.mass(a) * h * h);
    const std::size_t n = ax.n_points;
    const std::size_t stride = g.stride(a);
    const bool periodic = ax.boundary == Boundary::periodic;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const std::size_t i = g.index(k)[a];
      const std::size_t base = k - i * stride;
      T left{}, right{};
      if (i > 0) {
        left = psi[k - stride];
      } else if (periodic) {
        left = psi[base + (n - 1) * stride];
      }
      if (i + 1 < n) {
        right = psi[k + stride];
      } else if (periodic) {
        right = psi[base];
      }
      out[k] += c * (left - 2.0 * psi[k] + right);
    }
  }
  // Dirichlet boundary nodes are not unknowns.
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto idx = g.index(k);
    for (int a = 0; a < g.dimension(); ++a) {
      const Axis& ax = g.axis(a);
      if (ax.boundary == Boundary::dirichlet && (idx[a] == 0 || idx[a] + 1 == ax.n_points)) out[k] = T{};
    }
  }
  return out;
}

// Thomas factorization of a constant tridiagonal matrix (sub a, diag b,
// super c), reused across many right-hand sides.
class Tridiagonal {
 public:
  Tridiagonal(std::vector<cplx> a, std::vector<cplx> b, std::vector<cplx> c) : a_(std::move(a)), c_(std::move(c)) {
    const std::size_t n = b.size();
    cp_.resize(n);
    inv_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx denom = b[i] - (i > 0 ? a_[i] * cp_[i - 1] : cplx{});
      if (std::abs(denom) < 1e-300) throw NumericalFailure("tridiagonal solve: zero pivot");
      inv_[i] = 1.0 / denom;
      cp_[i] = i + 1 < n ? c_[i] * inv_[i] : cplx{};
    }
  }

  void solve(std::vector<cplx>& x) const {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) x[i] = (x[i] - (i > 0 ? a_[i] * x[i - 1] : cplx{})) * inv_[i];
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= cp_[i] * x[i + 1];
  }

 private:
  std::vector<cplx> a_, c_, cp_, inv_;
};

// Cyclic tridiagonal solve via Sherman-Morrison on a modified Thomas system.
class CyclicTridiagonal {
 public:
  CyclicTridiagonal(cplx sub, std::vector<cplx> diag, cplx super)
      : gamma_(-diag[0]), alpha_(sub), beta_(super), base_(make(sub, diag, super, gamma_)) {
    const std::size_t n = diag.size();
    z_.assign(n, cplx{});
    z_[0] = gamma_;
    z_[n - 1] = alpha_;
    base_.solve(z_);
    denom_ = 1.0 + z_[0] + beta_ * z_[n - 1] / gamma_;
  }

  void solve(std::vector<cplx>& x) const {
    const std::size_t n = x.size();
    base_.solve(x);
    const cplx fact = (x[0] + beta_ * x[n - 1] / gamma_) / denom_;
    for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z_[i];
  }

 private:
  static Tridiagonal make(cplx sub, std::vector<cplx> diag, cplx super, cplx gamma) {
    const std::size_t n = diag.size();
    diag[0] -= gamma;
    diag[n - 1] -= sub * super / gamma;
    return Tridiagonal(std::vector<cplx>(n, sub), std::move(diag), std::vector<cplx>(n, super));
  }

  cplx gamma_, alpha_, beta_;
  Tridiagonal base_;
  std::vector<cplx> z_;
  cplx denom_;
};

void require_dirichlet_line(const GridSpec& grid, const char* who) {
  if (grid.dimension() != 1 || grid.axis(0).boundary != Boundary::dirichlet)
    throw InvalidArgument(std::string(who) + " needs a 1D Dirichlet grid");
}

}  // namespace

RealField apply_hamiltonian(const RealField& psi, const PhysicalParams& params) { return apply_h(psi, params); }
ComplexField apply_hamiltonian(const ComplexField& psi, const PhysicalParams& params) { return apply_h(psi, params); }

SpectrumResult eigensolve_1d(const PhysicalParams& params, const GridSpec& grid, std::size_t k) {
  params.validate();
  require_dirichlet_line(grid, "eigensolve_1d");
  const std::size_t n = grid.axis(0).n_points;
  if (k == 0 || k > n / 4) throw InvalidArgument("eigensolve_1d: k must lie in [1, n_points/4]");
  const double h = grid.axis(0).spacing();
  const double t = params.hbar * params.hbar / (2.0 * params.mass(0) * h * h);
  const RealField v = sample_potential(params.potential, grid);

  const auto m = static_cast<lapack_int>(n - 2);
  std::vector<double> d(static_cast<std::size_t>(m)), e(static_cast<std::size_t>(m), -t);
  for (lapack_int i = 0; i < m; ++i) d[static_cast<std::size_t>(i)] = 2.0 * t + v[static_cast<std::size_t>(i) + 1];
  std::vector<double> w(static_cast<std::size_t>(m)), z(static_cast<std::size_t>(m) * k);
  std::vector<lapack_int> support(2 * k);
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', m, d.data(), e.data(), 0.0, 0.0, 1,
                                         static_cast<lapack_int>(k), 0.0, &found, w.data(), z.data(), m,
                                         support.data());
  if (info != 0 || static_cast<std::size_t>(found) != k)
    throw NumericalFailure("eigensolve_1d: tridiagonal eigensolver failed (info " + std::to_string(info) + ")");

  SpectrumResult out;
  for (std::size_t s = 0; s < k; ++s) {
    RealField psi(grid);
    for (lapack_int i = 0; i < m; ++i)
      psi[static_cast<std::size_t>(i) + 1] = z[s * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)];
    const double nrm = norm(psi);
    double mean = 0.0, peak = 0.0;
    for (double x : psi.values()) {
      mean += x;
      peak = std::max(peak, std::abs(x));
    }
    double sign = mean >= 0.0 ? 1.0 : -1.0;
    if (std::abs(mean) * h < 1e-8 * nrm) {
      // Odd states: make the first significant lobe positive.
      for (double x : psi.values())
        if (std::abs(x) > 1e-3 * peak) {
          sign = x > 0.0 ? 1.0 : -1.0;
          break;
        }
    }
    for (double& x : psi.values()) x *= sign / nrm;
    const RealField hpsi = apply_hamiltonian(psi, params);
    RealField r(grid);
    for (std::size_t i = 0; i < n; ++i) r[i] = hpsi[i] - w[s] * psi[i];
    out.energies.push_back(w[s]);
    out.residuals.push_back(norm(r));
    out.states.push_back(std::move(psi));
  }
  return out;
}

std::vector<double> richardson_energies(const PhysicalParams& params, const GridSpec& grid, std::size_t k) {
  require_dirichlet_line(grid, "richardson_energies");
  Axis fine = grid.axis(0);
  fine.n_points = 2 * fine.n_points - 1;
  const auto coarse = eigensolve_1d(params, grid, k);
  const auto refined = eigensolve_1d(params, GridSpec::line(fine), k);
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = (4.0 * refined.energies[i] - coarse.energies[i]) / 3.0;
  return out;
}

WaveTrajectory propagate_wavefunction(const ComplexField& psi0, const PhysicalParams& params, double dt,
                                      std::size_t steps, std::size_t record_every) {
  params.validate();
  const GridSpec& g = psi0.grid();
  if (g.dimension() != 1) throw InvalidArgument("propagate_wavefunction: 1D grids only");
  if (!(dt > 0.0)) throw InvalidArgument("propagate_wavefunction: dt must be positive");
  const Axis& ax = g.axis(0);
  const bool periodic = ax.boundary == Boundary::periodic;
  const std::size_t n = ax.n_points;
  const double h = ax.spacing();
  const double t = params.hbar * params.hbar / (2.0 * params.mass(0) * h * h);
  const RealField v = sample_potential(params.potential, g);

  WaveTrajectory out;
  double vmax = 0.0;
  for (double x : v.values()) vmax = std::max(vmax, std::abs(x));
  if (dt * vmax / params.hbar > 0.5) {
    std::ostringstream msg;
    msg << "dt*max|V|/hbar = " << dt * vmax / params.hbar << " exceeds 0.5; phases of high-potential regions are "
        << "poorly resolved";
    out.warning = msg.str();
  }

  // Unknowns: all nodes on a periodic axis, interior nodes otherwise.
  const std::size_t first = periodic ? 0 : 1;
  const std::size_t count = periodic ? n : n - 2;
  const cplx f(0.0, 0.5 * dt / params.hbar);
  std::vector<cplx> diag(count);
  for (std::size_t i = 0; i < count; ++i) diag[i] = 1.0 + f * (2.0 * t + v[i + first]);
  const cplx off = -f * t;

  std::vector<cplx> state(psi0.values().begin(), psi0.values().end());
  if (!periodic) state.front() = state.back() = cplx{};
  auto record = [&](double time) {
    ComplexField frame(g, state);
    out.norms.push_back(norm(frame));
    out.frames.push_back(std::move(frame));
    out.times.push_back(time);
  };
  record(0.0);

  std::vector<cplx> rhs(count);
  auto explicit_half = [&] {
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t node = i + first;
      const cplx left = node > 0 ? state[node - 1] : state[n - 1];
      const cplx right = node + 1 < n ? state[node + 1] : state[0];
      const cplx hpsi = -t * (left + right) + (2.0 * t + v[node]) * state[node];
      rhs[i] = state[node] - f * hpsi;
    }
  };

  if (periodic) {
    const CyclicTridiagonal solver(off, diag, off);
    for (std::size_t s = 1; s <= steps; ++s) {
      explicit_half();
      solver.solve(rhs);
      std::copy(rhs.begin(), rhs.end(), state.begin());
      if ((record_every && s % record_every == 0) || s == steps) record(static_cast<double>(s) * dt);
    }
  } else {
    const Tridiagonal solver(std::vector<cplx>(count, off), diag, std::vector<cplx>(count, off));
    for (std::size_t s = 1; s <= steps; ++s) {
      explicit_half();
      solver.solve(rhs);
      std::copy(rhs.begin(), rhs.end(), state.begin() + 1);
      if ((record_every && s % record_every == 0) || s == steps) record(static_cast<double>(s) * dt);
    }
  }
  return out;
}

namespace {

struct MadelungRhs {
  const GridSpec& grid;
  const PhysicalParams& params;
  std::vector<Stencil> first, second;
  std::vector<double> potential;
  std::vector<double> amp, ds, flux;

  MadelungRhs(const GridSpec& g, const PhysicalParams& p, StencilOrder order) : grid(g), params(p) {
    for (int a = 0; a < g.dimension(); ++a) {
      first.emplace_back(g.axis(a), 1, order);
      second.emplace_back(g.axis(a), 2, order);
    }
    const RealField v = sample_potential(p.potential, g);
    potential.assign(v.values().begin(), v.values().end());
    amp.resize(g.size());
    ds.resize(g.size());
    flux.resize(g.size());
  }

  void check_floor(const std::vector<double>& rho, double time) const {
    for (std::size_t k = 0; k < rho.size(); ++k)
      if (!(rho[k] >= density_floor)) {
        std::ostringstream msg;
        msg << "density fell to " << rho[k] << " at x=" << grid.coordinate(0, k) << ", t=" << time
            << "; the density/phase equations are singular at nodes";
        throw DensityFloorBreach(msg.str(), grid.coordinate(0, k), time);
      }
  }

  void operator()(const std::vector<double>& rho, const std::vector<double>& s, std::vector<double>& drho,
                  std::vector<double>& dsdt) {
    const std::size_t n = grid.size();
    std::fill(drho.begin(), drho.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      amp[k] = std::sqrt(rho[k]);
      dsdt[k] = -potential[k];
    }
    for (int a = 0; a < grid.dimension(); ++a) {
      const double inv_m = 1.0 / params.mass(a);
      const double qc = -params.hbar * params.hbar * 0.5 * inv_m;
      for (std::size_t k = 0; k < n; ++k) {
        ds[k] = stencil_at<double>(first[a], s, grid, a, k);
        flux[k] = rho[k] * ds[k] * inv_m;
        const double d2 = stencil_at<double>(second[a], amp, grid, a, k);
        dsdt[k] -= 0.5 * inv_m * ds[k] * ds[k] + qc * d2 / amp[k];
      }
      for (std::size_t k = 0; k < n; ++k) drho[k] -= stencil_at<double>(first[a], flux, grid, a, k);
    }
  }
};

}  // namespace

MadelungTrajectory propagate_madelung(const MadelungState& state0, const PhysicalParams& params, double dt,
                                      std::size_t steps, std::size_t record_every, StencilOrder order) {
  params.validate();
  if (!(dt > 0.0)) throw InvalidArgument("propagate_madelung: dt must be positive");
  const GridSpec& g = state0.grid();
  const auto rho0 = state0.density.values();
  const auto [lo, hi] = std::minmax_element(rho0.begin(), rho0.end());
  if (*lo < 1e-8 * *hi) {
    const auto k = static_cast<std::size_t>(lo - rho0.begin());
    std::ostringstream msg;
    msg << "initial density is not nodeless: min/max = " << *lo / *hi << " at x=" << g.coordinate(0, k)
        << " (need >= 1e-8)";
    throw DensityFloorBreach(msg.str(), g.coordinate(0, k), 0.0);
  }

  MadelungRhs rhs(g, params, order);
  const std::size_t n = g.size();
  std::vector<double> rho(rho0.begin(), rho0.end()), s(state0.phase.values().begin(), state0.phase.values().end());
  std::vector<double> k1r(n), k1s(n), k2r(n), k2s(n), k3r(n), k3s(n), k4r(n), k4s(n), tr(n), ts(n);

  MadelungTrajectory out;
  auto record = [&](double time) {
    MadelungState frame(RealField(g, rho), RealField(g, s));
    out.norms.push_back(integrate(frame.density));
    out.frames.push_back(std::move(frame));
    out.times.push_back(time);
  };
  record(0.0);

  for (std::size_t step = 1; step <= steps; ++step) {
    const double t0 = static_cast<double>(step - 1) * dt;
    rhs(rho, s, k1r, k1s);
    for (std::size_t k = 0; k < n; ++k) {
      tr[k] = rho[k] + 0.5 * dt * k1r[k];
      ts[k] = s[k] + 0.5 * dt * k1s[k];
    }
    rhs.check_floor(tr, t0 + 0.5 * dt);
    rhs(tr, ts, k2r, k2s);
    for (std::size_t k = 0; k < n; ++k) {
      tr[k] = rho[k] + 0.5 * dt * k2r[k];
      ts[k] = s[k] + 0.5 * dt * k2s[k];
    }
    rhs.check_floor(tr, t0 + 0.5 * dt);
    rhs(tr, ts, k3r, k3s);
    for (std::size_t k = 0; k < n; ++k) {
      tr[k] = rho[k] + dt * k3r[k];
      ts[k] = s[k] + dt * k3s[k];
    }
    rhs.check_floor(tr, t0 + dt);
    rhs(tr, ts, k4r, k4s);
    for (std::size_t k = 0; k < n; ++k) {
      rho[k] += dt / 6.0 * (k1r[k] + 2.0 * k2r[k] + 2.0 * k3r[k] + k4r[k]);
      s[k] += dt / 6.0 * (k1s[k] + 2.0 * k2s[k] + 2.0 * k3s[k] + k4s[k]);
    }
    rhs.check_floor(rho, t0 + dt);
    if ((record_every && step % record_every == 0) || step == steps) record(static_cast<double>(step) * dt);
  }
  return out;
}

const char* branch_name(Branch b) { return b == Branch::trivial ? "trivial" : "nontrivial"; }

namespace {

Trajectory stationary_trajectory(const RealField& rho, double energy, double dt, std::size_t slices) {
  Trajectory traj;
  traj.dt = dt;
  for (std::size_t j = 0; j < slices; ++j) {
    const double time = static_cast<double>(j) * dt;
    traj.slices.emplace_back(rho, RealField(rho.grid(), -energy * time));
  }
  return traj;
}

Branch classify(double density_gradient_max, double rho_max, double length) {
  return density_gradient_max * length <= 1e-8 * rho_max ? Branch::trivial : Branch::nontrivial;
}

}  // namespace

VanishingMomentumReport vanishing_momentum_scenario(const PhysicalParams& params, const GridSpec& grid, std::size_t k,
                                                    const ScenarioOptions& options) {
  VanishingMomentumReport out;
  out.spectrum = eigensolve_1d(params, grid, k);
  const std::vector<ConstraintFunctional> constraints{ConstraintFunctional::local_momentum(0.0),
                                                      ConstraintFunctional::density_stationarity()};
  const std::vector<double> lambda{0.0, 0.0};
  const double length = grid.axis(0).length();
  const RealField v = sample_potential(params.potential, grid);

  for (std::size_t level = 0; level < k; ++level) {
    const RealField& psi = out.spectrum.states[level];
    const double energy = out.spectrum.energies[level];
    RealField rho(grid);
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = psi[i] * psi[i];
    const double rho_max = *std::max_element(rho.values().begin(), rho.values().end());

    EigenstateCheck c;
    c.level = level;
    c.energy = energy;
    c.multiplier = -constraints[0].target_momentum / params.mass(0);
    const Trajectory traj = stationary_trajectory(rho, energy, 0.01, 5);
    c.phase_gradient_max = masked_max_abs(derivative(traj.slices[2].phase, 0));
    c.density_gradient_max = masked_max_abs(derivative(rho, 0));
    c.branch = classify(c.density_gradient_max, rho_max, length);

    // The second-order Bohm potential matches the tridiagonal Hamiltonian
    // the states come from, so V + Q - E is exact away from nodes.
    const RealField q = bohm_potential(rho, params, StencilOrder::second).value;
    c.quantum_potential.assign(q.values().begin(), q.values().end());
    std::vector<char> mask(grid.size(), 1);
    const std::size_t n = grid.size();
    for (std::size_t i = 0; i < n; ++i)
      if (!(rho[i] > options.relative_density_cut * rho_max)) mask[i] = 0;
    for (std::size_t i = 1; i + 2 < n; ++i) {
      if (psi[i] * psi[i + 1] < 0.0 || psi[i] == 0.0) {
        const std::size_t a = i >= options.node_exclusion ? i - options.node_exclusion : 0;
        const std::size_t b = std::min(n - 1, i + 1 + options.node_exclusion);
        for (std::size_t j = a; j <= b; ++j) mask[j] = 0;
      }
    }
    RealField identity(grid);
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) {
        ++c.checked_nodes;
        identity[i] = v[i] + c.quantum_potential[i] - energy;
      } else {
        ++c.excluded_nodes;
      }
    }
    c.identity_residual_max = masked_max_abs(identity, mask);

    const auto res = stationarity_residuals(traj, params, constraints, lambda, 2, StencilOrder::second);
    c.hamilton_jacobi_residual = masked_max_abs(res.hamilton_jacobi, mask);
    c.continuity_residual = masked_max_abs(res.continuity, mask);
    c.constraint_values = res.constraint_values;

    ComplexField psi_c(grid);
    for (std::size_t i = 0; i < n; ++i) psi_c[i] = psi[i];
    const auto steps = static_cast<std::size_t>(std::llround(options.propagation_time / options.propagation_dt));
    const WaveTrajectory wt = propagate_wavefunction(psi_c, params, options.propagation_dt, steps, options.record_every);
    for (std::size_t f = 1; f < wt.frames.size(); ++f) {
      const double span = wt.times[f] - wt.times[f - 1];
      for (std::size_t i = 0; i < n; ++i) {
        const double rate = std::abs(std::norm(wt.frames[f][i]) - std::norm(wt.frames[f - 1][i])) / span;
        c.density_rate_max = std::max(c.density_rate_max, rate);
      }
    }
    out.states.push_back(std::move(c));
  }

  // Uniform density with constant potential on a periodic box.
  const Axis& ax = grid.axis(0);
  const GridSpec box = GridSpec::line({options.trivial_points, ax.x_min, ax.x_max, Boundary::periodic});
  PhysicalParams flat = params;
  flat.potential = PotentialSpec::free();
  const RealField uniform(box, 1.0 / box.axis(0).length());
  const Trajectory traj = stationary_trajectory(uniform, 0.0, 0.01, 5);
  const auto res = stationarity_residuals(traj, flat, constraints, lambda, 2);
  TrivialBranchCheck& t = out.trivial;
  t.density_gradient_max = masked_max_abs(derivative(uniform, 0));
  t.branch = classify(t.density_gradient_max, 1.0 / box.axis(0).length(), box.axis(0).length());
  t.hamilton_jacobi_residual = masked_max_abs(res.hamilton_jacobi);
  t.continuity_residual = masked_max_abs(res.continuity);
  t.constraint_values = res.constraint_values;
  const ComplexField psi = to_wavefunction(traj.slices[2], flat.hbar);
  const ComplexField dpsi = derivative(psi, 0);
  t.dirac_residual = flat.hbar * norm(dpsi) / norm(psi);
  return out;
}

namespace {

DiracCheck dirac_check(const RealField& amplitude, double energy, double time, const PhysicalParams& params,
                       double tolerance) {
  const GridSpec& g = amplitude.grid();
  const double hbar = params.hbar;
  ComplexField psi(g);
  RealField rho(g), mag(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    psi[i] = amplitude[i] * std::polar(1.0, -energy * time / hbar);
    rho[i] = std::norm(psi[i]);
    mag[i] = std::abs(amplitude[i]);
  }
  DiracCheck c;
  const ComplexField dpsi = derivative(psi, 0);
  c.momentum_ratio = hbar * norm(dpsi) / norm(psi);
  // In the frame with the phase stripped, p Psi = sqrt(rho) dS/dx - i hbar
  // d sqrt(rho)/dx; the phase here is spatially constant.
  const RealField phase(g, -energy * time);
  const RealField ds = derivative(phase, 0);
  RealField re(g);
  for (std::size_t i = 0; i < g.size(); ++i) re[i] = mag[i] * ds[i];
  c.momentum_real = norm(re);
  c.momentum_imag = hbar * norm(derivative(mag, 0));
  // p(ln Psi - ln Psi*) = 2 hbar Im(Psi'/Psi).
  RealField weighted(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (rho[i] < density_floor) continue;
    const double r = 2.0 * hbar * std::imag(dpsi[i] / psi[i]);
    weighted[i] = rho[i] * r * r;
  }
  c.nonlinear_residual = std::sqrt(integrate(weighted));
  c.linear_satisfied = c.momentum_ratio <= tolerance;
  c.nonlinear_satisfied = c.nonlinear_residual <= tolerance;
  return c;
}

}  // namespace

DiracComparison dirac_vs_simultaneous_report(const VanishingMomentumReport& report, const PhysicalParams& params,
                                             const GridSpec& grid, double time, double tolerance) {
  DiracComparison out;
  for (std::size_t level = 0; level < report.spectrum.states.size(); ++level) {
    DiracCheck c = dirac_check(report.spectrum.states[level], report.spectrum.energies[level], time, params, tolerance);
    c.level = level;
    out.eigenstates.push_back(c);
  }
  const Axis& ax = grid.axis(0);
  const GridSpec box = GridSpec::line({256, ax.x_min, ax.x_max, Boundary::periodic});
  const RealField uniform(box, 1.0 / std::sqrt(box.axis(0).length()));
  PhysicalParams flat = params;
  flat.potential = PotentialSpec::free();
  out.trivial = dirac_check(uniform, 0.0, time, flat, tolerance);
  return out;
}

}  // namespace varq

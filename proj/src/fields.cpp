#include "varq/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace varq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double wrap_periodic(double d, double length) {
  d = std::fmod(d + 0.5 * length, length);
  if (d < 0) d += length;
  return d - 0.5 * length;
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0) a += two_pi;
  return a - std::numbers::pi;
}

}  // namespace

void PotentialSpec::validate() const {
  std::visit(overloaded{
                 [](const potential::Free&) {},
                 [](const potential::Harmonic& h) {
                   if (!(h.k >= 0.0) || !std::isfinite(h.k) || !std::isfinite(h.center))
                     throw InvalidArgument("harmonic potential requires finite k >= 0");
                 },
                 [](const potential::InfiniteWell& w) {
                   if (!(w.width > 0.0) || !std::isfinite(w.width))
                     throw InvalidArgument("infinite well requires width > 0");
                 },
                 [](const potential::Sampled& s) {
                   for (double v : s.values.values())
                     if (!std::isfinite(v)) throw InvalidArgument("sampled potential has non-finite values");
                 },
                 [](const potential::PairwiseRelative& p) {
                   if (!p.inner) throw InvalidArgument("pairwise potential has no inner potential");
                   if (std::holds_alternative<potential::PairwiseRelative>(p.inner->kind) ||
                       std::holds_alternative<potential::Sampled>(p.inner->kind) ||
                       std::holds_alternative<potential::InfiniteWell>(p.inner->kind))
                     throw InvalidArgument("pairwise potential must wrap a free or harmonic potential");
                   p.inner->validate();
                 },
             },
             kind);
}

double potential_at(const PotentialSpec& spec, double x) {
  if (const auto* h = std::get_if<potential::Harmonic>(&spec.kind)) {
    const double d = x - h->center;
    return 0.5 * h->k * d * d;
  }
  if (std::holds_alternative<potential::Free>(spec.kind) || std::holds_alternative<potential::InfiniteWell>(spec.kind))
    return 0.0;
  throw InvalidArgument("potential_at: potential has no pointwise closed form");
}

RealField sample_potential(const PotentialSpec& spec, const GridSpec& grid) {
  spec.validate();
  RealField out(grid);
  std::visit(
      overloaded{
          [&](const potential::Free&) {},
          [&](const potential::Harmonic& h) {
            for (int a = 0; a < grid.dimension(); ++a) {
              const Axis& ax = grid.axis(a);
              for (std::size_t k = 0; k < grid.size(); ++k) {
                double d = grid.coordinate(a, k) - h.center;
                if (ax.boundary == Boundary::periodic) d = wrap_periodic(d, ax.length());
                out[k] += 0.5 * h.k * d * d;
              }
            }
          },
          [&](const potential::InfiniteWell& w) {
            for (int a = 0; a < grid.dimension(); ++a) {
              const Axis& ax = grid.axis(a);
              if (ax.boundary != Boundary::dirichlet || std::abs(ax.length() - w.width) > 1e-12 * w.width) {
                std::ostringstream msg;
                msg << "infinite well of width " << w.width << " needs a Dirichlet axis of that length (axis " << a
                    << " has length " << ax.length() << ")";
                throw InvalidArgument(msg.str());
              }
            }
          },
          [&](const potential::Sampled& s) {
            if (!(s.values.grid() == grid)) throw GridMismatch("sampled potential lives on a different grid");
            out = s.values;
          },
          [&](const potential::PairwiseRelative& p) {
            if (grid.dimension() != 2) throw InvalidArgument("pairwise potential needs a 2D grid");
            const Axis& a0 = grid.axis(0);
            const Axis& a1 = grid.axis(1);
            const bool wrap = a0.boundary == Boundary::periodic && a1.boundary == Boundary::periodic &&
                              std::abs(a0.length() - a1.length()) <= 1e-12 * a0.length();
            for (std::size_t k = 0; k < grid.size(); ++k) {
              double r = grid.coordinate(0, k) - grid.coordinate(1, k);
              if (wrap) r = wrap_periodic(r, a0.length());
              out[k] = potential_at(*p.inner, r);
            }
          },
      },
      spec.kind);
  return out;
}

void PhysicalParams::validate() const {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidArgument("hbar must be positive");
  for (double m : masses)
    if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("masses must be positive");
  potential.validate();
}

MadelungState::MadelungState(RealField rho, RealField s) : density(std::move(rho)), phase(std::move(s)) {
  require_same_grid(density, phase, "MadelungState");
}

ComplexField to_wavefunction(const MadelungState& state, double hbar) {
  if (!(hbar > 0.0)) throw InvalidArgument("to_wavefunction: hbar must be positive");
  ComplexField psi(state.grid());
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const double rho = state.density[k];
    if (rho < 0.0 || !std::isfinite(rho))
      throw InvalidArgument("to_wavefunction: negative density at node " + std::to_string(k));
    psi[k] = std::polar(std::sqrt(rho), state.phase[k] / hbar);
  }
  return psi;
}

namespace {

// Walks `line` (flat indices, line[0] already assigned) and accumulates the
// wrapped angle increments between valid nodes.
void unwrap_line(const std::vector<std::size_t>& line, const ComplexField& psi, const std::vector<char>& valid,
                 std::vector<double>& angle, std::vector<char>& assigned, std::vector<std::size_t>& low) {
  double last = angle[line[0]];
  for (std::size_t s = 1; s < line.size(); ++s) {
    const std::size_t k = line[s];
    if (assigned[k]) {
      last = angle[k];
      continue;
    }
    if (!valid[k]) {
      angle[k] = last;
      low.push_back(k);
    } else {
      const double d = wrap_angle(std::arg(psi[k]) - last);
      if (std::abs(d) >= 0.5 * std::numbers::pi) {
        const auto& g = psi.grid();
        throw PhaseUnwrapFailure("phase jumps by " + std::to_string(d) + " rad next to x=" +
                                     std::to_string(g.coordinate(0, k)) + "; the density likely has a node there",
                                 g.coordinate(0, k));
      }
      angle[k] = last + d;
      last = angle[k];
    }
    assigned[k] = 1;
  }
}

void unwrap_from(std::size_t anchor, int axis, const ComplexField& psi, const std::vector<char>& valid,
                 std::vector<double>& angle, std::vector<char>& assigned, std::vector<std::size_t>& low) {
  const GridSpec& g = psi.grid();
  const std::size_t n = g.axis(axis).n_points;
  const std::size_t stride = g.stride(axis);
  const std::size_t i0 = g.index(anchor)[axis];
  const std::size_t base = anchor - i0 * stride;
  std::vector<std::size_t> up, down;
  for (std::size_t i = i0; i < n; ++i) up.push_back(base + i * stride);
  for (std::size_t i = i0 + 1; i-- > 0;) down.push_back(base + i * stride);
  unwrap_line(up, psi, valid, angle, assigned, low);
  unwrap_line(down, psi, valid, angle, assigned, low);
}

}  // namespace

PhaseRecovery from_wavefunction(const ComplexField& psi, double hbar) {
  if (!(hbar > 0.0)) throw InvalidArgument("from_wavefunction: hbar must be positive");
  const GridSpec& g = psi.grid();
  RealField rho(g);
  for (std::size_t k = 0; k < psi.size(); ++k) rho[k] = std::norm(psi[k]);
  const double mass = integrate(rho);
  if (std::abs(mass - 1.0) > 1e-6)
    throw InvalidArgument("from_wavefunction: wavefunction norm^2 is " + std::to_string(mass) + ", expected 1");

  std::vector<char> valid(g.size());
  std::size_t anchor = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    valid[k] = rho[k] >= density_floor;
    if (rho[k] > rho[anchor]) anchor = k;
  }

  std::vector<double> angle(g.size(), 0.0);
  std::vector<char> assigned(g.size(), 0);
  std::vector<std::size_t> low;
  angle[anchor] = 0.0;
  assigned[anchor] = 1;
  // The anchor's own raw angle becomes the global phase that is dropped.
  const double offset = std::arg(psi[anchor]);
  ComplexField shifted(g);
  for (std::size_t k = 0; k < g.size(); ++k) shifted[k] = psi[k] * std::polar(1.0, -offset);

  if (g.dimension() == 1) {
    unwrap_from(anchor, 0, shifted, valid, angle, assigned, low);
  } else {
    unwrap_from(anchor, 1, shifted, valid, angle, assigned, low);
    const auto [ia, ja] = g.index(anchor);
    (void)ja;
    for (std::size_t j = 0; j < g.axis(1).n_points; ++j) unwrap_from(g.flat(ia, j), 0, shifted, valid, angle, assigned, low);
  }

  RealField phase(g);
  for (std::size_t k = 0; k < g.size(); ++k) phase[k] = hbar * angle[k];
  std::sort(low.begin(), low.end());
  return PhaseRecovery{MadelungState(std::move(rho), std::move(phase)), std::move(low)};
}

MadelungState normalize(const MadelungState& state) {
  const double mass = integrate(state.density);
  if (!(mass > 0.0)) throw InvalidArgument("normalize: density has zero total mass");
  RealField rho = state.density;
  for (double& v : rho.values()) v /= mass;
  return MadelungState(std::move(rho), state.phase);
}

ComplexField normalize(const ComplexField& psi) {
  const double nrm = norm(psi);
  if (!(nrm > 0.0)) throw InvalidArgument("normalize: wavefunction has zero norm");
  ComplexField out = psi;
  for (auto& v : out.values()) v /= nrm;
  return out;
}

}  // namespace varq

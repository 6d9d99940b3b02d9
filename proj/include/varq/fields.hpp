#pragma once

// Density/phase pairs, wavefunctions, and the external potentials they feel.

#include <array>
#include <memory>
#include <variant>
#include <vector>

#include "varq/grid.hpp"

namespace varq {

/// Densities below this are treated as zero in divisions and logarithms.
inline constexpr double density_floor = 1e-12;

struct PotentialSpec;

namespace potential {

struct Free {};

/// V = k/2 |x - center|^2, summed over axes. On a periodic axis the
/// displacement is taken as the minimum image, so V is continuous across
/// the seam.
struct Harmonic {
  double k = 1.0;
  double center = 0.0;
};

/// V = 0 inside; the walls are the Dirichlet boundary of an axis whose
/// length must equal `width`.
struct InfiniteWell {
  double width = 1.0;
};

struct Sampled {
  RealField values;
};

/// V(x_a - x_b) on a plane. If both axes are periodic with the same length
/// the separation is wrapped to [-L/2, L/2).
struct PairwiseRelative {
  std::shared_ptr<const PotentialSpec> inner;
};

}  // namespace potential

struct PotentialSpec {
  using Kind = std::variant<potential::Free, potential::Harmonic, potential::InfiniteWell, potential::Sampled,
                            potential::PairwiseRelative>;
  Kind kind = potential::Free{};

  static PotentialSpec free() { return {potential::Free{}}; }
  static PotentialSpec harmonic(double k, double center = 0.0) { return {potential::Harmonic{k, center}}; }
  static PotentialSpec infinite_well(double width) { return {potential::InfiniteWell{width}}; }
  static PotentialSpec sampled(RealField values) { return {potential::Sampled{std::move(values)}}; }
  static PotentialSpec pairwise(PotentialSpec inner) {
    return {potential::PairwiseRelative{std::make_shared<const PotentialSpec>(std::move(inner))}};
  }

  void validate() const;
};

/// Evaluates the potential on every node of `grid`.
RealField sample_potential(const PotentialSpec& spec, const GridSpec& grid);

/// Evaluates a 1D potential spec at scalar positions (no grid checks).
double potential_at(const PotentialSpec& spec, double x);

struct PhysicalParams {
  double hbar = 1.0;
  std::array<double, 2> masses{1.0, 1.0};  // masses[1] used on planes only
  PotentialSpec potential{};

  double mass(int axis) const { return masses.at(static_cast<std::size_t>(axis)); }
  void validate() const;
};

struct MadelungState {
  RealField density;
  RealField phase;

  MadelungState(RealField density, RealField phase);
  const GridSpec& grid() const noexcept { return density.grid(); }
};

/// Psi = sqrt(rho) exp(i S / hbar).
ComplexField to_wavefunction(const MadelungState& state, double hbar);

struct PhaseRecovery {
  MadelungState state;
  /// Nodes whose density fell below the floor; their phase was copied from
  /// the nearest valid neighbour along the unwrap direction.
  std::vector<std::size_t> low_density;
};

/// Inverse of to_wavefunction. The phase is unwrapped along each axis and
/// anchored to zero at the density maximum. Throws PhaseUnwrapFailure when
/// two neighbouring valid nodes differ by a quarter turn or more, which is
/// what a sign change through a node of the density looks like.
PhaseRecovery from_wavefunction(const ComplexField& psi, double hbar);

MadelungState normalize(const MadelungState& state);

ComplexField normalize(const ComplexField& psi);

}  // namespace varq

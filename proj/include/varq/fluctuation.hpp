#pragma once

// Displacement distributions over a short time step: the closed-form
// optimum, a numeric optimizer for the same objective, and sampling.

#include <array>
#include <cstdint>
#include <vector>

#include "varq/grid.hpp"

namespace varq {

/// Discrete probability mass over displacements w (1D) or (w_a, w_b) (2D).
struct TransitionDistribution {
  GridSpec grid;  // Dirichlet axes spanning [-window, window]
  std::vector<double> mass;
  double dt = 0.0;
  double hbar = 1.0;
  std::array<double, 2> masses{1.0, 1.0};

  int dimension() const { return grid.dimension(); }
  double mean(int axis) const;
  double variance(int axis) const;
  double covariance() const;  // 2D only
};

struct TransitionSetup {
  double hbar = 1.0;
  std::array<double, 2> masses{1.0, 1.0};
  int dimension = 1;
  double dt = 0.1;
  /// Half-width per axis; 0 selects default_window for that axis.
  std::array<double, 2> window{0.0, 0.0};
  /// Odd node counts keep w = 0 on the grid.
  std::size_t points_1d = 2001;
  std::size_t points_2d = 801;

  void validate() const;
  GridSpec grid() const;
};

/// sqrt(hbar dt / 2 m), the width of the optimal distribution.
double fluctuation_sigma(double hbar, double dt, double mass);
/// Eight standard deviations.
double default_window(double hbar, double dt, double mass);

/// p(w) proportional to exp(-sum_a m_a w_a^2 / (hbar dt)), normalized on the
/// window. Throws if a window is narrower than six standard deviations.
TransitionDistribution optimal_transition(const TransitionSetup& setup);

/// sum_i p_i (sum_a m_a w_a^2 / 2 dt + hbar/2 ln(p_i / prior_i)) with a
/// uniform prior over the window nodes.
double transition_objective(const TransitionDistribution& dist);

struct NumericTransition {
  TransitionDistribution distribution;
  std::size_t iterations = 0;
  double objective = 0.0;
};

struct OptimizerOptions {
  double step = 0.5;        // mirror-descent step in (0, 1]
  double tolerance = 1e-12;  // stop once the objective moves less than this
  std::size_t max_iterations = 100000;
};

/// Entropic mirror descent on the probability simplex starting from `init`
/// (strictly positive, normalized, one entry per window node).
NumericTransition optimize_transition_numeric(const TransitionSetup& setup, const std::vector<double>& init,
                                              const OptimizerOptions& options = {});

/// sum p ln(p / q) over nodes with p > 0.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

struct FluctuationStats {
  std::uint64_t samples = 0;
  std::array<double, 2> mean{0.0, 0.0};
  std::array<double, 2> variance{0.0, 0.0};
  std::array<double, 2> second_moment{0.0, 0.0};
  double covariance = 0.0;
  /// m var(w) / dt per axis, the displacement-momentum product.
  std::array<double, 2> uncertainty_product{0.0, 0.0};
  /// sqrt(<w^2>) sqrt(<p^2>) with p = m w / dt per axis.
  std::array<double, 2> rms_product{0.0, 0.0};
  /// Monte Carlo standard errors of the variance and the covariance.
  std::array<double, 2> variance_sigma{0.0, 0.0};
  double covariance_sigma = 0.0;
  /// Sample counts per window node along axis 0 (marginal in 2D).
  std::vector<std::uint64_t> counts;
};

/// Inverse-CDF sampling. Samples are drawn in fixed chunks, each from its
/// own counter-based stream, so results do not depend on `threads`.
FluctuationStats sample_fluctuations(const TransitionDistribution& dist, std::uint64_t n, std::uint64_t seed,
                                     unsigned threads = 0);

}  // namespace varq

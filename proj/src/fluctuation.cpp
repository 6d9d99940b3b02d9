#include "varq/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

namespace varq {

double TransitionDistribution::mean(int axis) const {
  grid.check_axis(axis);
  double m = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) m += mass[k] * grid.coordinate(axis, k);
  return m;
}

double TransitionDistribution::variance(int axis) const {
  const double mu = mean(axis);
  double v = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    const double d = grid.coordinate(axis, k) - mu;
    v += mass[k] * d * d;
  }
  return v;
}

double TransitionDistribution::covariance() const {
  if (dimension() != 2) throw InvalidArgument("covariance needs a 2D distribution");
  const double ma = mean(0), mb = mean(1);
  double c = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k)
    c += mass[k] * (grid.coordinate(0, k) - ma) * (grid.coordinate(1, k) - mb);
  return c;
}

double fluctuation_sigma(double hbar, double dt, double mass) { return std::sqrt(hbar * dt / (2.0 * mass)); }

double default_window(double hbar, double dt, double mass) { return 8.0 * fluctuation_sigma(hbar, dt, mass); }

void TransitionSetup::validate() const {
  if (!(hbar > 0.0)) throw InvalidArgument("transition: hbar must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("transition: dt must be positive");
  if (dimension != 1 && dimension != 2) throw InvalidArgument("transition: dimension must be 1 or 2");
  const std::size_t n = dimension == 1 ? points_1d : points_2d;
  if (n < 9 || n % 2 == 0) throw InvalidArgument("transition: node count must be odd and at least 9");
  for (int a = 0; a < dimension; ++a) {
    const double m = masses[static_cast<std::size_t>(a)];
    if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("transition: masses must be positive");
    const double w = window[static_cast<std::size_t>(a)];
    if (w < 0.0 || !std::isfinite(w)) throw InvalidArgument("transition: window must be non-negative");
    const double sigma = fluctuation_sigma(hbar, dt, m);
    // Six standard deviations leave about 2e-9 of the mass outside.
    if (w > 0.0 && w < 6.0 * sigma) {
      std::ostringstream msg;
      msg << "transition: window " << w << " on axis " << a << " is below 6 standard deviations (" << 6.0 * sigma
          << ") and cannot hold 1-1e-8 of the mass";
      throw InvalidArgument(msg.str());
    }
  }
}

GridSpec TransitionSetup::grid() const {
  validate();
  auto axis = [&](int a) {
    const auto i = static_cast<std::size_t>(a);
    const double w = window[i] > 0.0 ? window[i] : default_window(hbar, dt, masses[i]);
    return Axis{dimension == 1 ? points_1d : points_2d, -w, w, Boundary::dirichlet};
  };
  return dimension == 1 ? GridSpec::line(axis(0)) : GridSpec::plane(axis(0), axis(1));
}

namespace {

// Per-node cost sum_a m_a w_a^2 / (2 dt).
std::vector<double> node_cost(const GridSpec& g, const std::array<double, 2>& masses, double dt) {
  std::vector<double> c(g.size(), 0.0);
  for (int a = 0; a < g.dimension(); ++a)
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double w = g.coordinate(a, k);
      c[k] += masses[static_cast<std::size_t>(a)] * w * w / (2.0 * dt);
    }
  return c;
}

void normalize_log(std::vector<double>& l, std::vector<double>& p) {
  const double top = *std::max_element(l.begin(), l.end());
  double z = 0.0;
  for (double v : l) z += std::exp(v - top);
  const double log_z = top + std::log(z);
  for (std::size_t k = 0; k < l.size(); ++k) {
    l[k] -= log_z;
    p[k] = std::exp(l[k]);
  }
}

}  // namespace

TransitionDistribution optimal_transition(const TransitionSetup& setup) {
  const GridSpec g = setup.grid();
  const auto cost = node_cost(g, setup.masses, setup.dt);
  std::vector<double> l(g.size()), p(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) l[k] = -2.0 * cost[k] / setup.hbar;
  normalize_log(l, p);
  return TransitionDistribution{g, std::move(p), setup.dt, setup.hbar, setup.masses};
}

double transition_objective(const TransitionDistribution& dist) {
  const auto cost = node_cost(dist.grid, dist.masses, dist.dt);
  const double prior = 1.0 / static_cast<double>(dist.mass.size());
  double j = 0.0;
  for (std::size_t k = 0; k < dist.mass.size(); ++k) {
    const double p = dist.mass[k];
    j += p * cost[k];
    if (p > 0.0) j += 0.5 * dist.hbar * p * std::log(p / prior);
  }
  return j;
}

NumericTransition optimize_transition_numeric(const TransitionSetup& setup, const std::vector<double>& init,
                                              const OptimizerOptions& options) {
  const GridSpec g = setup.grid();
  if (init.size() != g.size()) throw GridMismatch("optimize_transition_numeric: init has wrong node count");
  if (!(options.step > 0.0 && options.step <= 1.0)) throw InvalidArgument("optimizer step must lie in (0, 1]");
  double total = 0.0;
  for (std::size_t k = 0; k < init.size(); ++k) {
    if (!(init[k] > 0.0) || !std::isfinite(init[k]))
      throw InvalidArgument("optimize_transition_numeric: init must be strictly positive (node " + std::to_string(k) +
                            ")");
    total += init[k];
  }
  if (std::abs(total - 1.0) > 1e-8) throw InvalidArgument("optimize_transition_numeric: init must be normalized");

  const auto cost = node_cost(g, setup.masses, setup.dt);
  // Mirror descent in log space: the gradient of the objective in l = ln p
  // coordinates is cost + hbar/2 (l - ln prior) + const, so one step is a
  // convex blend of l and the fixed point -2 cost / hbar.
  std::vector<double> l(g.size()), p(init);
  for (std::size_t k = 0; k < g.size(); ++k) l[k] = std::log(init[k] / total);
  normalize_log(l, p);
  NumericTransition out{TransitionDistribution{g, p, setup.dt, setup.hbar, setup.masses}, 0, 0.0};
  double j_prev = transition_objective(out.distribution);
  const double eta = options.step;
  while (out.iterations < options.max_iterations) {
    for (std::size_t k = 0; k < g.size(); ++k) l[k] = (1.0 - eta) * l[k] - eta * 2.0 * cost[k] / setup.hbar;
    normalize_log(l, out.distribution.mass);
    ++out.iterations;
    const double j = transition_objective(out.distribution);
    const bool done = std::abs(j - j_prev) < options.tolerance;
    j_prev = j;
    if (done) break;
  }
  if (out.iterations >= options.max_iterations)
    throw NumericalFailure("optimize_transition_numeric: no convergence within " +
                           std::to_string(options.max_iterations) + " iterations");
  out.objective = j_prev;
  return out;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw InvalidArgument("kl_divergence: size mismatch");
  double d = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    if (q[k] <= 0.0) return INFINITY;
    d += p[k] * std::log(p[k] / q[k]);
  }
  return d;
}

namespace {

constexpr std::uint64_t chunk_size = 65536;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  std::uint64_t next() { return mix64(state_ += 0x9E3779B97F4A7C15ULL); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1p-53; }

 private:
  std::uint64_t state_;
};

struct Moments {
  double n = 0.0;
  std::array<double, 2> mean{0.0, 0.0};
  std::array<double, 2> m2{0.0, 0.0};
  std::array<double, 2> raw2{0.0, 0.0};
  double co = 0.0;

  void push(double a, double b) {
    n += 1.0;
    const double da = a - mean[0];
    const double db = b - mean[1];
    mean[0] += da / n;
    mean[1] += db / n;
    m2[0] += da * (a - mean[0]);
    m2[1] += db * (b - mean[1]);
    co += da * (b - mean[1]);
    raw2[0] += a * a;
    raw2[1] += b * b;
  }

  // Chan et al. pairwise combination.
  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    const double n_ab = n + o.n;
    const double da = o.mean[0] - mean[0];
    const double db = o.mean[1] - mean[1];
    const double f = n * o.n / n_ab;
    m2[0] += o.m2[0] + da * da * f;
    m2[1] += o.m2[1] + db * db * f;
    co += o.co + da * db * f;
    mean[0] += da * o.n / n_ab;
    mean[1] += db * o.n / n_ab;
    raw2[0] += o.raw2[0];
    raw2[1] += o.raw2[1];
    n = n_ab;
  }
};

}  // namespace

FluctuationStats sample_fluctuations(const TransitionDistribution& dist, std::uint64_t n, std::uint64_t seed,
                                     unsigned threads) {
  if (n < 1000) throw InvalidArgument("sample_fluctuations: need at least 1000 samples");
  if (dist.mass.size() != dist.grid.size()) throw GridMismatch("sample_fluctuations: mass/grid size mismatch");
  std::vector<double> cdf(dist.mass.size());
  std::partial_sum(dist.mass.begin(), dist.mass.end(), cdf.begin());
  const double total = cdf.back();
  const bool two_d = dist.dimension() == 2;

  const std::uint64_t chunks = (n + chunk_size - 1) / chunk_size;
  std::vector<Moments> partial(chunks);
  const std::size_t bins = dist.grid.axis(0).n_points;
  std::vector<std::vector<std::uint64_t>> partial_counts(chunks);
  auto run_chunk = [&](std::uint64_t c) {
    SplitMix64 rng(mix64(seed ^ mix64(c + 0x632BE59BD9B4E019ULL)));
    const std::uint64_t count = std::min(chunk_size, n - c * chunk_size);
    Moments m;
    std::vector<std::uint64_t> counts(bins, 0);
    for (std::uint64_t s = 0; s < count; ++s) {
      const double u = rng.uniform() * total;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      if (it == cdf.end()) --it;
      const auto k = static_cast<std::size_t>(it - cdf.begin());
      m.push(dist.grid.coordinate(0, k), two_d ? dist.grid.coordinate(1, k) : 0.0);
      ++counts[dist.grid.index(k)[0]];
    }
    partial[c] = m;
    partial_counts[c] = std::move(counts);
  };

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t)
      pool.emplace_back([&, t] {
        for (std::uint64_t c = t; c < chunks; c += workers) run_chunk(c);
      });
    for (auto& th : pool) th.join();
  }

  Moments all;
  for (const auto& m : partial) all.merge(m);

  FluctuationStats out;
  out.samples = n;
  out.counts.assign(bins, 0);
  for (const auto& counts : partial_counts)
    for (std::size_t b = 0; b < bins; ++b) out.counts[b] += counts[b];
  const double nn = all.n;
  for (std::size_t a = 0; a < 2; ++a) {
    if (a == 1 && !two_d) break;
    out.mean[a] = all.mean[a];
    out.variance[a] = all.m2[a] / (nn - 1.0);
    out.second_moment[a] = all.raw2[a] / nn;
    const double m = dist.masses[a];
    out.uncertainty_product[a] = m * out.variance[a] / dist.dt;
    out.rms_product[a] = std::sqrt(out.second_moment[a]) * m * std::sqrt(out.second_moment[a]) / dist.dt;
    out.variance_sigma[a] = out.variance[a] * std::sqrt(2.0 / (nn - 1.0));
  }
  if (two_d) {
    out.covariance = all.co / (nn - 1.0);
    out.covariance_sigma = std::sqrt(out.variance[0] * out.variance[1] / nn);
  }
  return out;
}

}  // namespace varq

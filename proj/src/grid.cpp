#include "varq/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace varq {

double Axis::spacing() const noexcept {
  if (n_points < 2) return 0.0;
  const double cells = boundary == Boundary::periodic ? static_cast<double>(n_points)
                                                      : static_cast<double>(n_points - 1);
  return length() / cells;
}

double Axis::weight(std::size_t i) const noexcept {
  const double h = spacing();
  if (boundary == Boundary::dirichlet && (i == 0 || i + 1 == n_points)) return 0.5 * h;
  return h;
}

void Axis::validate() const {
  if (n_points < 8) throw InvalidArgument("grid axis needs at least 8 points, got " + std::to_string(n_points));
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min))
    throw InvalidArgument("grid axis requires finite x_max > x_min");
}

GridSpec::GridSpec(int dimension, Axis first, Axis second) : dimension_(dimension), axes_{first, second} {}

GridSpec GridSpec::line(Axis axis) {
  axis.validate();
  // The unused second axis is a single node so flat indexing stays uniform.
  return GridSpec(1, axis, Axis{1, 0.0, 1.0, Boundary::dirichlet});
}

GridSpec GridSpec::plane(Axis first, Axis second) {
  first.validate();
  second.validate();
  return GridSpec(2, first, second);
}

const Axis& GridSpec::axis(int a) const {
  check_axis(a);
  return axes_[static_cast<std::size_t>(a)];
}

void GridSpec::check_axis(int a) const {
  if (a < 0 || a >= dimension_)
    throw InvalidArgument("axis " + std::to_string(a) + " is invalid for a " + std::to_string(dimension_) + "D grid");
}

double GridSpec::weight(std::size_t k) const noexcept {
  const auto [i, j] = index(k);
  double w = axes_[0].weight(i);
  if (dimension_ == 2) w *= axes_[1].weight(j);
  return w;
}

std::vector<double> GridSpec::coordinates(int a) const {
  const Axis& ax = axis(a);
  std::vector<double> xs(ax.n_points);
  for (std::size_t i = 0; i < ax.n_points; ++i) xs[i] = ax.coordinate(i);
  return xs;
}

std::vector<double> fornberg_weights(double z, std::span<const double> x, int m) {
  const std::size_t n = x.size();
  if (n == 0 || m < 0 || static_cast<std::size_t>(m) >= n)
    throw InvalidArgument("fornberg_weights: need more nodes than the derivative order");
  const auto mm = static_cast<std::size_t>(m);
  std::vector<std::vector<double>> c(mm + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, mm);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k)
          c[k][i] = c1 * (static_cast<double>(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k)
        c[k][j] = (c4 * c[k][j] - static_cast<double>(k) * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c[mm];
}

namespace {

std::vector<double> scaled_weights(std::ptrdiff_t first, std::size_t count, int derivative, double h) {
  std::vector<double> nodes(count);
  for (std::size_t j = 0; j < count; ++j) nodes[j] = static_cast<double>(first + static_cast<std::ptrdiff_t>(j));
  auto w = fornberg_weights(0.0, nodes, derivative);
  const double scale = std::pow(h, derivative);
  for (double& v : w) v /= scale;
  return w;
}

}  // namespace

Stencil::Stencil(const Axis& axis, int derivative, StencilOrder order)
    : n_(axis.n_points), periodic_(axis.boundary == Boundary::periodic) {
  if (derivative != 1 && derivative != 2) throw InvalidArgument("Stencil: derivative must be 1 or 2");
  const int p = static_cast<int>(order);
  if (p != 2 && p != 4) throw InvalidArgument("Stencil: order must be 2 or 4");
  const double h = axis.spacing();
  half_ = static_cast<std::size_t>(p / 2);
  central_ = scaled_weights(-static_cast<std::ptrdiff_t>(half_), 2 * half_ + 1, derivative, h);
  reach_ = half_;
  if (periodic_) return;

  // One-sided windows keep the interior accuracy: p+1 nodes for d/dx,
  // p+2 nodes for d2/dx2.
  const std::size_t window = static_cast<std::size_t>(p + derivative);
  if (window > n_) throw InvalidArgument("Stencil: grid too small for the requested order");
  for (std::size_t i = 0; i < half_; ++i) {
    left_.push_back(scaled_weights(-static_cast<std::ptrdiff_t>(i), window, derivative, h));
    right_.push_back(
        scaled_weights(-static_cast<std::ptrdiff_t>(window) + 1 + static_cast<std::ptrdiff_t>(half_ - 1 - i),
                       window, derivative, h));
  }
  reach_ = window - 1;
}

Stencil::Row Stencil::row(std::size_t i) const noexcept {
  if (!periodic_) {
    if (i < half_) return {-static_cast<std::ptrdiff_t>(i), left_[i]};
    if (i + half_ >= n_) {
      const std::size_t r = i - (n_ - half_);
      const auto& w = right_[r];
      // right_[r] belongs to node n-half+r; its last weight sits on node n-1.
      const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(n_ - 1) - static_cast<std::ptrdiff_t>(i);
      return {last - static_cast<std::ptrdiff_t>(w.size()) + 1, w};
    }
  }
  return {-static_cast<std::ptrdiff_t>(half_), central_};
}

namespace {

template <class T>
Field<T> apply_along(const Field<T>& f, int axis, int derivative, StencilOrder order) {
  const GridSpec& grid = f.grid();
  grid.check_axis(axis);
  const Stencil stencil(grid.axis(axis), derivative, order);
  Field<T> out(grid);
  const auto in = f.values();
  for (std::size_t k = 0; k < grid.size(); ++k) out[k] = stencil_at<T>(stencil, in, grid, axis, k);
  return out;
}

template <class T>
Field<T> laplacian_all(const Field<T>& f, StencilOrder order) {
  Field<T> out = apply_along(f, 0, 2, order);
  for (int a = 1; a < f.grid().dimension(); ++a) {
    const Field<T> part = apply_along(f, a, 2, order);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += part[k];
  }
  return out;
}

}  // namespace

RealField derivative(const RealField& f, int axis, StencilOrder order) { return apply_along(f, axis, 1, order); }
ComplexField derivative(const ComplexField& f, int axis, StencilOrder order) { return apply_along(f, axis, 1, order); }
RealField second_derivative(const RealField& f, int axis, StencilOrder order) { return apply_along(f, axis, 2, order); }
ComplexField second_derivative(const ComplexField& f, int axis, StencilOrder order) {
  return apply_along(f, axis, 2, order);
}
RealField laplacian(const RealField& f, StencilOrder order) { return laplacian_all(f, order); }
ComplexField laplacian(const ComplexField& f, StencilOrder order) { return laplacian_all(f, order); }

std::vector<std::size_t> stencil_neighborhood(const GridSpec& grid, std::size_t k, std::size_t reach) {
  std::vector<std::size_t> out{k};
  const auto idx = grid.index(k);
  for (int a = 0; a < grid.dimension(); ++a) {
    const Axis& ax = grid.axis(a);
    const auto n = static_cast<std::ptrdiff_t>(ax.n_points);
    const auto r = static_cast<std::ptrdiff_t>(std::min<std::size_t>(reach, ax.n_points / 2));
    const auto i = static_cast<std::ptrdiff_t>(idx[a]);
    const std::size_t base = k - idx[a] * grid.stride(a);
    for (std::ptrdiff_t d = -r; d <= r; ++d) {
      if (d == 0) continue;
      std::ptrdiff_t j = i + d;
      if (ax.boundary == Boundary::periodic) {
        j = ((j % n) + n) % n;
      } else if (j < 0 || j >= n) {
        continue;
      }
      out.push_back(base + static_cast<std::size_t>(j) * grid.stride(a));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double integrate(const RealField& f) {
  const GridSpec& grid = f.grid();
  double sum = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!std::isfinite(f[k])) throw NumericalFailure("integrate: non-finite value at node " + std::to_string(k));
    sum += grid.weight(k) * f[k];
  }
  return sum;
}

double inner(const RealField& a, const RealField& b) {
  require_same_grid(a, b, "inner");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a.grid().weight(k) * a[k] * b[k];
  return sum;
}

std::complex<double> inner(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b, "inner");
  std::complex<double> sum{};
  for (std::size_t k = 0; k < a.size(); ++k) sum += a.grid().weight(k) * std::conj(a[k]) * b[k];
  return sum;
}

double norm(const RealField& f) { return std::sqrt(inner(f, f)); }
double norm(const ComplexField& f) { return std::sqrt(std::real(inner(f, f))); }

}  // namespace varq

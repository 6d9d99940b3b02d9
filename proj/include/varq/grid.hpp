#pragma once

// Uniform 1D/2D grids, fields living on them, and finite-difference calculus.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "varq/error.hpp"

namespace varq {

enum class Boundary { dirichlet, periodic };

/// Accuracy order of the finite-difference stencils.
enum class StencilOrder : int { second = 2, fourth = 4 };

/// One axis of a tensor-product grid.
///
/// Dirichlet axes place nodes on both end points (spacing L/(n-1)); periodic
/// axes omit x_max, which is identified with x_min (spacing L/n).
struct Axis {
  std::size_t n_points = 0;
  double x_min = 0.0;
  double x_max = 1.0;
  Boundary boundary = Boundary::dirichlet;

  double length() const noexcept { return x_max - x_min; }
  double spacing() const noexcept;
  double coordinate(std::size_t i) const noexcept { return x_min + spacing() * static_cast<double>(i); }
  /// Trapezoid weights on Dirichlet axes, rectangle rule on periodic ones.
  double weight(std::size_t i) const noexcept;
  void validate() const;

  friend bool operator==(const Axis&, const Axis&) = default;
};

class GridSpec {
 public:
  static GridSpec line(Axis axis);
  static GridSpec plane(Axis first, Axis second);

  int dimension() const noexcept { return dimension_; }
  const Axis& axis(int a) const;
  std::size_t size() const noexcept { return axes_[0].n_points * axes_[1].n_points; }

  /// Row-major flattening, axis 0 is the slow index.
  std::size_t flat(std::size_t i, std::size_t j = 0) const noexcept { return i * axes_[1].n_points + j; }
  std::array<std::size_t, 2> index(std::size_t k) const noexcept {
    return {k / axes_[1].n_points, k % axes_[1].n_points};
  }
  std::size_t stride(int a) const noexcept { return a == 0 ? axes_[1].n_points : 1; }
  /// Node volume used by quadrature.
  double weight(std::size_t k) const noexcept;
  double coordinate(int a, std::size_t k) const noexcept { return axes_[a].coordinate(index(k)[a]); }
  std::vector<double> coordinates(int a) const;
  void check_axis(int a) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  GridSpec(int dimension, Axis first, Axis second);

  int dimension_ = 1;
  std::array<Axis, 2> axes_{};
};

template <class T>
class Field {
 public:
  using value_type = T;

  explicit Field(GridSpec grid, T fill = T{}) : grid_(std::move(grid)), values_(grid_.size(), fill) {}
  Field(GridSpec grid, std::vector<T> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw GridMismatch("field value count does not match grid node count");
  }

  /// Evaluates `f(x)` on a line or `f(x_a, x_b)` on a plane.
  template <class F>
  static Field sample(const GridSpec& grid, F&& f) {
    Field out(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if constexpr (std::is_invocable_v<F, double, double>) {
        out.values_[k] = static_cast<T>(f(grid.coordinate(0, k), grid.dimension() == 2 ? grid.coordinate(1, k) : 0.0));
      } else {
        out.values_[k] = static_cast<T>(f(grid.coordinate(0, k)));
      }
    }
    return out;
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }
  T& operator[](std::size_t k) noexcept { return values_[k]; }
  const T& operator[](std::size_t k) const noexcept { return values_[k]; }

 private:
  GridSpec grid_;
  std::vector<T> values_;
};

using RealField = Field<double>;
using ComplexField = Field<std::complex<double>>;

template <class A, class B>
void require_same_grid(const Field<A>& a, const Field<B>& b, const char* context) {
  if (!(a.grid() == b.grid())) throw GridMismatch(std::string(context) + ": fields live on different grids");
}

/// Finite-difference weights for one derivative order along one axis.
///
/// Interior rows are centered; on Dirichlet axes the rows near the ends use
/// one-sided windows of the same accuracy. Weights come from Fornberg's
/// recursion so any (derivative, order) pair is consistent by construction.
class Stencil {
 public:
  Stencil(const Axis& axis, int derivative, StencilOrder order);

  struct Row {
    std::ptrdiff_t first;  // offset of the first weight relative to the node
    std::span<const double> weights;
  };

  Row row(std::size_t i) const noexcept;
  /// Largest |offset| any row touches.
  std::size_t reach() const noexcept { return reach_; }
  bool periodic() const noexcept { return periodic_; }
  std::size_t n_points() const noexcept { return n_; }

 private:
  std::size_t n_ = 0;
  bool periodic_ = false;
  std::size_t half_ = 0;
  std::size_t reach_ = 0;
  std::vector<double> central_;
  std::vector<std::vector<double>> left_;   // rows 0 .. half-1
  std::vector<std::vector<double>> right_;  // rows n-half .. n-1
};

/// Applies `stencil` along `axis` at flat node `k`.
template <class T>
T stencil_at(const Stencil& stencil, std::span<const T> f, const GridSpec& grid, int axis, std::size_t k) {
  const std::size_t n = stencil.n_points();
  const std::size_t stride = grid.stride(axis);
  const std::size_t i = grid.index(k)[axis];
  const std::size_t base = k - i * stride;
  const auto row = stencil.row(i);
  T acc{};
  for (std::size_t j = 0; j < row.weights.size(); ++j) {
    std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(i) + row.first + static_cast<std::ptrdiff_t>(j);
    if (stencil.periodic()) {
      const auto nn = static_cast<std::ptrdiff_t>(n);
      idx = ((idx % nn) + nn) % nn;
    }
    acc += row.weights[j] * f[base + static_cast<std::size_t>(idx) * stride];
  }
  return acc;
}

/// Flat indices whose stencil rows can touch node `k`: the cross of nodes
/// within `reach` along each axis (wrapped on periodic axes, clipped on
/// Dirichlet ones). Used to localize finite-difference perturbations.
std::vector<std::size_t> stencil_neighborhood(const GridSpec& grid, std::size_t k, std::size_t reach);

/// Weights for d^m/dx^m at `z` from values at `nodes` (Fornberg 1988).
std::vector<double> fornberg_weights(double z, std::span<const double> nodes, int derivative);

RealField derivative(const RealField& f, int axis, StencilOrder order = StencilOrder::fourth);
ComplexField derivative(const ComplexField& f, int axis, StencilOrder order = StencilOrder::fourth);
RealField second_derivative(const RealField& f, int axis, StencilOrder order = StencilOrder::fourth);
ComplexField second_derivative(const ComplexField& f, int axis, StencilOrder order = StencilOrder::fourth);
RealField laplacian(const RealField& f, StencilOrder order = StencilOrder::fourth);
ComplexField laplacian(const ComplexField& f, StencilOrder order = StencilOrder::fourth);

double integrate(const RealField& f);
double inner(const RealField& a, const RealField& b);
std::complex<double> inner(const ComplexField& a, const ComplexField& b);
double norm(const RealField& f);
double norm(const ComplexField& f);

}  // namespace varq

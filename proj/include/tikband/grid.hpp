#pragma once

// Midpoint grids on a compact interval and the discrete norms used throughout:
// sup, Riemann L2, and the mixed (2,inf) norm of a kernel.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "tikband/error.hpp"

namespace tikband {

using Index = Eigen::Index;

template <typename Scalar>
class GridT {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  GridT(Scalar a, Scalar b, Index m) : a_(a), b_(b), delta_((b - a) / static_cast<Scalar>(m)) {
    require(std::isfinite(a) && std::isfinite(b) && a < b, ErrorKind::invalid_bounds,
            "grid requires a < b");
    require(m >= 2, ErrorKind::invalid_count, "grid requires at least 2 points");
    points_.resize(m);
    for (Index k = 0; k < m; ++k) points_[k] = a + (static_cast<Scalar>(k) + Scalar(0.5)) * delta_;
  }

  Scalar a() const { return a_; }
  Scalar b() const { return b_; }
  Index size() const { return points_.size(); }
  Scalar step() const { return delta_; }
  const Vector& points() const { return points_; }
  Scalar operator[](Index k) const { return points_[k]; }

  friend bool operator==(const GridT& x, const GridT& y) {
    return x.a_ == y.a_ && x.b_ == y.b_ && x.size() == y.size();
  }

 private:
  Scalar a_;
  Scalar b_;
  Scalar delta_;
  Vector points_;
};

template <typename Scalar>
GridT<Scalar> make_uniform_grid(Scalar a, Scalar b, Index m) {
  return GridT<Scalar>(a, b, m);
}

/// Values of a function sampled at the points of a grid.
template <typename Scalar>
class GridFunctionT {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit GridFunctionT(GridT<Scalar> grid) : grid_(std::move(grid)), values_(Vector::Zero(grid_.size())) {}

  GridFunctionT(GridT<Scalar> grid, Vector values) : grid_(std::move(grid)), values_(std::move(values)) {
    require(values_.size() == grid_.size(), ErrorKind::dimension_mismatch,
            "grid function length " + std::to_string(values_.size()) + " does not match grid size " +
                std::to_string(grid_.size()));
    require(values_.allFinite(), ErrorKind::non_finite, "grid function has non-finite values");
  }

  template <typename F>
  static GridFunctionT tabulate(const GridT<Scalar>& grid, F&& f) {
    Vector v(grid.size());
    for (Index k = 0; k < grid.size(); ++k) v[k] = f(grid[k]);
    return GridFunctionT(grid, std::move(v));
  }

  const GridT<Scalar>& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  Index size() const { return values_.size(); }
  Scalar operator[](Index k) const { return values_[k]; }

 private:
  GridT<Scalar> grid_;
  Vector values_;
};

using Grid = GridT<double>;
using GridFunction = GridFunctionT<double>;

template <typename Scalar>
Scalar sup_norm(const GridFunctionT<Scalar>& f) {
  return f.size() == 0 ? Scalar(0) : f.values().cwiseAbs().maxCoeff();
}

template <typename Scalar>
Scalar l2_norm(const GridFunctionT<Scalar>& f) {
  return std::sqrt(f.grid().step() * f.values().squaredNorm());
}

/// sup over rows z_k of the Riemann L2 norm over w of kernel(z_k, .).
/// For the kernel of an integral operator this is the (L2 -> sup) norm of its adjoint.
template <typename Derived>
typename Derived::Scalar mixed_norm_2inf(const Eigen::MatrixBase<Derived>& kernel_values,
                                         const GridT<typename Derived::Scalar>& grid_w) {
  using Scalar = typename Derived::Scalar;
  require(kernel_values.cols() == grid_w.size(), ErrorKind::dimension_mismatch,
          "kernel has " + std::to_string(kernel_values.cols()) + " columns, grid_w has " +
              std::to_string(grid_w.size()) + " points");
  if (kernel_values.rows() == 0) return Scalar(0);
  return std::sqrt(grid_w.step() * kernel_values.rowwise().squaredNorm().maxCoeff());
}

/// Piecewise-linear interpolation through the grid points, constant beyond the
/// first and last midpoint.
template <typename Scalar>
Scalar interpolate(const GridFunctionT<Scalar>& f, Scalar x) {
  const auto& g = f.grid();
  const Index m = g.size();
  if (x <= g[0]) return f[0];
  if (x >= g[m - 1]) return f[m - 1];
  const Scalar s = (x - g[0]) / g.step();
  const Index k = std::min<Index>(static_cast<Index>(std::floor(s)), m - 2);
  const Scalar t = s - static_cast<Scalar>(k);
  return (Scalar(1) - t) * f[k] + t * f[k + 1];
}

}  // namespace tikband

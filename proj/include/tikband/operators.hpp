#pragma once

// Discretized integral operators and Tikhonov-regularized inversion.
//
// A DiscreteOperator stores K with K(j, k) = kernel(z_k, w_j) * dz, so that
// (T phi)(w_j) = sum_k K(j, k) phi(z_k). Its L2 adjoint on the grids is
// (dw / dz) K^T, which is K^T whenever both grids share a step.

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "tikband/error.hpp"
#include "tikband/grid.hpp"

namespace tikband {

template <typename Scalar>
class DiscreteOperatorT {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  DiscreteOperatorT(Matrix matrix, GridT<Scalar> grid_z, GridT<Scalar> grid_w)
      : matrix_(std::move(matrix)), grid_z_(std::move(grid_z)), grid_w_(std::move(grid_w)) {
    require(matrix_.rows() == grid_w_.size() && matrix_.cols() == grid_z_.size(), ErrorKind::dimension_mismatch,
            "operator matrix must be m_w x m_z");
  }

  const Matrix& matrix() const { return matrix_; }
  const GridT<Scalar>& grid_z() const { return grid_z_; }
  const GridT<Scalar>& grid_w() const { return grid_w_; }
  Scalar delta_z() const { return grid_z_.step(); }

  /// Matrix of the discrete adjoint, m_z x m_w.
  Matrix adjoint() const { return (grid_w_.step() / grid_z_.step()) * matrix_.transpose(); }

  /// Kernel values indexed (z_k, w_j).
  Matrix kernel_values() const { return matrix_.transpose() / grid_z_.step(); }

 private:
  Matrix matrix_;
  GridT<Scalar> grid_z_;
  GridT<Scalar> grid_w_;
};

using DiscreteOperator = DiscreteOperatorT<double>;

namespace detail {

template <typename Scalar>
void check_alpha(Scalar alpha) {
  require(alpha > Scalar(0) && std::isfinite(alpha), ErrorKind::nonpositive_alpha, "alpha must be positive");
}

template <typename Scalar>
void check_on(const GridFunctionT<Scalar>& f, const GridT<Scalar>& grid, const char* what) {
  require(f.size() == grid.size(), ErrorKind::dimension_mismatch,
          std::string(what) + " has " + std::to_string(f.size()) + " points, expected " + std::to_string(grid.size()));
}

}  // namespace detail

template <typename Derived>
DiscreteOperatorT<typename Derived::Scalar> operator_from_kernel(const Eigen::MatrixBase<Derived>& kernel_values,
                                                                 const GridT<typename Derived::Scalar>& grid_z,
                                                                 const GridT<typename Derived::Scalar>& grid_w) {
  using Scalar = typename Derived::Scalar;
  require(kernel_values.rows() == grid_z.size() && kernel_values.cols() == grid_w.size(),
          ErrorKind::dimension_mismatch,
          "kernel is " + std::to_string(kernel_values.rows()) + "x" + std::to_string(kernel_values.cols()) +
              ", grids are " + std::to_string(grid_z.size()) + "x" + std::to_string(grid_w.size()));
  typename DiscreteOperatorT<Scalar>::Matrix m = kernel_values.transpose() * grid_z.step();
  return DiscreteOperatorT<Scalar>(std::move(m), grid_z, grid_w);
}

template <typename Scalar>
GridFunctionT<Scalar> apply(const DiscreteOperatorT<Scalar>& op, const GridFunctionT<Scalar>& phi) {
  detail::check_on(phi, op.grid_z(), "input");
  return GridFunctionT<Scalar>(op.grid_w(), op.matrix() * phi.values());
}

template <typename Scalar>
GridFunctionT<Scalar> apply_adjoint(const DiscreteOperatorT<Scalar>& op, const GridFunctionT<Scalar>& psi) {
  detail::check_on(psi, op.grid_w(), "input");
  return GridFunctionT<Scalar>(op.grid_z(), op.adjoint() * psi.values());
}

/// alpha I + T*T on grid_z.
template <typename Scalar>
typename DiscreteOperatorT<Scalar>::Matrix normal_matrix(const DiscreteOperatorT<Scalar>& op, Scalar alpha) {
  using Matrix = typename DiscreteOperatorT<Scalar>::Matrix;
  const Scalar c = op.grid_w().step() / op.grid_z().step();
  Matrix a = c * (op.matrix().transpose() * op.matrix());
  a.diagonal().array() += alpha;
  return a;
}

/// Minimizer of alpha |phi|^2 + |T phi - r|^2, i.e. (alpha I + T*T)^{-1} T* r.
template <typename Scalar>
GridFunctionT<Scalar> tikhonov_solve(const DiscreteOperatorT<Scalar>& op, const GridFunctionT<Scalar>& r,
                                     Scalar alpha) {
  detail::check_alpha(alpha);
  detail::check_on(r, op.grid_w(), "right-hand side");
  Eigen::LLT<typename DiscreteOperatorT<Scalar>::Matrix> llt(normal_matrix(op, alpha));
  return GridFunctionT<Scalar>(op.grid_z(), llt.solve(op.adjoint() * r.values()));
}

/// Same estimator through T* (alpha I + T T*)^{-1} r, an m_w x m_w solve.
template <typename Scalar>
GridFunctionT<Scalar> tikhonov_solve_dual(const DiscreteOperatorT<Scalar>& op, const GridFunctionT<Scalar>& r,
                                          Scalar alpha) {
  using Matrix = typename DiscreteOperatorT<Scalar>::Matrix;
  detail::check_alpha(alpha);
  detail::check_on(r, op.grid_w(), "right-hand side");
  const Matrix adj = op.adjoint();
  Matrix a = op.matrix() * adj;
  a.diagonal().array() += alpha;
  Eigen::LLT<Matrix> llt(a);
  return GridFunctionT<Scalar>(op.grid_z(), adj * llt.solve(r.values()));
}

/// (alpha I + T*T)^{-1} g.
template <typename Scalar>
GridFunctionT<Scalar> resolvent_apply(const DiscreteOperatorT<Scalar>& op, const GridFunctionT<Scalar>& g,
                                      Scalar alpha) {
  detail::check_alpha(alpha);
  detail::check_on(g, op.grid_z(), "input");
  Eigen::LLT<typename DiscreteOperatorT<Scalar>::Matrix> llt(normal_matrix(op, alpha));
  return GridFunctionT<Scalar>(op.grid_z(), llt.solve(g.values()));
}

/// Sup-norm bound on (alpha I + T*T)^{-1}: (|T*|_{2,inf} / 2 + sqrt(alpha)) / alpha^{3/2}.
template <typename Scalar>
Scalar resolvent_sup_bound(Scalar norm_2inf, Scalar alpha) {
  detail::check_alpha(alpha);
  require(norm_2inf >= Scalar(0), ErrorKind::invalid_argument, "operator norm must be nonnegative");
  return (norm_2inf / Scalar(2) + std::sqrt(alpha)) / (alpha * std::sqrt(alpha));
}

// Plain-matrix forms of the same maps, used where no grids are involved.

/// (alpha I + K^T K)^{-1} K^T.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> tikhonov_matrix(
    const Eigen::MatrixBase<Derived>& k, typename Derived::Scalar alpha) {
  using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  detail::check_alpha(alpha);
  Matrix a = k.transpose() * k;
  a.diagonal().array() += alpha;
  return Eigen::LLT<Matrix>(a).solve(Matrix(k.transpose()));
}

/// K^T (alpha I + K K^T)^{-1}.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> tikhonov_matrix_dual(
    const Eigen::MatrixBase<Derived>& k, typename Derived::Scalar alpha) {
  using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  detail::check_alpha(alpha);
  Matrix a = k * k.transpose();
  a.diagonal().array() += alpha;
  // K^T A^{-1} = (A^{-1} K)^T since A is symmetric.
  return Eigen::LLT<Matrix>(a).solve(Matrix(k)).transpose();
}

/// (alpha I + K^T K)^{-1}.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> resolvent_matrix(
    const Eigen::MatrixBase<Derived>& k, typename Derived::Scalar alpha) {
  using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  detail::check_alpha(alpha);
  Matrix a = k.transpose() * k;
  a.diagonal().array() += alpha;
  return Eigen::LLT<Matrix>(a).solve(Matrix::Identity(k.cols(), k.cols()));
}

}  // namespace tikband

#pragma once

#include <Eigen/Dense>

#include <span>

#include "tikband/grid.hpp"

namespace tikband {

enum class KernelFamily { epanechnikov };

struct KernelSpec {
  KernelFamily family = KernelFamily::epanechnikov;
  double support_radius = 1.0;
};

/// Second-order Epanechnikov kernel 0.75 (1 - u^2) on [-1, 1] (scaled to the support radius).
double kernel_eval(const KernelSpec& spec, double u) noexcept;

/// Product-kernel estimate of the joint density of (Z, W) with equal bandwidth.
/// Entry (k, j) is the estimate at (grid_z[k], grid_w[j]).
Eigen::MatrixXd kde_joint(std::span<const double> z_sample, std::span<const double> w_sample, double h,
                          const Grid& grid_z, const Grid& grid_w, const KernelSpec& spec = {});

/// (1 / (n h)) sum_i y_i K((w_i - w) / h) on grid_w. No random denominator.
GridFunction kernel_numerator(std::span<const double> y_sample, std::span<const double> w_sample, double h,
                              const Grid& grid_w, const KernelSpec& spec = {});

/// n x m matrix of K((x_i - g_k) / h).
Eigen::MatrixXd kernel_design(std::span<const double> sample, double h, const Grid& grid, const KernelSpec& spec);

}  // namespace tikband

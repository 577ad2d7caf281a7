#include "tikband/kernels.hpp"

#include <cmath>
#include <string>

namespace tikband {

namespace {

void check_sample(std::span<const double> x, std::span<const double> y, double h) {
  require(!x.empty() && !y.empty(), ErrorKind::empty_sample, "sample is empty");
  require(x.size() == y.size(), ErrorKind::dimension_mismatch,
          "samples have different lengths " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
  require(h > 0.0 && std::isfinite(h), ErrorKind::nonpositive_bandwidth, "bandwidth must be positive");
}

}  // namespace

double kernel_eval(const KernelSpec& spec, double u) noexcept {
  const double r = spec.support_radius;
  const double x = u / r;
  if (!(std::abs(x) <= 1.0)) return 0.0;
  return 0.75 * (1.0 - x * x) / r;
}

Eigen::MatrixXd kernel_design(std::span<const double> sample, double h, const Grid& grid, const KernelSpec& spec) {
  const Index n = static_cast<Index>(sample.size());
  Eigen::MatrixXd out(n, grid.size());
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < grid.size(); ++k) out(i, k) = kernel_eval(spec, (sample[i] - grid[k]) / h);
  return out;
}

Eigen::MatrixXd kde_joint(std::span<const double> z_sample, std::span<const double> w_sample, double h,
                          const Grid& grid_z, const Grid& grid_w, const KernelSpec& spec) {
  check_sample(z_sample, w_sample, h);
  const Index n = static_cast<Index>(z_sample.size());
  const Eigen::MatrixXd kz = kernel_design(z_sample, h, grid_z, spec);
  const Eigen::MatrixXd kw = kernel_design(w_sample, h, grid_w, spec);

  // Explicit loop keeps the summation order over i fixed for every entry.
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(grid_z.size(), grid_w.size());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < grid_w.size(); ++j) {
      const double b = kw(i, j);
      if (b == 0.0) continue;
      for (Index k = 0; k < grid_z.size(); ++k) f(k, j) += kz(i, k) * b;
    }
  }
  f /= static_cast<double>(n) * h * h;
  return f;
}

GridFunction kernel_numerator(std::span<const double> y_sample, std::span<const double> w_sample, double h,
                              const Grid& grid_w, const KernelSpec& spec) {
  check_sample(y_sample, w_sample, h);
  const Index n = static_cast<Index>(y_sample.size());
  Eigen::VectorXd r = Eigen::VectorXd::Zero(grid_w.size());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < grid_w.size(); ++j) r[j] += y_sample[i] * kernel_eval(spec, (w_sample[i] - grid_w[j]) / h);
  r /= static_cast<double>(n) * h;
  return GridFunction(grid_w, std::move(r));
}

}  // namespace tikband

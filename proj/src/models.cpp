#include "tikband/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tikband {

namespace {

void check_alpha(double alpha) { detail::check_alpha(alpha); }

GridFunction adjoint_rhs(const DiscreteOperator& op, const GridFunction& r) { return apply_adjoint(op, r); }

}  // namespace

void validate(const NpivData& data) {
  const Index n = data.y.size();
  require(data.z.size() == n && data.w.size() == n, ErrorKind::dimension_mismatch,
          "y, z and w must have equal length");
  require(n >= 2, ErrorKind::too_few_rows, "NPIV data needs at least 2 observations, got " + std::to_string(n));
  require(data.y.allFinite() && data.z.allFinite() && data.w.allFinite(), ErrorKind::non_finite,
          "NPIV data has non-finite entries");
}

NpivData truncate_sample(const NpivData& data, double bound) {
  require(bound > 0.0, ErrorKind::invalid_argument, "truncation bound must be positive");
  std::vector<Index> keep;
  keep.reserve(static_cast<std::size_t>(data.size()));
  for (Index i = 0; i < data.size(); ++i)
    if (std::abs(data.z[i]) <= bound && std::abs(data.w[i]) <= bound) keep.push_back(i);
  const auto m = static_cast<Index>(keep.size());
  NpivData out{Eigen::VectorXd(m), Eigen::VectorXd(m), Eigen::VectorXd(m)};
  for (Index k = 0; k < m; ++k) {
    out.y[k] = data.y[keep[k]];
    out.z[k] = data.z[keep[k]];
    out.w[k] = data.w[keep[k]];
  }
  return out;
}

NoiseDensity epanechnikov_noise(double scale) {
  require(scale > 0.0 && std::isfinite(scale), ErrorKind::invalid_argument, "noise scale must be positive");
  const KernelSpec spec{KernelFamily::epanechnikov, scale};
  return {[spec](double u) { return kernel_eval(spec, u); }, -scale, scale};
}

NoiseDensity tabulated_noise(Eigen::VectorXd u, Eigen::VectorXd f) {
  require(u.size() == f.size() && u.size() >= 2, ErrorKind::dimension_mismatch,
          "noise table needs at least two (u, f) rows");
  for (Index k = 1; k < u.size(); ++k)
    require(u[k] > u[k - 1], ErrorKind::invalid_argument, "noise table abscissae must be increasing");
  const double lo = u[0];
  const double hi = u[u.size() - 1];
  auto pdf = [u = std::move(u), f = std::move(f)](double x) {
    if (x < u[0] || x > u[u.size() - 1]) return 0.0;
    const double* first = u.data();
    const double* last = u.data() + u.size();
    const auto k = std::max<Index>(1, static_cast<Index>(std::upper_bound(first, last, x) - first));
    const Index hiix = std::min<Index>(k, u.size() - 1);
    const double t = (x - u[hiix - 1]) / (u[hiix] - u[hiix - 1]);
    return (1.0 - t) * f[hiix - 1] + t * f[hiix];
  };
  return {std::move(pdf), lo, hi};
}

void validate(const NoiseDensity& density) {
  require(static_cast<bool>(density.pdf) && density.lower < density.upper, ErrorKind::invalid_argument,
          "noise density needs a function and a support interval");
  const Grid fine(density.lower, density.upper, 4000);
  double total = 0.0;
  for (Index k = 0; k < fine.size(); ++k) {
    const double v = density.pdf(fine[k]);
    require(v >= 0.0 && std::isfinite(v), ErrorKind::invalid_argument, "noise density must be nonnegative");
    total += v;
  }
  total *= fine.step();
  require(std::abs(total - 1.0) <= 0.02, ErrorKind::invalid_argument,
          "noise density integrates to " + std::to_string(total) + ", expected 1");
}

Fit npiv_fit(const NpivData& data, double alpha, double h, const Grid& grid_z, const Grid& grid_w,
             const KernelSpec& spec) {
  validate(data);
  check_alpha(alpha);
  require(h > 0.0 && std::isfinite(h), ErrorKind::nonpositive_bandwidth, "bandwidth must be positive");
  require(data.w.maxCoeff() > data.w.minCoeff(), ErrorKind::degenerate_sample, "all instrument values are identical");

  GridFunction r_hat = kernel_numerator(as_span(data.y), as_span(data.w), h, grid_w, spec);
  const Eigen::MatrixXd f_hat = kde_joint(as_span(data.z), as_span(data.w), h, grid_z, grid_w, spec);
  DiscreteOperator op = operator_from_kernel(f_hat, grid_z, grid_w);
  GridFunction phi_hat = tikhonov_solve(op, r_hat, alpha);
  GridFunction rhs = adjoint_rhs(op, r_hat);

  Eigen::VectorXd u(data.size());
  for (Index i = 0; i < data.size(); ++i) u[i] = data.y[i] - interpolate(phi_hat, data.z[i]);

  return Fit{std::move(phi_hat), std::move(op), std::move(r_hat), std::move(rhs), std::move(u),
             alpha, h, 1.0 / h, data.size()};
}

ResidualMatrix npiv_residuals(const Fit& fit, const NpivData& data, int process_index, const Grid& grid,
                              const KernelSpec& spec) {
  require(process_index == 1 || process_index == 2, ErrorKind::index_out_of_range,
          "process index must be 1 or 2, got " + std::to_string(process_index));
  require(fit.residuals_u.size() == data.size(), ErrorKind::dimension_mismatch, "fit does not match data");
  const Index n = data.size();
  const double h = fit.h;

  if (process_index == 1) {
    Eigen::MatrixXd x = kernel_design(as_span(data.w), h, grid, spec);
    for (Index i = 0; i < n; ++i) x.row(i) *= fit.residuals_u[i] / h;
    return ResidualMatrix{std::move(x), grid, 1, fit.u_n};
  }

  // f_hat(z_k, W_i) = (1 / (n h^2)) sum_l K((Z_l - z_k)/h) K((W_l - W_i)/h)
  const Eigen::MatrixXd kz = kernel_design(as_span(data.z), h, grid, spec);  // n x m
  Eigen::MatrixXd x(n, grid.size());  // (i, k)
  constexpr Index block = 256;
  for (Index i0 = 0; i0 < n; i0 += block) {
    const Index len = std::min(block, n - i0);
    Eigen::MatrixXd kw(len, n);
    for (Index i = 0; i < len; ++i)
      for (Index l = 0; l < n; ++l) kw(i, l) = kernel_eval(spec, (data.w[l] - data.w[i0 + i]) / h);
    x.middleRows(i0, len).noalias() = kw * kz;
  }
  x /= static_cast<double>(n) * h * h;
  x = fit.residuals_u.asDiagonal() * x;
  return ResidualMatrix{std::move(x), grid, 2, 1.0};
}

Fit funreg_fit(const FunRegData& data, double alpha) {
  check_alpha(alpha);
  const Index n = data.y.size();
  require(n >= 2, ErrorKind::too_few_rows, "functional regression needs at least 2 observations");
  require(data.z_curves.rows() == n && data.w_curves.rows() == n, ErrorKind::dimension_mismatch,
          "curve matrices must have one row per observation");
  require(data.z_curves.cols() == data.grid_t.size() && data.w_curves.cols() == data.grid_s.size(),
          ErrorKind::dimension_mismatch, "curve columns must match their grids");

  const double inv_n = 1.0 / static_cast<double>(n);
  GridFunction r_hat(data.grid_s, (data.w_curves.transpose() * data.y) * inv_n);
  const Eigen::MatrixXd k_hat = (data.z_curves.transpose() * data.w_curves) * inv_n;  // (t, s)
  DiscreteOperator op = operator_from_kernel(k_hat, data.grid_t, data.grid_s);
  GridFunction phi_hat = tikhonov_solve(op, r_hat, alpha);
  GridFunction rhs = adjoint_rhs(op, r_hat);

  Eigen::VectorXd u = data.y - data.grid_t.step() * (data.z_curves * phi_hat.values());
  return Fit{std::move(phi_hat), std::move(op), std::move(r_hat), std::move(rhs), std::move(u), alpha, 0.0, 1.0, n};
}

ResidualMatrix funreg_residuals(const Fit& fit, const FunRegData& data) {
  require(fit.residuals_u.size() == data.y.size(), ErrorKind::dimension_mismatch, "fit does not match data");
  Eigen::MatrixXd x = fit.residuals_u.asDiagonal() * data.w_curves;
  return ResidualMatrix{std::move(x), data.grid_s, 1, 1.0};
}

namespace {

Eigen::MatrixXd noise_rows(const DeconvData& data) {
  const Index n = data.y.size();
  const Grid& g = data.grid_z;
  Eigen::MatrixXd x(n, g.size());
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < g.size(); ++k) x(i, k) = data.noise.pdf(data.y[i] - g[k]);
  return x;
}

}  // namespace

Fit deconv_fit(const DeconvData& data, double alpha) {
  check_alpha(alpha);
  const Index n = data.y.size();
  require(n >= 1, ErrorKind::empty_sample, "deconvolution sample is empty");
  require(data.y.allFinite(), ErrorKind::non_finite, "deconvolution sample has non-finite entries");
  validate(data.noise);

  const Grid& g = data.grid_z;
  // kernel(z_k, y_j) = f(y_j - z_k); the operator maps densities on grid_z to densities on grid_z.
  Eigen::MatrixXd kernel(g.size(), g.size());
  for (Index k = 0; k < g.size(); ++k)
    for (Index j = 0; j < g.size(); ++j) kernel(k, j) = data.noise.pdf(g[j] - g[k]);
  DiscreteOperator op = operator_from_kernel(kernel, g, g);

  GridFunction s(g, noise_rows(data).colwise().mean().transpose());
  GridFunction phi_hat = resolvent_apply(op, s, alpha);
  return Fit{std::move(phi_hat), std::move(op), std::nullopt, std::move(s), Eigen::VectorXd(), alpha, 0.0, 1.0, n};
}

ResidualMatrix deconv_residuals(const Fit& fit, const DeconvData& data) {
  require(fit.n == data.y.size(), ErrorKind::dimension_mismatch, "fit does not match data");
  Eigen::MatrixXd x = noise_rows(data);
  x.rowwise() -= fit.rhs.values().transpose();
  return ResidualMatrix{std::move(x), data.grid_z, 2, 1.0};
}

double normal_equation_residual(const Fit& fit) {
  const Eigen::VectorXd lhs = normal_matrix(fit.op, fit.alpha) * fit.phi_hat.values();
  const double scale = fit.rhs.values().cwiseAbs().maxCoeff();
  const double err = (lhs - fit.rhs.values()).cwiseAbs().maxCoeff();
  return scale > 0.0 ? err / scale : err;
}

}  // namespace tikband

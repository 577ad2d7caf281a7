#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>

#include "tikband/grid.hpp"
#include "tikband/kernels.hpp"
#include "tikband/operators.hpp"

namespace tikband {

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Y = phi(Z) + U with E[U | W] = 0.
struct NpivData {
  Eigen::VectorXd y;
  Eigen::VectorXd z;
  Eigen::VectorXd w;

  Index size() const { return y.size(); }
};

void validate(const NpivData& data);

/// Keeps the observations with |Z| <= bound and |W| <= bound.
NpivData truncate_sample(const NpivData& data, double bound);

/// Scalar response with curve-valued regressor Z(t) and instrument W(s), both pre-sampled on grids.
struct FunRegData {
  Eigen::VectorXd y;
  Eigen::MatrixXd z_curves;  // n x m_t
  Eigen::MatrixXd w_curves;  // n x m_s
  Grid grid_t;
  Grid grid_s;
};

/// Known measurement-error density with compact support [lower, upper].
struct NoiseDensity {
  std::function<double(double)> pdf;
  double lower;
  double upper;
};

/// Epanechnikov density rescaled to support [-scale, scale].
NoiseDensity epanechnikov_noise(double scale);

/// Linear interpolation of (u, f) pairs, zero outside the tabulated range.
NoiseDensity tabulated_noise(Eigen::VectorXd u, Eigen::VectorXd f);

/// Nonnegative and integrating to one within 2%.
void validate(const NoiseDensity& density);

/// Y = Z + noise, noise density known; phi is the density of Z.
struct DeconvData {
  Eigen::VectorXd y;
  NoiseDensity noise;
  Grid grid_z;
};

struct Fit {
  GridFunction phi_hat;              // on grid_z
  DiscreteOperator op;               // T-hat
  std::optional<GridFunction> r_hat;  // on grid_w; absent for deconvolution
  GridFunction rhs;                  // T-hat* r-hat on grid_z
  Eigen::VectorXd residuals_u;       // Y_i - fitted value; empty for deconvolution
  double alpha;
  double h;    // bandwidth, 0 when no smoothing is involved
  double u_n;  // scale of the first process: 1/h for NPIV, 1 otherwise
  Index n;
};

/// Row i is the estimated summand process X_i on `grid`.
struct ResidualMatrix {
  Eigen::MatrixXd values;  // n x m
  Grid grid;
  int process_index;
  double u_n;

  /// (1/n) sum_i X_i.
  Eigen::VectorXd mean() const { return values.colwise().mean().transpose(); }
};

Fit npiv_fit(const NpivData& data, double alpha, double h, const Grid& grid_z, const Grid& grid_w,
             const KernelSpec& spec = {});

/// Process 1: U_i h^{-1} K((W_i - w) / h) on grid_w. Process 2: f_ZW(z, W_i) U_i on grid_z.
ResidualMatrix npiv_residuals(const Fit& fit, const NpivData& data, int process_index, const Grid& grid,
                              const KernelSpec& spec = {});

Fit funreg_fit(const FunRegData& data, double alpha);

/// Rows U_i W_i(s) on grid_s (process 1).
ResidualMatrix funreg_residuals(const Fit& fit, const FunRegData& data);

Fit deconv_fit(const DeconvData& data, double alpha);

/// Rows f(Y_i - z) - (1/n) sum_l f(Y_l - z) on grid_z (process 2).
ResidualMatrix deconv_residuals(const Fit& fit, const DeconvData& data);

/// sup |(alpha I + T*T) phi - T* r| relative to sup |T* r|.
double normal_equation_residual(const Fit& fit);

}  // namespace tikband

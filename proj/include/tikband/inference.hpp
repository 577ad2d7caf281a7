#pragma once

// Uniform confidence bands for Tikhonov estimators: Gaussian approximation to a
// normalized upper bound on the variance process, a data-driven concentration
// inequality built from a Rademacher-symmetrized process, and the DKW band for
// an empirical CDF.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "tikband/grid.hpp"
#include "tikband/models.hpp"

namespace tikband {

enum class BandMethod { gauss, concentration, dkw };
enum class NormKind { l2, l2_squared, sup };

std::string_view to_string(BandMethod method) noexcept;

struct BandRequest {
  BandMethod method = BandMethod::gauss;
  int process_index = 1;
  double gamma = 0.05;
  double c0 = 0.0;
  int gauss_draws = 2000;
  std::uint64_t seed = 0;
  int workers = 1;  // threads for Gaussian path simulation; does not change the result
};

void validate(const BandRequest& req);

struct BandDiagnostics {
  double norm_2inf = 0.0;
  std::optional<double> envelope;
  std::optional<double> sym_supremum;
  std::optional<double> gauss_quantile;
};

struct ConfidenceBand {
  GridFunction estimate;
  double half_width;
  GridFunction lower;
  GridFunction upper;
  BandRequest request;
  BandDiagnostics diagnostics;
  double alpha = 0.0;
  double h = 0.0;
  Index n = 0;
};

/// estimate -/+ half_width; half_width must be positive.
ConfidenceBand make_band(GridFunction estimate, double half_width, BandRequest request);

/// (1/n) sum_i x_i x_i^T over the rows of `rows`, no centering.
Eigen::MatrixXd second_moment(const Eigen::MatrixXd& rows);

struct CovarianceEstimate {
  Eigen::MatrixXd matrix;
  bool degenerate = false;  // every row was zero
};

/// Second-moment covariance of the residual processes projected onto the PSD cone.
CovarianceEstimate estimate_covariance(const ResidualMatrix& res);

/// 1 - gamma quantile of |G|^2_{L2} or |G|_inf for a centered Gaussian vector on `grid`
/// with covariance `cov`, from `draws` simulated paths. Draw d uses its own stream
/// derived from (seed, d), so the value does not depend on `workers`.
double gaussian_quantile(const Eigen::MatrixXd& cov, const Grid& grid, NormKind norm_kind, double gamma, int draws,
                         std::uint64_t seed, int workers = 1);

/// The Rademacher signs used by symmetrized_supremum for a given seed.
Eigen::VectorXd rademacher_signs(Index n, std::uint64_t seed);

/// Sup norm of the regularized image of (1/n) sum_i eps_i X_i.
double symmetrized_supremum(const ResidualMatrix& res, const DiscreteOperator& op, double alpha, std::uint64_t seed);

/// max_i of the row norm; process-1 rows are divided by u_n first.
double envelope_estimate(const ResidualMatrix& res, NormKind norm_kind);

double gauss_half_width(int process_index, double quantile, double norm_2inf, double alpha, Index n, double c0);

double concentration_half_width(int process_index, double sym_supremum, double norm_2inf, double envelope,
                                double gamma, double u_n, double alpha, Index n, double c0);

ConfidenceBand build_band(const Fit& fit, const ResidualMatrix& res, const BandRequest& req);

double dkw_half_width(Index n, double gamma);

/// Empirical CDF on `grid` with the DKW half-width.
ConfidenceBand dkw_band(std::span<const double> sample, double gamma, const Grid& grid);

}  // namespace tikband

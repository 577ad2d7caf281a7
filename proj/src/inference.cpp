#include "tikband/inference.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "tikband/random.hpp"

namespace tikband {

namespace {

void check_gamma(double gamma) {
  require(gamma > 0.0 && gamma < 1.0, ErrorKind::invalid_gamma, "gamma must lie in (0, 1)");
}

void check_process(int process_index) {
  require(process_index == 1 || process_index == 2, ErrorKind::index_out_of_range,
          "process index must be 1 or 2, got " + std::to_string(process_index));
}

// Linear interpolation between order statistics (numpy's default rule).
double empirical_quantile(std::vector<double> values, double p) {
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
  const double a = values[lo];
  if (lo + 1 >= values.size()) return a;
  const double b = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end());
  return a + (pos - static_cast<double>(lo)) * (b - a);
}

}  // namespace

std::string_view to_string(BandMethod method) noexcept {
  switch (method) {
    case BandMethod::gauss: return "gauss";
    case BandMethod::concentration: return "concentration";
    case BandMethod::dkw: return "dkw";
  }
  return "unknown";
}

void validate(const BandRequest& req) {
  check_gamma(req.gamma);
  check_process(req.process_index);
  require(req.c0 >= 0.0, ErrorKind::invalid_argument, "c0 must be nonnegative");
  if (req.method == BandMethod::gauss)
    require(req.gauss_draws >= 100, ErrorKind::invalid_argument, "gauss_draws must be at least 100");
}

ConfidenceBand make_band(GridFunction estimate, double half_width, BandRequest request) {
  require(half_width > 0.0 && std::isfinite(half_width), ErrorKind::zero_envelope,
          "band half-width must be positive, got " + std::to_string(half_width));
  const auto& grid = estimate.grid();
  GridFunction lower(grid, estimate.values().array() - half_width);
  GridFunction upper(grid, estimate.values().array() + half_width);
  return ConfidenceBand{std::move(estimate), half_width, std::move(lower), std::move(upper), request, {}};
}

Eigen::MatrixXd second_moment(const Eigen::MatrixXd& rows) {
  require(rows.rows() >= 1, ErrorKind::empty_sample, "no rows");
  Eigen::MatrixXd s = rows.transpose() * rows / static_cast<double>(rows.rows());
  return (s + s.transpose()) / 2.0;
}

CovarianceEstimate estimate_covariance(const ResidualMatrix& res) {
  require(res.values.rows() >= 2, ErrorKind::too_few_rows, "covariance needs at least 2 rows");
  CovarianceEstimate out;
  if (res.values.isZero(0.0)) {
    out.matrix = Eigen::MatrixXd::Zero(res.values.cols(), res.values.cols());
    out.degenerate = true;
    return out;
  }
  const Eigen::MatrixXd s = second_moment(res.values);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  out.matrix = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
  out.matrix = ((out.matrix + out.matrix.transpose()) / 2.0).eval();
  return out;
}

double gaussian_quantile(const Eigen::MatrixXd& cov, const Grid& grid, NormKind norm_kind, double gamma, int draws,
                         std::uint64_t seed, int workers) {
  check_gamma(gamma);
  require(draws >= 100, ErrorKind::invalid_argument, "need at least 100 draws");
  require(cov.rows() == grid.size() && cov.cols() == grid.size(), ErrorKind::dimension_mismatch,
          "covariance must be m x m for the grid");
  require(norm_kind != NormKind::l2, ErrorKind::invalid_argument, "gaussian_quantile supports l2_squared and sup");
  require(cov.allFinite(), ErrorKind::non_finite, "covariance has non-finite entries");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig((cov + cov.transpose()) / 2.0);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double top = std::max(1.0, std::abs(lambda.maxCoeff()));
  require(lambda.minCoeff() >= -1e-8 * top, ErrorKind::non_psd_input,
          "covariance is not positive semidefinite (min eigenvalue " + std::to_string(lambda.minCoeff()) + ")");

  std::vector<Index> keep;
  for (Index k = 0; k < lambda.size(); ++k)
    if (lambda[k] > 0.0) keep.push_back(k);
  if (keep.empty()) return 0.0;
  Eigen::MatrixXd root(grid.size(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    root.col(static_cast<Index>(c)) = eig.eigenvectors().col(keep[c]) * std::sqrt(lambda[keep[c]]);

  std::vector<double> stats(static_cast<std::size_t>(draws));
  const double step = grid.step();
  auto simulate = [&](int first, int last) {
    Eigen::VectorXd xi(root.cols());
    Eigen::VectorXd path(root.rows());
    for (int d = first; d < last; ++d) {
      Engine eng = make_engine(seed, static_cast<std::uint64_t>(d));
      std::normal_distribution<double> normal;
      for (Index c = 0; c < xi.size(); ++c) xi[c] = normal(eng);
      path.noalias() = root * xi;
      stats[static_cast<std::size_t>(d)] =
          norm_kind == NormKind::sup ? path.cwiseAbs().maxCoeff() : step * path.squaredNorm();
    }
  };

  const int n_workers = std::clamp(workers, 1, draws);
  if (n_workers == 1) {
    simulate(0, draws);
  } else {
    std::vector<std::jthread> pool;
    const int chunk = (draws + n_workers - 1) / n_workers;
    for (int first = 0; first < draws; first += chunk) pool.emplace_back(simulate, first, std::min(draws, first + chunk));
  }
  return empirical_quantile(std::move(stats), 1.0 - gamma);
}

Eigen::VectorXd rademacher_signs(Index n, std::uint64_t seed) {
  Engine eng = make_engine(seed, 0x5eedULL);
  Eigen::VectorXd eps(n);
  for (Index i = 0; i < n; ++i) eps[i] = (eng() >> 63) != 0 ? 1.0 : -1.0;
  return eps;
}

double symmetrized_supremum(const ResidualMatrix& res, const DiscreteOperator& op, double alpha, std::uint64_t seed) {
  detail::check_alpha(alpha);
  check_process(res.process_index);
  const Index n = res.values.rows();
  require(n >= 1, ErrorKind::empty_sample, "no residual rows");
  const Eigen::VectorXd eps = rademacher_signs(n, seed);
  Eigen::VectorXd g = res.values.transpose() * eps / static_cast<double>(n);

  if (res.process_index == 1) {
    require(res.grid.size() == op.grid_w().size(), ErrorKind::dimension_mismatch,
            "process-1 rows must live on the operator's w grid");
    return sup_norm(tikhonov_solve(op, GridFunction(op.grid_w(), std::move(g)), alpha));
  }
  require(res.grid.size() == op.grid_z().size(), ErrorKind::dimension_mismatch,
          "process-2 rows must live on the operator's z grid");
  return sup_norm(resolvent_apply(op, GridFunction(op.grid_z(), std::move(g)), alpha));
}

double envelope_estimate(const ResidualMatrix& res, NormKind norm_kind) {
  require(res.values.rows() >= 1, ErrorKind::empty_sample, "no residual rows");
  require(norm_kind != NormKind::l2_squared, ErrorKind::invalid_argument, "envelope uses the l2 or sup norm");
  const double scale = res.process_index == 1 ? 1.0 / res.u_n : 1.0;
  double best = 0.0;
  for (Index i = 0; i < res.values.rows(); ++i) {
    const auto row = res.values.row(i);
    const double v = norm_kind == NormKind::sup ? row.cwiseAbs().maxCoeff()
                                                : std::sqrt(res.grid.step() * row.squaredNorm());
    best = std::max(best, v * scale);
  }
  return best;
}

double gauss_half_width(int process_index, double quantile, double norm_2inf, double alpha, Index n, double c0) {
  check_process(process_index);
  detail::check_alpha(alpha);
  const double root_n = std::sqrt(static_cast<double>(n));
  if (process_index == 1) return (std::sqrt(quantile) * norm_2inf + c0) / (alpha * root_n);
  return (quantile * (norm_2inf / 2.0 + std::sqrt(alpha)) + c0) / (alpha * std::sqrt(alpha) * root_n);
}

double concentration_half_width(int process_index, double sym_supremum, double norm_2inf, double envelope,
                                double gamma, double u_n, double alpha, Index n, double c0) {
  check_process(process_index);
  check_gamma(gamma);
  detail::check_alpha(alpha);
  const double root_n = std::sqrt(static_cast<double>(n));
  const double tail = std::sqrt(2.0 * std::log(2.0 / gamma));
  if (process_index == 1) return 2.0 * sym_supremum + (3.0 * norm_2inf * envelope * tail + c0) * u_n / (alpha * root_n);
  return 2.0 * sym_supremum +
         (3.0 * (norm_2inf / 2.0 + std::sqrt(alpha)) * envelope * tail + c0) / (alpha * std::sqrt(alpha) * root_n);
}

ConfidenceBand build_band(const Fit& fit, const ResidualMatrix& res, const BandRequest& req) {
  validate(req);
  require(req.method != BandMethod::dkw, ErrorKind::invalid_argument, "use dkw_band for empirical CDF bands");
  require(res.process_index == req.process_index, ErrorKind::index_out_of_range,
          "residual matrix is for process " + std::to_string(res.process_index) + ", request is for process " +
              std::to_string(req.process_index));
  const Index n = res.values.rows();
  const double norm = mixed_norm_2inf(fit.op.kernel_values(), fit.op.grid_w());

  BandDiagnostics diag;
  diag.norm_2inf = norm;
  double q = 0.0;
  if (req.method == BandMethod::gauss) {
    const CovarianceEstimate cov = estimate_covariance(res);
    const NormKind kind = req.process_index == 1 ? NormKind::l2_squared : NormKind::sup;
    const double c = gaussian_quantile(cov.matrix, res.grid, kind, req.gamma, req.gauss_draws, req.seed, req.workers);
    diag.gauss_quantile = c;
    q = gauss_half_width(req.process_index, c, norm, fit.alpha, n, req.c0);
    require(q > 0.0, ErrorKind::degenerate_sample, "Gaussian band is degenerate: zero covariance and c0 = 0");
  } else {
    const double nu = symmetrized_supremum(res, fit.op, fit.alpha, req.seed);
    const double env = envelope_estimate(res, req.process_index == 1 ? NormKind::l2 : NormKind::sup);
    diag.sym_supremum = nu;
    diag.envelope = env;
    q = concentration_half_width(req.process_index, nu, norm, env, req.gamma, res.u_n, fit.alpha, n, req.c0);
    require(q > 0.0, ErrorKind::zero_envelope, "concentration band is degenerate: zero envelope and c0 = 0");
  }

  ConfidenceBand band = make_band(fit.phi_hat, q, req);
  band.diagnostics = diag;
  band.alpha = fit.alpha;
  band.h = fit.h;
  band.n = n;
  return band;
}

double dkw_half_width(Index n, double gamma) {
  check_gamma(gamma);
  require(n >= 1, ErrorKind::empty_sample, "DKW band needs at least one observation");
  return std::sqrt(std::log(2.0 / gamma) / (2.0 * static_cast<double>(n)));
}

ConfidenceBand dkw_band(std::span<const double> sample, double gamma, const Grid& grid) {
  const auto n = static_cast<Index>(sample.size());
  const double q = dkw_half_width(n, gamma);
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  Eigen::VectorXd ecdf(grid.size());
  for (Index k = 0; k < grid.size(); ++k) {
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), grid[k]) - sorted.begin();
    ecdf[k] = static_cast<double>(count) / static_cast<double>(n);
  }
  BandRequest req;
  req.method = BandMethod::dkw;
  req.gamma = gamma;
  ConfidenceBand band = make_band(GridFunction(grid, std::move(ecdf)), q, req);
  band.n = n;
  return band;
}

}  // namespace tikband

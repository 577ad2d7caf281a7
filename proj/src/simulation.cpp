#include "tikband/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "tikband/random.hpp"

namespace tikband {

double true_phi(double z) { return std::exp(-z * z / 0.8); }

Eigen::Matrix3d dgp_covariance() {
  const double sz = 0.3;
  const double sw = 0.3;
  const double rho = 0.3;
  Eigen::Matrix3d s;
  s << sz * sz, rho * sz * sw, 0.04,
       rho * sz * sw, sw * sw, 0.0,
       0.04, 0.0, 0.03;
  return s;
}

NpivData simulate_npiv_dgp(Index n, double truncation, std::uint64_t seed, const DgpVariant& variant) {
  require(n >= 2, ErrorKind::invalid_count, "DGP needs n >= 2");
  require(truncation > 0.0, ErrorKind::invalid_argument, "truncation must be positive");
  Eigen::LLT<Eigen::Matrix3d> llt(dgp_covariance());
  require(llt.info() == Eigen::Success, ErrorKind::non_psd_input, "DGP covariance is not positive definite");
  const Eigen::Matrix3d chol = llt.matrixL();

  Engine eng(derive_seed(seed, 0));
  std::normal_distribution<double> normal;
  NpivData d{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  Index kept = 0;
  while (kept < n) {
    Eigen::Vector3d xi;
    for (int c = 0; c < 3; ++c) xi[c] = normal(eng);
    const Eigen::Vector3d x = chol * xi;
    if (std::abs(x[0]) > truncation || std::abs(x[1]) > truncation) continue;
    const double u = variant.zero_noise ? 0.0 : x[2];
    d.z[kept] = x[0];
    d.w[kept] = x[1];
    d.y[kept] = variant.phi_scale * true_phi(x[0]) + u;
    ++kept;
  }
  return d;
}

void validate(const McConfig& c) {
  require(c.n >= 2, ErrorKind::invalid_argument, "n must be at least 2");
  require(c.replications >= 1, ErrorKind::invalid_argument, "replications must be positive");
  require(c.alpha > 0.0, ErrorKind::nonpositive_alpha, "alpha must be positive");
  require(c.h > 0.0, ErrorKind::nonpositive_bandwidth, "h must be positive");
  require(c.gamma > 0.0 && c.gamma < 1.0, ErrorKind::invalid_gamma, "gamma must lie in (0, 1)");
  require(c.process_index == 1 || c.process_index == 2, ErrorKind::index_out_of_range, "process must be 1 or 2");
  require(c.method != BandMethod::dkw, ErrorKind::invalid_argument, "Monte Carlo bands are gauss or concentration");
  require(c.grid_m >= 2, ErrorKind::invalid_count, "grid needs at least 2 points");
  require(c.truncation > 0.0, ErrorKind::invalid_argument, "truncation must be positive");
}

McConfig preset(std::string_view name) {
  McConfig c;
  if (name == "fig1a") {
    c.n = 1000, c.alpha = 0.14, c.h = 1.0, c.method = BandMethod::gauss;
  } else if (name == "fig1b") {
    c.n = 5000, c.alpha = 0.1, c.h = 1.0, c.method = BandMethod::gauss;
  } else if (name == "fig2a") {
    c.n = 1000, c.alpha = 0.24, c.h = 1.0, c.method = BandMethod::concentration;
  } else if (name == "fig2b") {
    c.n = 5000, c.alpha = 0.17, c.h = 0.6, c.method = BandMethod::concentration;
  } else {
    fail(ErrorKind::usage, "unknown preset '" + std::string(name) + "' (expected fig1a, fig1b, fig2a, fig2b)");
  }
  return c;
}

std::uint64_t replication_seed(std::uint64_t master_seed, int replication) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(replication));
}

ReplicationOutcome run_replication(const McConfig& config, int replication) {
  const std::uint64_t seed = replication_seed(config.master_seed, replication);
  const NpivData data = simulate_npiv_dgp(config.n, config.truncation, seed, config.variant);
  const Grid grid(-config.truncation, config.truncation, config.grid_m);
  const Fit fit = npiv_fit(data, config.alpha, config.h, grid, grid);
  const ResidualMatrix res = npiv_residuals(fit, data, config.process_index, grid);

  BandRequest req;
  req.method = config.method;
  req.process_index = config.process_index;
  req.gamma = config.gamma;
  req.c0 = config.c0;
  req.gauss_draws = config.gauss_draws;
  req.seed = derive_seed(seed, 1);
  const ConfidenceBand band = build_band(fit, res, req);

  ReplicationOutcome out;
  out.ok = true;
  out.covered = true;
  for (Index k = 0; k < grid.size(); ++k) {
    const double target = config.variant.phi_scale * true_phi(grid[k]);
    out.sup_bias = std::max(out.sup_bias, std::abs(fit.phi_hat[k] - target));
    if (target < band.lower[k] || target > band.upper[k]) out.covered = false;
  }
  out.half_width = band.half_width;
  return out;
}

McReport run_coverage(const McConfig& config, int workers) {
  validate(config);
  const int reps = config.replications;
  std::vector<ReplicationOutcome> outcomes(static_cast<std::size_t>(reps));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int r = next++; r < reps; r = next++) {
      try {
        outcomes[static_cast<std::size_t>(r)] = run_replication(config, r);
      } catch (const Error&) {
        outcomes[static_cast<std::size_t>(r)] = ReplicationOutcome{};
      }
    }
  };
  const int n_workers = std::clamp(workers, 1, reps);
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(work);
  }

  // Aggregate in replication order so sums are independent of scheduling.
  McReport report;
  report.config = config;
  int covered = 0;
  for (const auto& o : outcomes) {
    if (!o.ok) {
      ++report.replications_failed;
      continue;
    }
    ++report.replications_used;
    covered += o.covered ? 1 : 0;
    report.mean_half_width += o.half_width;
    report.mean_sup_bias += o.sup_bias;
  }
  if (report.replications_used > 0) {
    const double used = report.replications_used;
    report.coverage = covered / used;
    report.mean_half_width /= used;
    report.mean_sup_bias /= used;
  }
  return report;
}

}  // namespace tikband

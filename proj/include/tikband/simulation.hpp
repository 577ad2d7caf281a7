#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>

#include "tikband/inference.hpp"
#include "tikband/models.hpp"

namespace tikband {

/// exp(-z^2 / 0.8)
double true_phi(double z);

/// Covariance of (Z, W, U): sigma_z = sigma_w = 0.3, rho = 0.3, sigma_u^2 = 0.03, sigma_zu = 0.04.
Eigen::Matrix3d dgp_covariance();

struct DgpVariant {
  double phi_scale = 1.0;   // Y = phi_scale * phi(Z) + U
  bool zero_noise = false;  // drop U from Y (Z and W keep their joint law)
};

/// Draws (Z, W, U) until n observations with |Z|, |W| <= truncation are kept.
NpivData simulate_npiv_dgp(Index n, double truncation, std::uint64_t seed, const DgpVariant& variant = {});

struct McConfig {
  Index n = 1000;
  int replications = 200;
  double alpha = 0.14;
  double h = 1.0;
  double gamma = 0.05;
  BandMethod method = BandMethod::gauss;
  int process_index = 1;
  Index grid_m = 100;
  double truncation = 1.0;
  std::uint64_t master_seed = 0;
  double c0 = 0.0;
  int gauss_draws = 2000;
  DgpVariant variant;
};

void validate(const McConfig& config);

/// Tuning configurations of the published coverage figures: fig1a, fig1b (Gaussian), fig2a, fig2b (concentration).
McConfig preset(std::string_view name);

struct McReport {
  double coverage = 0.0;
  double mean_half_width = 0.0;
  double mean_sup_bias = 0.0;
  int replications_used = 0;
  int replications_failed = 0;
  McConfig config;
};

/// Seed of replication r.
std::uint64_t replication_seed(std::uint64_t master_seed, int replication);

struct ReplicationOutcome {
  bool ok = false;
  bool covered = false;
  double half_width = 0.0;
  double sup_bias = 0.0;
};

ReplicationOutcome run_replication(const McConfig& config, int replication);

/// Coverage of the true function over the grid [-truncation, truncation]. Results do not depend on `workers`.
McReport run_coverage(const McConfig& config, int workers = 1);

}  // namespace tikband

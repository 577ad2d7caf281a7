#include "doctest.h"

#include <cmath>

#include "tikband/simulation.hpp"

using namespace tikband;

namespace {

McConfig quick_config() {
  McConfig c;
  c.n = 300;
  c.replications = 6;
  c.grid_m = 40;
  c.gauss_draws = 300;
  c.master_seed = 11;
  return c;
}

double cofactor_det(const Eigen::Matrix3d& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

}  // namespace

TEST_CASE("true function") {
  CHECK(true_phi(0.0) == 1.0);
  CHECK(true_phi(std::sqrt(0.8)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(true_phi(0.8944) == doctest::Approx(0.3679).epsilon(1e-3));
  CHECK(true_phi(40.0) == 0.0);
  CHECK(true_phi(-3.0) == true_phi(3.0));
}

TEST_CASE("DGP covariance") {
  const Eigen::Matrix3d s = dgp_covariance();
  CHECK(s(0, 1) == doctest::Approx(0.3 * 0.3 * 0.3));
  CHECK(s(0, 2) == 0.04);
  CHECK(s(1, 2) == 0.0);
  CHECK(cofactor_det(s) == doctest::Approx(7.713e-5).epsilon(1e-3));
  CHECK(s.llt().info() == Eigen::Success);
}

TEST_CASE("DGP moments on a large sample") {
  // a truncation far outside the support keeps every draw
  const NpivData d = simulate_npiv_dgp(100000, 1e6, 5);
  const Eigen::VectorXd u = d.y - d.z.unaryExpr([](double z) { return true_phi(z); });
  auto cov = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return ((a.array() - a.mean()) * (b.array() - b.mean())).sum() / (a.size() - 1.0);
  };
  const double corr = cov(d.z, d.w) / std::sqrt(cov(d.z, d.z) * cov(d.w, d.w));
  CHECK(std::abs(corr - 0.30) <= 0.01);
  CHECK(std::abs(cov(d.z, u) - 0.04) <= 0.005);
  CHECK(std::abs(cov(d.w, u)) <= 0.005);
}

TEST_CASE("DGP truncation and reproducibility") {
  const NpivData a = simulate_npiv_dgp(500, 0.5, 3);
  CHECK(a.size() == 500);
  CHECK(a.z.cwiseAbs().maxCoeff() <= 0.5);
  CHECK(a.w.cwiseAbs().maxCoeff() <= 0.5);
  const NpivData b = simulate_npiv_dgp(500, 0.5, 3);
  CHECK(a.y == b.y);
  CHECK(a.z == b.z);
  CHECK(simulate_npiv_dgp(500, 0.5, 4).y != a.y);

  const NpivData quiet = simulate_npiv_dgp(200, 1.0, 3, DgpVariant{1.0, true});
  for (Index i = 0; i < quiet.size(); ++i) CHECK(quiet.y[i] == true_phi(quiet.z[i]));
  const NpivData half = simulate_npiv_dgp(200, 1.0, 3, DgpVariant{0.5, true});
  CHECK((half.y - 0.5 * quiet.y).cwiseAbs().maxCoeff() < 1e-15);

  CHECK_THROWS_AS(simulate_npiv_dgp(1, 1.0, 0), Error);
  CHECK_THROWS_AS(simulate_npiv_dgp(10, 0.0, 0), Error);
}

TEST_CASE("presets") {
  const McConfig a = preset("fig1a");
  CHECK(a.n == 1000);
  CHECK(a.alpha == 0.14);
  CHECK(a.h == 1.0);
  CHECK(a.method == BandMethod::gauss);
  CHECK(preset("fig1b").n == 5000);
  CHECK(preset("fig1b").alpha == 0.1);
  CHECK(preset("fig2a").alpha == 0.24);
  CHECK(preset("fig2a").method == BandMethod::concentration);
  const McConfig d = preset("fig2b");
  CHECK(d.n == 5000);
  CHECK(d.alpha == 0.17);
  CHECK(d.h == 0.6);
  CHECK_THROWS_AS(preset("fig3"), Error);
}

TEST_CASE("noiseless replication is covered") {
  McConfig c = preset("fig1a");
  c.n = 5000;
  c.alpha = 0.001;
  c.replications = 1;
  c.variant.zero_noise = true;
  const McReport report = run_coverage(c);
  CHECK(report.replications_used == 1);
  CHECK(report.coverage == 1.0);
  CHECK(report.mean_half_width > 0.0);
}

TEST_CASE("coverage harness") {
  const McConfig c = quick_config();

  SUBCASE("bit-identical reports") {
    const McReport a = run_coverage(c);
    const McReport b = run_coverage(c);
    CHECK(a.coverage == b.coverage);
    CHECK(a.mean_half_width == b.mean_half_width);
    CHECK(a.mean_sup_bias == b.mean_sup_bias);
    CHECK(a.replications_used + a.replications_failed == c.replications);
  }

  SUBCASE("independent of the worker count") {
    const McReport a = run_coverage(c, 1);
    const McReport b = run_coverage(c, 3);
    CHECK(a.coverage == b.coverage);
    CHECK(a.mean_half_width == b.mean_half_width);
    CHECK(a.mean_sup_bias == b.mean_sup_bias);
    const ReplicationOutcome o = run_replication(c, 4);
    CHECK(o.ok);
  }

  SUBCASE("smaller gamma gives wider bands") {
    McConfig wide = c;
    McConfig narrow = c;
    narrow.gamma = 0.32;
    CHECK(run_coverage(wide).mean_half_width > run_coverage(narrow).mean_half_width);
    wide.method = narrow.method = BandMethod::concentration;
    CHECK(run_coverage(wide).mean_half_width > run_coverage(narrow).mean_half_width);
  }

  SUBCASE("coverage is a covered fraction") {
    McConfig lenient = c;
    lenient.c0 = 50.0;
    const McReport r = run_coverage(lenient);
    CHECK(r.coverage == 1.0);
    const McReport s = run_coverage(c);
    CHECK(s.coverage * s.replications_used == doctest::Approx(std::round(s.coverage * s.replications_used)));
  }

  SUBCASE("invalid configurations") {
    McConfig bad = c;
    bad.alpha = 0.0;
    CHECK_THROWS_AS(run_coverage(bad), Error);
    bad = c;
    bad.method = BandMethod::dkw;
    CHECK_THROWS_AS(run_coverage(bad), Error);
  }

  CHECK(replication_seed(0, 1) != replication_seed(0, 2));
  CHECK(replication_seed(1, 1) != replication_seed(0, 1));
}

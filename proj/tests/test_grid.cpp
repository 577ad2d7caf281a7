#include "doctest.h"

#include <cmath>

#include "test_support.hpp"
#include "tikband/grid.hpp"

using namespace tikband;

TEST_CASE("midpoint grids") {
  const Grid g = make_uniform_grid(0.0, 1.0, 2);
  CHECK(g.step() == doctest::Approx(0.5));
  CHECK(g[0] == doctest::Approx(0.25));
  CHECK(g[1] == doctest::Approx(0.75));

  const Grid s = make_uniform_grid(-1.0, 1.0, 4);
  CHECK(s.step() == doctest::Approx(0.5));
  CHECK(s[0] == doctest::Approx(-0.75));
  CHECK(s[1] == doctest::Approx(-0.25));
  CHECK(s[2] == doctest::Approx(0.25));
  CHECK(s[3] == doctest::Approx(0.75));

  const Grid h = make_uniform_grid(0.0, 1.0, 100);
  CHECK(h.size() == 100);
  CHECK(h[0] == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(h[99] == doctest::Approx(0.995).epsilon(1e-12));
  for (Index k = 0; k + 1 < h.size(); ++k) {
    CHECK(h[k + 1] - h[k] == doctest::Approx(h.step()).epsilon(1e-12));
    CHECK(h[k] > h.a());
    CHECK(h[k] < h.b());
  }
}

TEST_CASE("grid construction errors") {
  auto kind_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::io_error;
  };
  CHECK(kind_of([] { make_uniform_grid(1.0, 1.0, 10); }) == ErrorKind::invalid_bounds);
  CHECK(kind_of([] { make_uniform_grid(2.0, 1.0, 10); }) == ErrorKind::invalid_bounds);
  CHECK(kind_of([] { make_uniform_grid(0.0, 1.0, 1); }) == ErrorKind::invalid_count);
}

TEST_CASE("sup and L2 norms") {
  const Grid g(0.0, 1.0, 3);
  CHECK(sup_norm(GridFunction(g, Eigen::Vector3d(0, 0, 0))) == 0.0);
  CHECK(sup_norm(GridFunction(g, Eigen::Vector3d(1, -3, 2))) == 3.0);
  CHECK(sup_norm(GridFunction(g, Eigen::Vector3d::Constant(-2.5))) == 2.5);

  for (Index m : {2, 7, 100}) {
    const Grid gm(0.0, 1.0, m);
    CHECK(l2_norm(GridFunction(gm, Eigen::VectorXd::Ones(m))) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(l2_norm(GridFunction(gm)) == 0.0);
  }
  const Grid fine(0.0, 1.0, 1000);
  const auto id = GridFunction::tabulate(fine, [](double z) { return z; });
  CHECK(std::abs(l2_norm(id) - 1.0 / std::sqrt(3.0)) < 1e-3);
}

TEST_CASE("grid functions reject bad values") {
  const Grid g(0.0, 1.0, 3);
  CHECK_THROWS_AS(GridFunction(g, Eigen::Vector2d(1, 2)), Error);
  CHECK_THROWS_AS(GridFunction(g, Eigen::Vector3d(1, NAN, 2)), Error);
}

TEST_CASE("mixed (2,inf) norm") {
  const Grid g(0.0, 1.0, 100);
  CHECK(mixed_norm_2inf(Eigen::MatrixXd::Ones(100, 100), g) == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::MatrixXd kz(100, 100);
  for (Index k = 0; k < 100; ++k) kz.row(k).setConstant(g[k]);
  CHECK(mixed_norm_2inf(kz, g) == doctest::Approx(0.995).epsilon(1e-12));

  CHECK_THROWS_AS(mixed_norm_2inf(Eigen::MatrixXd::Ones(4, 5), Grid(0.0, 1.0, 4)), Error);
}

TEST_CASE("mixed norm equals the best unit probe of the adjoint") {
  // Oracle: |T* psi|_inf = max_k |dw sum_j k(z_k, w_j) psi_j| over unit-L2 probes psi.
  // The row-aligned probe psi = k(z_k0, .) / |k(z_k0, .)| attains the supremum.
  const Grid gz(0.0, 1.0, 10);
  const Grid gw(-1.0, 2.0, 10);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXd k = test::random_matrix(10, 10, seed, -2.0, 3.0);
    double best = 0.0;
    for (Index k0 = 0; k0 < 10; ++k0) {
      double row_sq = 0.0;
      for (Index j = 0; j < 10; ++j) row_sq += k(k0, j) * k(k0, j) * gw.step();
      for (Index zk = 0; zk < 10; ++zk) {
        double acc = 0.0;
        for (Index j = 0; j < 10; ++j) acc += k(zk, j) * (k(k0, j) / std::sqrt(row_sq)) * gw.step();
        best = std::max(best, std::abs(acc));
      }
    }
    const double mixed = mixed_norm_2inf(k, gw);
    CHECK(std::abs(mixed - best) <= 0.01 * best);

    // Random unit probes never exceed it.
    for (std::uint64_t p = 0; p < 50; ++p) {
      Eigen::VectorXd psi = test::random_vector(10, 1000 * seed + p);
      psi /= std::sqrt(gw.step() * psi.squaredNorm());
      CHECK(((k * psi) * gw.step()).cwiseAbs().maxCoeff() <= mixed * (1 + 1e-12));
    }
  }
}

TEST_CASE("norm properties on random grid functions") {
  std::mt19937_64 eng(7);
  std::uniform_int_distribution<int> msize(2, 60);
  std::uniform_real_distribution<double> scalar(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = scalar(eng);
    const Grid g(a, a + 0.1 + std::abs(scalar(eng)), msize(eng));
    const GridFunction f(g, test::random_vector(g.size(), 31 * trial + 1, -3, 3));
    const double c = scalar(eng);
    const GridFunction cf(g, c * f.values());

    CHECK(l2_norm(f) <= std::sqrt(g.b() - g.a()) * sup_norm(f) * (1 + 1e-12));
    CHECK(sup_norm(cf) == doctest::Approx(std::abs(c) * sup_norm(f)).epsilon(1e-12));
    CHECK(l2_norm(cf) == doctest::Approx(std::abs(c) * l2_norm(f)).epsilon(1e-12));

    const Grid gw(0.0, 1.0 + trial % 3, msize(eng));
    const Eigen::MatrixXd k = test::random_matrix(g.size(), gw.size(), 97 * trial + 3);
    double rows = 0.0;
    for (Index r = 0; r < k.rows(); ++r) rows = std::max(rows, l2_norm(GridFunction(gw, k.row(r).transpose())));
    CHECK(mixed_norm_2inf(k, gw) == doctest::Approx(rows).epsilon(1e-12));
    CHECK(mixed_norm_2inf(Eigen::MatrixXd(c * k), gw) ==
          doctest::Approx(std::abs(c) * mixed_norm_2inf(k, gw)).epsilon(1e-12));
  }
}

TEST_CASE("linear interpolation through midpoints") {
  const Grid g(0.0, 1.0, 4);  // 0.125, 0.375, 0.625, 0.875
  const GridFunction f(g, Eigen::Vector4d(1, 3, 2, 0));
  CHECK(interpolate(f, 0.0) == 1.0);
  CHECK(interpolate(f, 0.125) == 1.0);
  CHECK(interpolate(f, 0.25) == doctest::Approx(2.0));
  CHECK(interpolate(f, 0.5) == doctest::Approx(2.5));
  CHECK(interpolate(f, 0.875) == doctest::Approx(0.0));
  CHECK(interpolate(f, 5.0) == 0.0);
}

TEST_CASE("templated on the scalar type") {
  const GridT<float> g(0.0f, 1.0f, 4);
  const GridFunctionT<float> f(g, Eigen::Vector4f(1, -2, 0, 0));
  CHECK(sup_norm(f) == 2.0f);
  CHECK(l2_norm(f) == doctest::Approx(std::sqrt(0.25 * 5.0)));
}

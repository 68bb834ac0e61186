#include <npslab/error.hpp>
#include <npslab/strip.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace npslab;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(StripGrid, GeometryAndWrap) {
  StripGrid g(17, 8, 2.0);
  EXPECT_DOUBLE_EQ(g.hx(), 0.125);
  EXPECT_DOUBLE_EQ(g.hy(), 0.125);
  EXPECT_DOUBLE_EQ(g.x(16), 2.0);
  EXPECT_EQ(g.jp(7), 0u);
  EXPECT_EQ(g.jm(0), 7u);
  EXPECT_THROW(StripGrid(7, 8, 1.0), InvalidArgument);
  EXPECT_THROW(StripGrid(8, 4, 1.0), InvalidArgument);
  EXPECT_THROW(StripGrid(8, 8, -1.0), InvalidArgument);
}

TEST(StripState, ZerosHasStaggeredShapes) {
  StripGrid g(10, 12, 1.0);
  const auto s = StripState2D::zeros(g);
  EXPECT_EQ(s.c1.rows(), 10u);
  EXPECT_EQ(s.ux.cols(), 12u);
  EXPECT_EQ(s.uy.rows(), 9u);
  EXPECT_EQ(s.pressure.rows(), 9u);
  EXPECT_EQ(s.time, 0.0);
}

TEST(PeriodicStripSolver, MatchesDirectApplication) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const std::size_t m = 11, ny = 12;
  const double hy = 1.0 / ny;
  std::vector<double> lo(m), di(m), up(m), w(m);
  for (std::size_t i = 0; i < m; ++i) {
    lo[i] = -1.0 + 0.2 * U(rng);
    up[i] = -1.0 + 0.2 * U(rng);
    di[i] = 2.5 + 0.2 * U(rng);
    w[i] = 0.5 + 0.4 * U(rng);
  }
  Field2D u(m, ny), f(m, ny);
  for (auto& v : u.data()) v = U(rng);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t jp = (j + 1) % ny, jm = (j + ny - 1) % ny;
      double t = di[i] * u(i, j);
      if (i > 0) t += lo[i] * u(i - 1, j);
      if (i + 1 < m) t += up[i] * u(i + 1, j);
      t += w[i] * (2 * u(i, j) - u(i, jp) - u(i, jm)) / (hy * hy);
      f(i, j) = t;
    }
  }
  PeriodicStripSolver solver(lo, di, up, w, ny, hy);
  solver.solve(f);
  for (std::size_t k = 0; k < u.data().size(); ++k) EXPECT_NEAR(f.data()[k], u.data()[k], 1e-11);
}

TEST(PeriodicStripSolver, EigenvaluesOfPeriodicOperator) {
  const auto lam = periodic_eigenvalues(8, 0.125);
  ASSERT_EQ(lam.size(), 8u);
  EXPECT_EQ(lam[0], 0.0);
  // ordering 0, cos1, sin1, cos2, sin2, ..., Nyquist
  EXPECT_NEAR(lam[1], 4 * 64 * std::pow(std::sin(pi / 8), 2), 1e-12);
  EXPECT_NEAR(lam[2], lam[1], 1e-12);
  EXPECT_NEAR(lam[7], 4 * 64, 1e-12);
}

TEST(PoissonNodes, RecoversDiscreteSolution) {
  StripGrid g(21, 16, 1.5);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field2D u(g.nx, g.ny);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) u(i, j) = i == 0 ? -0.7 : (i + 1 == g.nx ? 0.3 : U(rng));
  }
  const double eps = 0.6;
  auto lap = laplacian_nodes(u, g);
  Field2D rhs(g.nx, g.ny);
  for (std::size_t k = 0; k < rhs.data().size(); ++k) rhs.data()[k] = -eps * lap.data()[k];
  const auto sol = solve_poisson_nodes(rhs, g, eps, -0.7, 0.3);
  for (std::size_t k = 0; k < u.data().size(); ++k) EXPECT_NEAR(sol.data()[k], u.data()[k], 1e-11);
}

TEST(PoissonNodes, SecondOrderOnSmoothSolution) {
  std::vector<double> err;
  for (std::size_t n : {16, 32, 64}) {
    StripGrid g(n + 1, n, 1.0);
    Field2D rhs(g.nx, g.ny), exact(g.nx, g.ny);
    for (std::size_t i = 0; i < g.nx; ++i) {
      for (std::size_t j = 0; j < g.ny; ++j) {
        const double x = g.x(i), y = g.y(j);
        exact(i, j) = x - 1.0 + std::sin(pi * x) * std::cos(2 * pi * y);
        rhs(i, j) = 5 * pi * pi * std::sin(pi * x) * std::cos(2 * pi * y);
      }
    }
    const auto sol = solve_poisson_nodes(rhs, g, 1.0, -1.0, 0.0);
    double e = 0.0;
    for (std::size_t k = 0; k < sol.data().size(); ++k) e = std::max(e, std::abs(sol.data()[k] - exact.data()[k]));
    err.push_back(e);
  }
  EXPECT_GE(std::log2(err[0] / err[1]), 1.9);
  EXPECT_GE(std::log2(err[1] / err[2]), 1.9);
}

TEST(Quadrature, NodesAndGradients) {
  StripGrid g(9, 8, 2.0);
  Field2D f(g.nx, g.ny), c(g.nx, g.ny);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      f(i, j) = g.x(i);
      c(i, j) = std::cos(2 * pi * g.y(j));
    }
  }
  EXPECT_NEAR(integrate_nodes(f, g), 2.0, 1e-14);
  EXPECT_NEAR(integrate_nodes(c, g), 0.0, 1e-14);
  EXPECT_NEAR(gradient_norm_sq(f, g), 2.0, 1e-13);
  Field2D two(g.nx, g.ny, 2.0);
  EXPECT_NEAR(weighted_gradient_norm_sq(f, two, g), 4.0, 1e-13);
}

TEST(Field2D, Extremes) {
  Field2D f(3, 4, 1.0);
  f(1, 2) = -5.0;
  f(2, 3) = 4.0;
  EXPECT_EQ(f.min(), -5.0);
  EXPECT_EQ(f.max(), 4.0);
  EXPECT_EQ(f.max_abs(), 5.0);
  EXPECT_EQ(f.row(1)[2], -5.0);
}

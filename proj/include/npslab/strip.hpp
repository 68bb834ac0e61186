#pragma once

// Two-dimensional periodic strip (0, L) x [0, 1), x bounded, y periodic.
//
// Staggered layout:
//   nodes      (x_i, y_j)            i < nx,     j < ny   c1, c2, phi, ux
//   cells      (x_{i+1/2}, y_j)      i < nx - 1, j < ny   pressure
//   corners    (x_{i+1/2}, y_{j+1/2}) i < nx - 1, j < ny  uy
// with x_i = i hx, hx = L / (nx - 1), y_j = j hy, hy = 1 / ny. Storage is row-major in x:
// index i * ny + j.

#include <npslab/core.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace npslab {

struct StripGrid {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double length = 1.0;

  StripGrid() = default;
  StripGrid(std::size_t nx, std::size_t ny, double length);

  double hx() const { return length / static_cast<double>(nx - 1); }
  double hy() const { return 1.0 / static_cast<double>(ny); }
  double x(std::size_t i) const { return static_cast<double>(i) * hx(); }
  double y(std::size_t j) const { return static_cast<double>(j) * hy(); }
  std::size_t jp(std::size_t j) const { return j + 1 == ny ? 0 : j + 1; }
  std::size_t jm(std::size_t j) const { return j == 0 ? ny - 1 : j - 1; }
};

class Field2D {
 public:
  Field2D() = default;
  Field2D(std::size_t rows, std::size_t cols, double value = 0.0) : rows_(rows), cols_(cols), v_(rows * cols, value) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }
  std::span<double> row(std::size_t i) { return {v_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {v_.data() + i * cols_, cols_}; }
  std::vector<double>& data() { return v_; }
  const std::vector<double>& data() const { return v_; }

  double max() const;
  double min() const;
  double max_abs() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> v_;
};

struct StripState2D {
  StripGrid grid;
  Field2D c1;        ///< nodes
  Field2D c2;        ///< nodes
  Field2D phi;       ///< nodes
  Field2D ux;        ///< nodes; zero on i = 0 and i = nx - 1
  Field2D uy;        ///< corners
  Field2D pressure;  ///< cells
  double time = 0.0;

  static StripState2D zeros(const StripGrid& grid);
  const Field2D& c(int species) const { return species == 0 ? c1 : c2; }
  Field2D& c(int species) { return species == 0 ? c1 : c2; }
};

/// Solves  sum_k T(i,k) u(k,j) + s_i (-D_yy u)(i,j) = f(i,j)  for i < m, j periodic,
/// where T is tridiagonal in x and -D_yy the periodic three-point operator with spacing hy.
/// Each y-mode decouples into a tridiagonal system. A singular mode (T + s lambda_m
/// singular) is made unique by pinning u(0, .) of that mode to zero; the caller must pass
/// a consistent right-hand side.
class PeriodicStripSolver {
 public:
  PeriodicStripSolver() = default;
  PeriodicStripSolver(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                      std::vector<double> yweight, std::size_t ny, double hy, bool pin_zero_mode = false);

  /// In place: rhs (m x ny) is replaced by the solution.
  void solve(Field2D& rhs) const;

  std::size_t rows() const { return diag_.size(); }

 private:
  std::vector<double> lower_, diag_, upper_, yweight_;
  std::size_t ny_ = 0;
  bool pin_ = false;
  std::vector<double> basis_;   // ny x ny orthonormal real Fourier basis, column m = mode m
  std::vector<double> lambda_;  // eigenvalues of -D_yy
};

/// Periodic y eigenvalues of the three-point operator: (4 / hy^2) sin^2(pi m / ny).
std::vector<double> periodic_eigenvalues(std::size_t ny, double hy);

// Discrete norms shared by diagnostics and inequality checks -------------------------

/// Nodal quadrature: trapezoid in x, rectangle (periodic) in y.
double integrate_nodes(const Field2D& f, const StripGrid& grid);

/// Edge-based squared gradient norm: sum over x- and y-edges of (difference / h)^2 hx hy.
double gradient_norm_sq(const Field2D& f, const StripGrid& grid);

/// Edge-based weighted norm sum over edges of w_e (difference / h)^2 hx hy with the edge
/// weight w_e the mean of the nodal weight at its endpoints.
double weighted_gradient_norm_sq(const Field2D& f, const Field2D& weight, const StripGrid& grid);

/// Five-point Laplacian at interior nodes (zero rows at x-boundaries).
Field2D laplacian_nodes(const Field2D& f, const StripGrid& grid);

/// Nodal Poisson solve -eps Lap u = rhs at interior nodes with u(0, .) = left,
/// u(L, .) = right.
Field2D solve_poisson_nodes(const Field2D& rhs, const StripGrid& grid, double eps, double left, double right);

}  // namespace npslab

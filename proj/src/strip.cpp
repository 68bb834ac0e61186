#include <npslab/strip.hpp>
#include <npslab/error.hpp>
#include <npslab/tridiag.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace npslab {

StripGrid::StripGrid(std::size_t nx_, std::size_t ny_, double length_) : nx(nx_), ny(ny_), length(length_) {
  if (nx < 8 || ny < 8) throw InvalidArgument("strip grid sizes must be >= 8");
  if (!(length > 0.0)) throw InvalidArgument("strip length must be positive");
}

double Field2D::max() const { return *std::max_element(v_.begin(), v_.end()); }
double Field2D::min() const { return *std::min_element(v_.begin(), v_.end()); }
double Field2D::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

StripState2D StripState2D::zeros(const StripGrid& grid) {
  StripState2D s;
  s.grid = grid;
  s.c1 = Field2D(grid.nx, grid.ny);
  s.c2 = Field2D(grid.nx, grid.ny);
  s.phi = Field2D(grid.nx, grid.ny);
  s.ux = Field2D(grid.nx, grid.ny);
  s.uy = Field2D(grid.nx - 1, grid.ny);
  s.pressure = Field2D(grid.nx - 1, grid.ny);
  return s;
}

std::vector<double> periodic_eigenvalues(std::size_t ny, double hy) {
  std::vector<double> lam(ny);
  // Column order of the basis: 0, cos 1, sin 1, cos 2, sin 2, ..., [Nyquist].
  for (std::size_t col = 0; col < ny; ++col) {
    const std::size_t m = (col + 1) / 2;
    const double s = std::sin(std::numbers::pi * static_cast<double>(m) / static_cast<double>(ny));
    lam[col] = 4.0 * s * s / (hy * hy);
  }
  return lam;
}

PeriodicStripSolver::PeriodicStripSolver(std::vector<double> lower, std::vector<double> diag,
                                         std::vector<double> upper, std::vector<double> yweight,
                                         std::size_t ny, double hy, bool pin_zero_mode)
    : lower_(std::move(lower)),
      diag_(std::move(diag)),
      upper_(std::move(upper)),
      yweight_(std::move(yweight)),
      ny_(ny),
      pin_(pin_zero_mode) {
  const std::size_t m = diag_.size();
  if (lower_.size() != m || upper_.size() != m || yweight_.size() != m) {
    throw InvalidArgument("PeriodicStripSolver: coefficient length mismatch");
  }
  basis_.assign(ny * ny, 0.0);
  const double n = static_cast<double>(ny);
  for (std::size_t j = 0; j < ny; ++j) {
    basis_[j * ny + 0] = 1.0 / std::sqrt(n);
    for (std::size_t col = 1; col < ny; ++col) {
      const std::size_t k = (col + 1) / 2;
      const double a = 2.0 * std::numbers::pi * static_cast<double>(k * j % ny) / n;
      double v;
      if (ny % 2 == 0 && col == ny - 1) {
        v = (j % 2 == 0 ? 1.0 : -1.0) / std::sqrt(n);
      } else {
        v = std::sqrt(2.0 / n) * (col % 2 == 1 ? std::cos(a) : std::sin(a));
      }
      basis_[j * ny + col] = v;
    }
  }
  lambda_ = periodic_eigenvalues(ny, hy);
}

void PeriodicStripSolver::solve(Field2D& rhs) const {
  const std::size_t m = diag_.size();
  if (rhs.rows() != m || rhs.cols() != ny_) throw InvalidArgument("PeriodicStripSolver: rhs shape mismatch");
  // Forward transform row by row: hat(i, col) = sum_j f(i, j) Q(j, col).
  Field2D hat(ny_, m);  // mode-major for contiguous tridiagonal solves
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t col = 0; col < ny_; ++col) {
      double s = 0.0;
      for (std::size_t j = 0; j < ny_; ++j) s += rhs(i, j) * basis_[j * ny_ + col];
      hat(col, i) = s;
    }
  }
  std::vector<double> lo(m), di(m), up(m);
  for (std::size_t col = 0; col < ny_; ++col) {
    for (std::size_t i = 0; i < m; ++i) {
      lo[i] = lower_[i];
      di[i] = diag_[i] + yweight_[i] * lambda_[col];
      up[i] = upper_[i];
    }
    auto r = hat.row(col);
    if (pin_ && col == 0) {
      di[0] = 1.0;
      up[0] = 0.0;
      r[0] = 0.0;
      if (m > 1) lo[1] = 0.0;
    }
    solve_tridiagonal(lo, di, up, r);
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < ny_; ++j) {
      double s = 0.0;
      for (std::size_t col = 0; col < ny_; ++col) s += basis_[j * ny_ + col] * hat(col, i);
      rhs(i, j) = s;
    }
  }
}

double integrate_nodes(const Field2D& f, const StripGrid& grid) {
  double total = 0.0;
  for (std::size_t i = 0; i < grid.nx; ++i) {
    const double w = (i == 0 || i + 1 == grid.nx) ? 0.5 : 1.0;
    double row = 0.0;
    for (std::size_t j = 0; j < grid.ny; ++j) row += f(i, j);
    total += w * row;
  }
  return total * grid.hx() * grid.hy();
}

double weighted_gradient_norm_sq(const Field2D& f, const Field2D& weight, const StripGrid& grid) {
  const double hx = grid.hx(), hy = grid.hy();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < grid.nx; ++i) {
    for (std::size_t j = 0; j < grid.ny; ++j) {
      if (i + 1 < grid.nx) {
        const double d = f(i + 1, j) - f(i, j);
        sx += 0.5 * (weight(i + 1, j) + weight(i, j)) * d * d;
      }
      const double d = f(i, grid.jp(j)) - f(i, j);
      // boundary rows carry half the y-edge weight, matching the nodal quadrature
      const double w = (i == 0 || i + 1 == grid.nx) ? 0.5 : 1.0;
      sy += w * 0.5 * (weight(i, grid.jp(j)) + weight(i, j)) * d * d;
    }
  }
  return sx * hy / hx + sy * hx / hy;
}

double gradient_norm_sq(const Field2D& f, const StripGrid& grid) {
  return weighted_gradient_norm_sq(f, Field2D(grid.nx, grid.ny, 1.0), grid);
}

Field2D laplacian_nodes(const Field2D& f, const StripGrid& grid) {
  const double ix2 = 1.0 / (grid.hx() * grid.hx());
  const double iy2 = 1.0 / (grid.hy() * grid.hy());
  Field2D out(grid.nx, grid.ny);
  for (std::size_t i = 1; i + 1 < grid.nx; ++i) {
    for (std::size_t j = 0; j < grid.ny; ++j) {
      out(i, j) = (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) * ix2 +
                  (f(i, grid.jp(j)) - 2.0 * f(i, j) + f(i, grid.jm(j))) * iy2;
    }
  }
  return out;
}

Field2D solve_poisson_nodes(const Field2D& rhs, const StripGrid& grid, double eps, double left, double right) {
  const std::size_t m = grid.nx - 2;
  const double a = eps / (grid.hx() * grid.hx());
  PeriodicStripSolver solver(std::vector<double>(m, -a), std::vector<double>(m, 2.0 * a), std::vector<double>(m, -a),
                             std::vector<double>(m, eps), grid.ny, grid.hy());
  Field2D b(m, grid.ny);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < grid.ny; ++j) {
      double v = rhs(i + 1, j);
      if (i == 0) v += a * left;
      if (i + 1 == m) v += a * right;
      b(i, j) = v;
    }
  }
  solver.solve(b);
  Field2D u(grid.nx, grid.ny);
  for (std::size_t j = 0; j < grid.ny; ++j) {
    u(0, j) = left;
    u(grid.nx - 1, j) = right;
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < grid.ny; ++j) u(i + 1, j) = b(i, j);
  }
  return u;
}

}  // namespace npslab

#include <npslab/tridiag.hpp>
#include <npslab/error.hpp>

#include <cmath>
#include <vector>

namespace npslab {

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n) {
    throw InvalidArgument("solve_tridiagonal: inconsistent sizes");
  }
  if (n == 0) return;
  std::vector<double> c(n);
  double b = diag[0];
  if (b == 0.0) throw InvalidArgument("solve_tridiagonal: zero pivot");
  c[0] = upper[0] / b;
  rhs[0] /= b;
  for (std::size_t k = 1; k < n; ++k) {
    b = diag[k] - lower[k] * c[k - 1];
    if (b == 0.0 || !std::isfinite(b)) throw InvalidArgument("solve_tridiagonal: zero pivot");
    c[k] = upper[k] / b;
    rhs[k] = (rhs[k] - lower[k] * rhs[k - 1]) / b;
  }
  for (std::size_t k = n - 1; k-- > 0;) rhs[k] -= c[k] * rhs[k + 1];
}

}  // namespace npslab

#pragma once

#include <cstddef>
#include <span>

namespace npslab {

/// Thomas algorithm for a tridiagonal system. lower[0] and upper[n-1] are ignored.
/// rhs is overwritten with the solution. Assumes no pivoting is required
/// (diagonally dominant or M-matrix systems).
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs);

}  // namespace npslab

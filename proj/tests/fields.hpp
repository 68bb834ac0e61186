#pragma once

// Random positive strip fields with shared boundary traces.

#include <npslab/strip.hpp>

#include <cmath>
#include <numbers>
#include <random>

namespace fields {

struct Pair {
  npslab::Field2D f1, f2, g1, g2;
};

// Smooth low-mode fields plus optional nodal noise; the traces at x = 0 and x = L of f
// and g coincide.
inline Pair random_pair(const npslab::StripGrid& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double pi = std::numbers::pi;
  Pair p{npslab::Field2D(grid.nx, grid.ny), npslab::Field2D(grid.nx, grid.ny), npslab::Field2D(grid.nx, grid.ny),
         npslab::Field2D(grid.nx, grid.ny)};
  npslab::Field2D* all[4] = {&p.f1, &p.f2, &p.g1, &p.g2};
  const double noise = U(rng) < 0.5 ? 0.0 : 0.3 * U(rng);
  for (auto* f : all) {
    const double base = 0.3 + 2.0 * U(rng);
    const double a = 0.25 * base * U(rng), b = 0.25 * base * U(rng);
    const int kx = 1 + static_cast<int>(3 * U(rng)), ky = 1 + static_cast<int>(3 * U(rng));
    const double ph = 2 * pi * U(rng);
    for (std::size_t i = 0; i < grid.nx; ++i) {
      for (std::size_t j = 0; j < grid.ny; ++j) {
        const double x = grid.x(i) / grid.length, y = grid.y(j);
        (*f)(i, j) = base + a * std::sin(kx * pi * x) * std::cos(2 * pi * ky * y + ph) + b * std::cos(pi * x) +
                     noise * base * (U(rng) - 0.5);
      }
    }
  }
  // shared traces
  for (std::size_t j = 0; j < grid.ny; ++j) {
    for (std::size_t i : {std::size_t{0}, grid.nx - 1}) {
      p.g1(i, j) = p.f1(i, j);
      p.g2(i, j) = p.f2(i, j);
    }
  }
  return p;
}

}  // namespace fields

#pragma once

// Shared domain types and one-dimensional discrete calculus.
//
// Valences are fixed: species 1 carries z = +1, species 2 carries z = -1.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace npslab {

inline constexpr std::array<int, 2> kValence{+1, -1};

struct PhysParams {
  double d1 = 1.0;        ///< diffusivity of species 1
  double d2 = 1.0;        ///< diffusivity of species 2
  double eps = 1.0;       ///< rescaled permittivity (Debye length squared)
  double nu = 1.0;        ///< kinematic viscosity
  double coupling = 1.0;  ///< electric body-force coupling K

  double diffusivity(int species) const { return species == 0 ? d1 : d2; }
  double min_diffusivity() const { return d1 < d2 ? d1 : d2; }
  void validate() const;
};

/// Constant Dirichlet data on the strip (0, L) x T. Phi(0) = -V, Phi(L) = 0.
struct StripBC {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double beta1 = 1.0;
  double beta2 = 1.0;
  double voltage = 0.0;
  double length = 1.0;

  double alpha(int species) const { return species == 0 ? alpha1 : alpha2; }
  double beta(int species) const { return species == 0 ? beta1 : beta2; }
  double gamma_lo() const;
  double gamma_hi() const;
  /// Slotboom variable at x = 0: alpha_i exp(-z_i V).
  double eta_left(int species) const;
  double eta_right(int species) const { return beta(species); }
  void validate() const;
};

class Grid1D {
 public:
  /// Equispaced nodes on [0, length].
  static Grid1D uniform(std::size_t n, double length);
  /// tanh-graded nodes clustered at both ends; strength 0 gives the uniform grid.
  static Grid1D graded(std::size_t n, double length, double strength);
  /// Arbitrary strictly increasing nodes starting at 0.
  explicit Grid1D(std::vector<double> nodes);
  Grid1D() = default;  ///< empty placeholder; assign before use

  std::size_t size() const { return nodes_.size(); }
  double length() const { return nodes_.back(); }
  double operator[](std::size_t k) const { return nodes_[k]; }
  std::span<const double> nodes() const { return nodes_; }
  double spacing(std::size_t k) const { return nodes_[k + 1] - nodes_[k]; }
  double min_spacing() const;
  double max_spacing() const;

 private:
  std::vector<double> nodes_;
};

/// Discrete 1D steady state with species currents.
struct SteadyState1D {
  Grid1D grid;
  std::vector<double> c1;
  std::vector<double> c2;
  std::vector<double> phi;
  double j1 = 0.0;
  double j2 = 0.0;

  const std::vector<double>& c(int species) const { return species == 0 ? c1 : c2; }
  double current(int species) const { return species == 0 ? j1 : j2; }
  /// eta_i = c_i exp(z_i Phi)
  std::vector<double> eta(int species) const;
  /// mu_i = log c_i + z_i Phi
  std::vector<double> mu(int species) const;
};

/// One sample on a closed boundary component.
struct CurveSample {
  double s = 0.0;  ///< curve parameter
  double x = 0.0;
  double y = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double w = 0.0;  ///< boundary potential W
};

/// One or more closed components; the last sample of each connects to its first.
struct BoundaryCurve2D {
  std::vector<std::vector<CurveSample>> components;
  static constexpr std::size_t kMinSamples = 16;
  void validate() const;
};

// Discrete calculus ----------------------------------------------------------

/// Second-order derivative: centered three-point interior, one-sided three-point ends.
std::vector<double> gradient_1d(std::span<const double> field, const Grid1D& grid);

/// Composite trapezoid rule over the grid.
double trapezoid(std::span<const double> field, const Grid1D& grid);

/// psi(s) = s log s - s + 1, evaluated without cancellation near s = 1.
double psi(double s);

/// Integral of g psi(f / g) by the trapezoid rule.
double relative_entropy(std::span<const double> f, std::span<const double> g, const Grid1D& grid);

/// exp(a) (exp(b - a) - 1) / (b - a): mean of exp over [a, b] for a linear argument.
double exp_mean(double a, double b);

/// Bernoulli function x / (exp(x) - 1).
double bernoulli(double x);

}  // namespace npslab

#include <npslab/core.hpp>
#include <npslab/error.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace npslab {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string(name) + " must be finite and strictly positive, got " +
                          std::to_string(v));
  }
}

}  // namespace

void PhysParams::validate() const {
  require_positive(d1, "d1");
  require_positive(d2, "d2");
  require_positive(eps, "eps");
  require_positive(nu, "nu");
  require_positive(coupling, "coupling");
}

double StripBC::gamma_lo() const { return std::min({alpha1, alpha2, beta1, beta2}); }
double StripBC::gamma_hi() const { return std::max({alpha1, alpha2, beta1, beta2}); }

double StripBC::eta_left(int species) const {
  return alpha(species) * std::exp(-kValence[species] * voltage);
}

void StripBC::validate() const {
  require_positive(alpha1, "alpha1");
  require_positive(alpha2, "alpha2");
  require_positive(beta1, "beta1");
  require_positive(beta2, "beta2");
  require_positive(length, "length");
  if (!std::isfinite(voltage)) throw InvalidArgument("voltage must be finite");
}

Grid1D::Grid1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 3) throw InvalidArgument("Grid1D needs at least 3 nodes");
  if (nodes_.front() != 0.0) throw InvalidArgument("Grid1D must start at 0");
  for (std::size_t k = 1; k < nodes_.size(); ++k) {
    if (!(nodes_[k] > nodes_[k - 1])) throw InvalidArgument("Grid1D nodes must be strictly increasing");
  }
}

Grid1D Grid1D::uniform(std::size_t n, double length) { return graded(n, length, 0.0); }

Grid1D Grid1D::graded(std::size_t n, double length, double strength) {
  if (n < 3) throw InvalidArgument("Grid1D needs at least 3 nodes");
  require_positive(length, "grid length");
  if (strength < 0.0 || !std::isfinite(strength)) throw InvalidArgument("grading strength must be >= 0");
  std::vector<double> x(n);
  const double last = static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double xi = static_cast<double>(k) / last;
    if (strength == 0.0) {
      x[k] = length * xi;
    } else {
      x[k] = 0.5 * length * (1.0 + std::tanh(strength * (2.0 * xi - 1.0)) / std::tanh(strength));
    }
  }
  x.front() = 0.0;
  x.back() = length;
  return Grid1D(std::move(x));
}

double Grid1D::min_spacing() const {
  double h = spacing(0);
  for (std::size_t k = 1; k + 1 < size(); ++k) h = std::min(h, spacing(k));
  return h;
}

double Grid1D::max_spacing() const {
  double h = spacing(0);
  for (std::size_t k = 1; k + 1 < size(); ++k) h = std::max(h, spacing(k));
  return h;
}

std::vector<double> SteadyState1D::eta(int species) const {
  const auto& cs = c(species);
  std::vector<double> out(cs.size());
  for (std::size_t k = 0; k < cs.size(); ++k) out[k] = cs[k] * std::exp(kValence[species] * phi[k]);
  return out;
}

std::vector<double> SteadyState1D::mu(int species) const {
  const auto& cs = c(species);
  std::vector<double> out(cs.size());
  for (std::size_t k = 0; k < cs.size(); ++k) out[k] = std::log(cs[k]) + kValence[species] * phi[k];
  return out;
}

void BoundaryCurve2D::validate() const {
  if (components.empty()) throw InvalidArgument("boundary curve has no components");
  for (std::size_t c = 0; c < components.size(); ++c) {
    const auto& comp = components[c];
    if (comp.size() < kMinSamples) {
      throw InvalidArgument("boundary component " + std::to_string(c) + " has " +
                            std::to_string(comp.size()) + " samples; at least 16 required");
    }
    // A repeated first sample at the end means the caller closed it explicitly; we require
    // the implicit closure instead so that no segment has zero length.
    const auto& a = comp.front();
    const auto& b = comp.back();
    if (a.x == b.x && a.y == b.y) {
      throw InvalidArgument("boundary component " + std::to_string(c) +
                            " repeats its first point; closure is implicit");
    }
    for (std::size_t k = 0; k < comp.size(); ++k) {
      const auto& p = comp[k];
      const auto& q = comp[(k + 1) % comp.size()];
      if (p.x == q.x && p.y == q.y) {
        throw InvalidArgument("boundary component " + std::to_string(c) + " has a degenerate segment");
      }
    }
  }
}

std::vector<double> gradient_1d(std::span<const double> f, const Grid1D& grid) {
  const std::size_t n = grid.size();
  if (f.size() != n) {
    throw InvalidArgument("gradient_1d: field has " + std::to_string(f.size()) + " values, grid has " +
                          std::to_string(n));
  }
  std::vector<double> d(n);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double h1 = grid.spacing(k - 1);
    const double h2 = grid.spacing(k);
    d[k] = -h2 / (h1 * (h1 + h2)) * f[k - 1] + (h2 - h1) / (h1 * h2) * f[k] + h1 / (h2 * (h1 + h2)) * f[k + 1];
  }
  {
    const double h1 = grid.spacing(0);
    const double h2 = grid.spacing(1);
    d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] -
           h1 / (h2 * (h1 + h2)) * f[2];
  }
  {
    const double h1 = grid.spacing(n - 3);
    const double h2 = grid.spacing(n - 2);
    d[n - 1] = h2 / (h1 * (h1 + h2)) * f[n - 3] - (h1 + h2) / (h1 * h2) * f[n - 2] +
               (2.0 * h2 + h1) / (h2 * (h1 + h2)) * f[n - 1];
  }
  return d;
}

double trapezoid(std::span<const double> f, const Grid1D& grid) {
  if (f.size() != grid.size()) throw InvalidArgument("trapezoid: size mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < f.size(); ++k) sum += 0.5 * grid.spacing(k) * (f[k] + f[k + 1]);
  return sum;
}

double psi(double s) {
  const double t = s - 1.0;
  if (std::abs(t) < 1e-2) {
    // (1 + t) log(1 + t) - t = sum_{n >= 2} (-1)^n t^n / (n (n - 1))
    double term = t * t;
    double sum = 0.0;
    for (int n = 2; n <= 10; ++n) {
      sum += ((n % 2 == 0) ? 1.0 : -1.0) * term / (n * (n - 1.0));
      term *= t;
    }
    return sum;
  }
  if (s == 0.0) return 1.0;
  return s * std::log(s) - t;
}

double relative_entropy(std::span<const double> f, std::span<const double> g, const Grid1D& grid) {
  if (f.size() != grid.size() || g.size() != grid.size()) {
    throw InvalidArgument("relative_entropy: size mismatch");
  }
  std::vector<double> integrand(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!(f[k] > 0.0) || !(g[k] > 0.0)) {
      throw InvalidArgument("relative_entropy: fields must be strictly positive (node " + std::to_string(k) + ")");
    }
    integrand[k] = g[k] * psi(f[k] / g[k]);
  }
  return trapezoid(integrand, grid);
}

double exp_mean(double a, double b) {
  const double d = b - a;
  if (d == 0.0) return std::exp(a);
  return std::exp(a) * std::expm1(d) / d;
}

double bernoulli(double x) {
  if (x == 0.0) return 1.0;
  return x / std::expm1(x);
}

}  // namespace npslab

#include <npslab/flowcheck.hpp>
#include <npslab/error.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace npslab {

namespace {

bool equispaced_parameter(const std::vector<CurveSample>& comp) {
  const std::size_t n = comp.size();
  const double ds = comp[1].s - comp[0].s;
  if (!(ds > 0.0)) return false;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (std::abs((comp[k + 1].s - comp[k].s) - ds) > 1e-9 * ds) return false;
  }
  return true;
}

// Derivative with respect to the normalized parameter phi in [0, 2 pi), Nyquist mode dropped.
std::vector<double> fourier_derivative(const std::vector<double>& g) {
  const std::size_t n = g.size();
  const std::size_t modes = (n % 2 == 0) ? n / 2 - 1 : (n - 1) / 2;
  std::vector<double> cos_table(n), sin_table(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    cos_table[k] = std::cos(a);
    sin_table[k] = std::sin(a);
  }
  std::vector<double> d(n, 0.0);
  for (std::size_t m = 1; m <= modes; ++m) {
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t idx = (m * k) % n;
      a += g[k] * cos_table[idx];
      b += g[k] * sin_table[idx];
    }
    a *= 2.0 / static_cast<double>(n);
    b *= 2.0 / static_cast<double>(n);
    const double mm = static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t idx = (m * k) % n;
      d[k] += mm * (b * cos_table[idx] - a * sin_table[idx]);
    }
  }
  return d;
}

double total_variation(const std::vector<double>& v) {
  double tv = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) tv += std::abs(v[(k + 1) % v.size()] - v[k]);
  return tv;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

FlowIndicator flow_indicator(const BoundaryCurve2D& curve, double tol) {
  curve.validate();
  FlowIndicator out;
  double scale = 0.0;
  for (const auto& comp : curve.components) {
    const std::size_t n = comp.size();
    std::vector<double> f(n), w(n);
    for (std::size_t k = 0; k < n; ++k) {
      f[k] = comp[k].gamma1 - comp[k].gamma2;
      w[k] = comp[k].w;
    }
    ComponentIntegrals ci;
    if (equispaced_parameter(comp)) {
      ci.spectral = true;
      const auto dw = fourier_derivative(w);
      const auto df = fourier_derivative(f);
      const double dphi = 2.0 * std::numbers::pi / static_cast<double>(n);
      for (std::size_t k = 0; k < n; ++k) {
        ci.i1 += f[k] * dw[k] * dphi;
        ci.i2 += w[k] * df[k] * dphi;
      }
    } else {
      // Centered difference across each segment, weighted by the segment: a midpoint
      // Stieltjes sum whose two integrals cancel exactly on a closed curve.
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t k1 = (k + 1) % n;
        ci.i1 += 0.5 * (f[k] + f[k1]) * (w[k1] - w[k]);
        ci.i2 += 0.5 * (w[k] + w[k1]) * (f[k1] - f[k]);
      }
    }
    out.i1 += ci.i1;
    out.i2 += ci.i2;
    out.components.push_back(ci);
    scale += max_abs(f) * total_variation(w) + max_abs(w) * total_variation(f);
  }
  out.tolerance = tol >= 0.0 ? tol : 1e-10 * scale;
  out.predicts_flow = std::abs(out.i1) > out.tolerance || std::abs(out.i2) > out.tolerance;
  return out;
}

BoundaryCurve2D read_curve(std::istream& in) {
  BoundaryCurve2D curve;
  std::vector<CurveSample> current;
  std::string line;
  std::size_t lineno = 0;
  auto flush = [&] {
    if (!current.empty()) curve.components.push_back(std::move(current));
    current.clear();
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
      flush();
      continue;
    }
    if (line[first] == '#') continue;
    std::istringstream ss(line);
    CurveSample p;
    if (!(ss >> p.s >> p.x >> p.y >> p.gamma1 >> p.gamma2 >> p.w)) {
      throw IoError("curve line " + std::to_string(lineno) + ": expected 6 numbers (s x y gamma1 gamma2 w)");
    }
    std::string rest;
    if (ss >> rest) throw IoError("curve line " + std::to_string(lineno) + ": trailing content '" + rest + "'");
    current.push_back(p);
  }
  flush();
  return curve;
}

BoundaryCurve2D read_curve_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open curve file '" + path + "'");
  return read_curve(in);
}

void write_curve(std::ostream& out, const BoundaryCurve2D& curve) {
  out << "# s x y gamma1 gamma2 w\n" << std::setprecision(17);
  for (std::size_t c = 0; c < curve.components.size(); ++c) {
    if (c > 0) out << '\n';
    for (const auto& p : curve.components[c]) {
      out << p.s << ' ' << p.x << ' ' << p.y << ' ' << p.gamma1 << ' ' << p.gamma2 << ' ' << p.w << '\n';
    }
  }
}

}  // namespace npslab

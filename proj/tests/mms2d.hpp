#pragma once

// Manufactured solution on the strip (0, 1) x [0, 1) with hand-derived source terms.
// Every field is (steady profile) + T(t) * (smooth perturbation); u comes from the
// stream function C T sin^2(pi x) sin(2 pi y), so it is solenoidal and vanishes on walls.

#include <npslab/evolve.hpp>

#include <cmath>
#include <numbers>

namespace mms {

struct Strip {
  npslab::PhysParams params{1.0, 0.7, 0.8, 1.0, 1.0};
  npslab::StripBC bc{1.0, 1.2, 1.5, 0.8, 0.4, 1.0};
  double A = 0.3, B = 0.2, C = 0.05;
  bool time_dependent = false;

  static constexpr double pi = std::numbers::pi;

  double T(double t) const { return time_dependent ? 1.0 + 0.5 * std::sin(2.0 * t) : 1.0; }
  double dT(double t) const { return time_dependent ? std::cos(2.0 * t) : 0.0; }

  // profile shapes in y for the two species
  static double g1(double y) { return 1.0 + 0.5 * std::cos(2 * pi * y); }
  static double g2(double y) { return 1.0 + 0.5 * std::sin(2 * pi * y); }

  double c(int s, double x, double y, double t) const {
    const double a = bc.alpha(s), b = bc.beta(s);
    return a + (b - a) * x + A * T(t) * std::sin(pi * x) * (s == 0 ? g1(y) : g2(y));
  }
  double phi(double x, double y, double t) const {
    return -bc.voltage * (1.0 - x) + B * T(t) * std::sin(pi * x) * std::cos(2 * pi * y);
  }
  double ux(double x, double y, double t) const {
    const double s = std::sin(pi * x);
    return 2 * pi * C * T(t) * s * s * std::cos(2 * pi * y);
  }
  double uy(double x, double y, double t) const {
    return -pi * C * T(t) * std::sin(2 * pi * x) * std::sin(2 * pi * y);
  }

  double source_c(int s, double x, double y, double t) const {
    const double z = npslab::kValence[s];
    const double D = params.diffusivity(s);
    const double a = bc.alpha(s), b = bc.beta(s);
    const double S = std::sin(pi * x), Cx = std::cos(pi * x);
    const double sy = std::sin(2 * pi * y), cy = std::cos(2 * pi * y);
    const double g = s == 0 ? g1(y) : g2(y);
    const double gy = s == 0 ? -pi * sy : pi * cy;
    const double gyy = s == 0 ? -2 * pi * pi * cy : -2 * pi * pi * sy;
    const double Tt = T(t);
    const double cv = c(s, x, y, t);
    const double cx = (b - a) + A * Tt * pi * Cx * g;
    const double cyv = A * Tt * S * gy;
    const double lap_c = -A * Tt * pi * pi * S * g + A * Tt * S * gyy;
    const double px = bc.voltage + B * Tt * pi * Cx * cy;
    const double py = -2 * pi * B * Tt * S * sy;
    const double lap_p = -5 * pi * pi * B * Tt * S * cy;
    const double ct = A * dT(t) * S * g;
    const double adv = ux(x, y, t) * cx + uy(x, y, t) * cyv;
    return ct + adv - D * (lap_c + z * (cx * px + cyv * py + cv * lap_p));
  }
  double source_phi(double x, double y, double t) const {
    const double lap_p = -5 * pi * pi * B * T(t) * std::sin(pi * x) * std::cos(2 * pi * y);
    return -params.eps * lap_p - (c(0, x, y, t) - c(1, x, y, t));
  }
  double source_ux(double x, double y, double t) const {
    const double Tt = T(t);
    const double S = std::sin(pi * x);
    const double cy = std::cos(2 * pi * y);
    const double lap = 2 * pi * C * Tt * cy * (2 * pi * pi * std::cos(2 * pi * x) - 4 * pi * pi * S * S);
    const double ut = 2 * pi * C * dT(t) * S * S * cy;
    const double rho = c(0, x, y, t) - c(1, x, y, t);
    const double px = bc.voltage + B * Tt * pi * std::cos(pi * x) * cy;
    return ut - params.nu * lap + params.coupling * rho * px;
  }
  double source_uy(double x, double y, double t) const {
    const double Tt = T(t);
    const double s2x = std::sin(2 * pi * x), sy = std::sin(2 * pi * y);
    const double lap = 8 * pi * pi * pi * C * Tt * s2x * sy;
    const double ut = -pi * C * dT(t) * s2x * sy;
    const double rho = c(0, x, y, t) - c(1, x, y, t);
    const double py = -2 * pi * B * Tt * std::sin(pi * x) * sy;
    return ut - params.nu * lap + params.coupling * rho * py;
  }

  npslab::Sources2D sources() const {
    npslab::Sources2D s;
    s.c1 = [this](double x, double y, double t) { return source_c(0, x, y, t); };
    s.c2 = [this](double x, double y, double t) { return source_c(1, x, y, t); };
    s.phi = [this](double x, double y, double t) { return source_phi(x, y, t); };
    s.ux = [this](double x, double y, double t) { return source_ux(x, y, t); };
    s.uy = [this](double x, double y, double t) { return source_uy(x, y, t); };
    return s;
  }

  /// Exact fields sampled on the staggered grid at time t (pressure left at zero).
  npslab::StripState2D exact(const npslab::StripGrid& g, double t) const {
    auto st = npslab::StripState2D::zeros(g);
    st.time = t;
    for (std::size_t i = 0; i < g.nx; ++i) {
      for (std::size_t j = 0; j < g.ny; ++j) {
        const double x = g.x(i), y = g.y(j);
        st.c1(i, j) = c(0, x, y, t);
        st.c2(i, j) = c(1, x, y, t);
        st.phi(i, j) = phi(x, y, t);
        st.ux(i, j) = ux(x, y, t);
        if (i + 1 < g.nx) st.uy(i, j) = uy(x + 0.5 * g.hx(), y + 0.5 * g.hy(), t);
      }
    }
    return st;
  }

  npslab::EvolveConfig config(std::size_t nx, std::size_t ny, double dt, double t_end) const {
    npslab::EvolveConfig cfg;
    cfg.params = params;
    cfg.bc = bc;
    cfg.nx = nx;
    cfg.ny = ny;
    cfg.dt = dt;
    cfg.t_end = t_end;
    return cfg;
  }
};

inline double max_diff(const npslab::Field2D& a, const npslab::Field2D& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

/// Max nodal error over c1, c2, phi, ux, uy.
inline double state_error(const npslab::StripState2D& a, const npslab::StripState2D& b) {
  return std::max({max_diff(a.c1, b.c1), max_diff(a.c2, b.c2), max_diff(a.phi, b.phi), max_diff(a.ux, b.ux),
                   max_diff(a.uy, b.uy)});
}

}  // namespace mms

#pragma once

// Boundary-integral test for nonzero steady flow on a planar domain.
//
// For each closed component (traversed with the domain on the left), with
// f = gamma1 - gamma2 and the tangential derivative d/ds:
//   i1 = sum over components of  closed-int f dW/ds ds
//   i2 = sum over components of  closed-int W df/ds ds
// A nonzero value of either integral rules out a motionless steady state.

#include <npslab/core.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace npslab {

struct ComponentIntegrals {
  double i1 = 0.0;
  double i2 = 0.0;
  bool spectral = false;  ///< Fourier differentiation used (equispaced parameter)
};

struct FlowIndicator {
  double i1 = 0.0;
  double i2 = 0.0;
  bool predicts_flow = false;
  double tolerance = 0.0;
  std::vector<ComponentIntegrals> components;
};

/// tol < 0 selects the default 1e-10 times the integrand scale
/// max|f| TV(W) + max|W| TV(f), summed over components.
FlowIndicator flow_indicator(const BoundaryCurve2D& curve, double tol = -1.0);

/// Columnar text table "s x y gamma1 gamma2 w"; blank lines separate components and
/// lines starting with '#' are comments.
BoundaryCurve2D read_curve(std::istream& in);
BoundaryCurve2D read_curve_file(const std::string& path);
void write_curve(std::ostream& out, const BoundaryCurve2D& curve);

}  // namespace npslab

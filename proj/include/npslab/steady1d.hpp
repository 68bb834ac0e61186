#pragma once

// One-dimensional steady Nernst-Planck-Poisson boundary value problem.
//
// The transport equations are written in Slotboom form, e^{-z Phi} d(eta)/dx = j, and
// discretized with exponentially fitted (Scharfetter-Gummel) cell fluxes: on each cell
// the exact integral of e^{z Phi} for a piecewise-linear Phi is used. For a frozen
// potential the eta-step is therefore exact. Poisson uses the standard three-point
// stencil on the (possibly graded) grid.

#include <npslab/core.hpp>

#include <cstddef>
#include <vector>

namespace npslab {

struct GummelOptions {
  int max_outer = 500;
  double outer_tol = 1e-12;   ///< sup-norm of the Phi update
  double newton_tol = 1e-10;  ///< sup-norm of the pointwise Poisson residual
  int newton_max = 50;
  double damping = 1.0;       ///< initial Newton step fraction in (0, 1]
  int max_continuation = 8;   ///< depth of automatic halving of V on inner divergence
  void validate() const;
};

/// Optional nodal source terms appended to the three steady equations:
///   d/dx(dc_i/dx + z_i c_i dPhi/dx) = s_i,   -eps Phi'' - (c1 - c2) = s_phi.
struct SteadySources {
  std::vector<double> s1;
  std::vector<double> s2;
  std::vector<double> sphi;
};

struct SteadySolveInfo {
  int outer_iterations = 0;
  int newton_iterations = 0;
  int continuation_levels = 0;
  double last_update = 0.0;
};

struct SteadyResult {
  SteadyState1D state;
  SteadySolveInfo info;
};

/// Gummel iteration: exact Slotboom update for a frozen potential, then damped Newton on
/// -eps Phi'' = eta1 e^{-Phi} - eta2 e^{Phi}. Falls back to continuation in V when Newton
/// fails to reduce the residual.
SteadyResult solve_steady_1d(const PhysParams& params, const StripBC& bc, const Grid1D& grid,
                             const GummelOptions& opts = {}, const SteadySources* sources = nullptr);

/// Same, starting from a supplied potential (boundary values are overwritten).
SteadyResult solve_steady_1d_from(const PhysParams& params, const StripBC& bc, const Grid1D& grid,
                                  const GummelOptions& opts, std::vector<double> phi0,
                                  const SteadySources* sources = nullptr);

struct CurrentsReport {
  double j1 = 0.0;
  double j2 = 0.0;
  /// max over interior nodes of |dc_i/dx + z_i c_i dPhi/dx - j_i|
  double flux_deviation1 = 0.0;
  double flux_deviation2 = 0.0;
};

/// Quotient formula j_i = (eta_i(L) - eta_i(0)) / int e^{z_i Phi}, plus the deviation of
/// the nodal flux from j_i.
CurrentsReport currents(const SteadyState1D& state);

struct BoundsReport {
  double lambda1 = 0.0, lambda2 = 0.0;
  double Lambda1 = 0.0, Lambda2 = 0.0;
  double v_lo = 0.0, v_hi = 0.0;
  double gamma_lo = 0.0, gamma_hi = 0.0;
  double slack_eta = 0.0;  ///< min over nodes of lambda_i <= eta_i <= Lambda_i slack
  double slack_phi = 0.0;  ///< min over nodes of v_lo <= Phi <= v_hi slack
  double slack_c = 0.0;    ///< min over nodes of gamma_lo <= c_i <= gamma_hi slack
  double worst_violation = 0.0;  ///< min of the three slacks
  double slack_eta_left = 0.0;   ///< eta slack at x = 0
  double slack_eta_right = 0.0;  ///< eta slack at x = L
};

/// Bound constants that depend on boundary data only.
BoundsReport bound_constants(const StripBC& bc);

BoundsReport check_bounds(const SteadyState1D& state, const StripBC& bc);

struct SteadyResidual {
  double r1 = 0.0;
  double r2 = 0.0;
  double rphi = 0.0;
};

/// Sup-norm residuals of the discrete steady equations at interior nodes, in pointwise
/// (per unit length) scaling. Sources, if given, are subtracted.
SteadyResidual residual_steady(const SteadyState1D& state, const PhysParams& params,
                               const SteadySources* sources = nullptr);

/// Scharfetter-Gummel cell flux dc/dx + z c dPhi/dx between two nodes.
double sg_flux(double c_left, double c_right, double phi_left, double phi_right, int z, double h);

}  // namespace npslab

#pragma once

// Explicit stability constants for one-dimensional steady currents on the strip.
//
//   G_i       = sqrt( (1/D) (D_i gh^2 / (2 gl^4) + K L^2 gh^2 / (nu gl^3)) )
//   M_i^d     = D_i gh_d / (2 gl_d gl^2) + K L^2 gh_d / (nu gl^2)
//   kappa_i^d = D gl_d / (2 gh_d L^2) - M_i^d j_i^2
//   kappa^d   = min(kappa_1^d, kappa_2^d, nu / (2 L^2))
//
// with gl, gh the extreme boundary concentrations, gl_d = gl - d, gh_d = gh + d, D = min D_i.
// The weak-current condition is max_i |j_i| L G_i < 1/sqrt(2).

#include <npslab/core.hpp>

#include <array>
#include <vector>

namespace npslab {

inline constexpr double kWeakCurrentThreshold = 0.70710678118654752440;  // 1/sqrt(2)

struct CriterionConstants {
  double g1 = 0.0;
  double g2 = 0.0;
};

CriterionConstants criterion_constants(const PhysParams& params, const StripBC& bc);

struct DecayRate {
  double delta = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double kappa = 0.0;
};

/// Requires 0 <= delta < gamma_lo.
DecayRate decay_rate(const PhysParams& params, const StripBC& bc, double j1, double j2, double delta);

/// kappa^d on the grid d = 0, 0.05 gl, ..., 0.5 gl (11 points).
std::vector<DecayRate> decay_rate_scan(const PhysParams& params, const StripBC& bc, double j1, double j2);

struct SufficientConditions {
  double log_lhs1 = 0.0;
  double log_lhs2 = 0.0;
  double exp_lhs1 = 0.0;
  double exp_lhs2 = 0.0;
  bool log_form_ok = false;
  bool exp_form_ok = false;
};

/// Boundary-data-only conditions implying the weak-current condition. Derived from
/// j_i = (mu_i(L) - mu_i(0)) / int 1/c_i and j_i = (eta_i(L) - eta_i(0)) / int e^{z_i Phi},
/// bounded with the a-priori concentration and potential bounds.
SufficientConditions sufficient_boundary_conditions(const PhysParams& params, const StripBC& bc);

struct StabilityReport {
  double g1 = 0.0, g2 = 0.0;
  double j1 = 0.0, j2 = 0.0;
  double lhs1 = 0.0, lhs2 = 0.0;  ///< |j_i| L G_i
  double margin = 0.0;            ///< 1/sqrt(2) - max(lhs1, lhs2)
  bool weak_current_ok = false;
  double m1_delta = 0.0, m2_delta = 0.0;
  double kappa1_delta = 0.0, kappa2_delta = 0.0, kappa_delta = 0.0;
  double kappa_fluid = 0.0;  ///< nu / (2 L^2)
  double delta_used = 0.0;
  SufficientConditions sufficient;
  bool suff_log_ok = false;
  bool suff_exp_ok = false;
  std::vector<DecayRate> scan;
};

/// Fills the criterion fields only (g, lhs, margin, weak_current_ok).
StabilityReport weak_current_check(const PhysParams& params, const StripBC& bc, double j1, double j2);

/// Full report: criterion, decay constants at the delta maximizing kappa^d over the scan
/// grid, and the sufficient conditions.
StabilityReport stability_report(const PhysParams& params, const StripBC& bc, double j1, double j2);

}  // namespace npslab

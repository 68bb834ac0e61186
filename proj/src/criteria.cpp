#include <npslab/criteria.hpp>
#include <npslab/error.hpp>
#include <npslab/steady1d.hpp>

#include <algorithm>
#include <cmath>

namespace npslab {

CriterionConstants criterion_constants(const PhysParams& params, const StripBC& bc) {
  params.validate();
  bc.validate();
  const double gl = bc.gamma_lo();
  const double gh = bc.gamma_hi();
  const double L = bc.length;
  const double dmin = params.min_diffusivity();
  auto g = [&](double di) {
    const double a = di * gh * gh / (2.0 * std::pow(gl, 4));
    const double b = params.coupling * L * L * gh * gh / (params.nu * std::pow(gl, 3));
    return std::sqrt((a + b) / dmin);
  };
  return {g(params.d1), g(params.d2)};
}

DecayRate decay_rate(const PhysParams& params, const StripBC& bc, double j1, double j2, double delta) {
  params.validate();
  bc.validate();
  const double gl = bc.gamma_lo();
  if (!(delta >= 0.0) || !(delta < gl)) {
    throw InvalidArgument("decay_rate: delta must satisfy 0 <= delta < gamma_lo");
  }
  const double gh = bc.gamma_hi();
  const double gl_d = gl - delta;
  const double gh_d = gh + delta;
  const double L = bc.length;
  const double base = params.min_diffusivity() * gl_d / (2.0 * gh_d * L * L);
  auto m = [&](double di) {
    return di * gh_d / (2.0 * gl_d * gl * gl) + params.coupling * L * L * gh_d / (params.nu * gl * gl);
  };
  DecayRate r;
  r.delta = delta;
  r.m1 = m(params.d1);
  r.m2 = m(params.d2);
  r.kappa1 = base - r.m1 * j1 * j1;
  r.kappa2 = base - r.m2 * j2 * j2;
  r.kappa = std::min({r.kappa1, r.kappa2, params.nu / (2.0 * L * L)});
  return r;
}

std::vector<DecayRate> decay_rate_scan(const PhysParams& params, const StripBC& bc, double j1, double j2) {
  std::vector<DecayRate> out;
  const double gl = bc.gamma_lo();
  for (int k = 0; k <= 10; ++k) out.push_back(decay_rate(params, bc, j1, j2, 0.05 * k * gl));
  return out;
}

SufficientConditions sufficient_boundary_conditions(const PhysParams& params, const StripBC& bc) {
  const auto g = criterion_constants(params, bc);
  const auto bounds = bound_constants(bc);
  const double V = bc.voltage;
  const double gh = bc.gamma_hi();
  SufficientConditions s;
  // mu_i(L) - mu_i(0) = log(beta_i / alpha_i) + z_i V
  s.log_lhs1 = std::abs(std::log(bc.beta1 / bc.alpha1) + V) * gh * g.g1;
  s.log_lhs2 = std::abs(std::log(bc.beta2 / bc.alpha2) - V) * gh * g.g2;
  // eta_i(L) - eta_i(0) = beta_i - alpha_i e^{-z_i V}; Phi in [-v, V_hi]
  s.exp_lhs1 = std::abs(bc.beta1 - bc.alpha1 * std::exp(-V)) * std::exp(-bounds.v_lo) * g.g1;
  s.exp_lhs2 = std::abs(bc.beta2 - bc.alpha2 * std::exp(V)) * std::exp(bounds.v_hi) * g.g2;
  s.log_form_ok = s.log_lhs1 < kWeakCurrentThreshold && s.log_lhs2 < kWeakCurrentThreshold;
  s.exp_form_ok = s.exp_lhs1 < kWeakCurrentThreshold && s.exp_lhs2 < kWeakCurrentThreshold;
  return s;
}

StabilityReport weak_current_check(const PhysParams& params, const StripBC& bc, double j1, double j2) {
  const auto g = criterion_constants(params, bc);
  StabilityReport r;
  r.g1 = g.g1;
  r.g2 = g.g2;
  r.j1 = j1;
  r.j2 = j2;
  r.lhs1 = std::abs(j1) * bc.length * g.g1;
  r.lhs2 = std::abs(j2) * bc.length * g.g2;
  r.margin = kWeakCurrentThreshold - std::max(r.lhs1, r.lhs2);
  r.weak_current_ok = std::max(r.lhs1, r.lhs2) < kWeakCurrentThreshold;
  return r;
}

StabilityReport stability_report(const PhysParams& params, const StripBC& bc, double j1, double j2) {
  StabilityReport r = weak_current_check(params, bc, j1, j2);
  r.scan = decay_rate_scan(params, bc, j1, j2);
  const auto best = std::max_element(r.scan.begin(), r.scan.end(),
                                     [](const DecayRate& a, const DecayRate& b) { return a.kappa < b.kappa; });
  r.delta_used = best->delta;
  r.m1_delta = best->m1;
  r.m2_delta = best->m2;
  r.kappa1_delta = best->kappa1;
  r.kappa2_delta = best->kappa2;
  r.kappa_delta = best->kappa;
  r.kappa_fluid = params.nu / (2.0 * bc.length * bc.length);
  r.sufficient = sufficient_boundary_conditions(params, bc);
  r.suff_log_ok = r.sufficient.log_form_ok;
  r.suff_exp_ok = r.sufficient.exp_form_ok;
  return r;
}

}  // namespace npslab

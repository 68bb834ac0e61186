#include <npslab/steady1d.hpp>
#include <npslab/error.hpp>
#include <npslab/tridiag.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace npslab {

void GummelOptions::validate() const {
  if (max_outer < 1 || newton_max < 1) throw InvalidArgument("iteration caps must be >= 1");
  if (!(outer_tol > 0.0) || !(newton_tol > 0.0)) throw InvalidArgument("tolerances must be positive");
  if (!(damping > 0.0) || damping > 1.0) throw InvalidArgument("damping must lie in (0, 1]");
  if (max_continuation < 0) throw InvalidArgument("max_continuation must be >= 0");
}

double sg_flux(double c_left, double c_right, double phi_left, double phi_right, int z, double h) {
  const double d = z * (phi_right - phi_left);
  return (bernoulli(-d) * c_right - bernoulli(d) * c_left) / h;
}

namespace {

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double control_volume(const Grid1D& grid, std::size_t k) {
  return 0.5 * (grid.spacing(k - 1) + grid.spacing(k));
}

struct SlotboomProfile {
  std::vector<double> eta;
  double j = 0.0;
};

// Exact eta for a frozen piecewise-linear potential, including optional sources.
SlotboomProfile slotboom_update(const Grid1D& grid, const std::vector<double>& phi, int z, double eta_left,
                                double eta_right, const std::vector<double>* source) {
  const std::size_t n = grid.size();
  std::vector<double> weight(n - 1);
  std::vector<double> accumulated(n - 1, 0.0);
  double total = 0.0;
  double weighted_source = 0.0;
  double q = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (source != nullptr && k >= 1) q += (*source)[k] * control_volume(grid, k);
    weight[k] = grid.spacing(k) * exp_mean(z * phi[k], z * phi[k + 1]);
    accumulated[k] = q;
    total += weight[k];
    weighted_source += weight[k] * q;
  }
  SlotboomProfile out;
  out.j = (eta_right - eta_left - weighted_source) / total;
  out.eta.resize(n);
  out.eta[0] = eta_left;
  for (std::size_t k = 0; k + 1 < n; ++k) out.eta[k + 1] = out.eta[k] + weight[k] * (out.j + accumulated[k]);
  out.eta[n - 1] = eta_right;
  return out;
}

std::vector<double> poisson_residual(const Grid1D& grid, double eps, const std::vector<double>& phi,
                                     const std::vector<double>& eta1, const std::vector<double>& eta2,
                                     const std::vector<double>* sphi) {
  const std::size_t n = grid.size();
  std::vector<double> r(n, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double hl = grid.spacing(k - 1);
    const double hr = grid.spacing(k);
    const double lap = 2.0 / (hl + hr) * ((phi[k + 1] - phi[k]) / hr - (phi[k] - phi[k - 1]) / hl);
    r[k] = -eps * lap - (eta1[k] * std::exp(-phi[k]) - eta2[k] * std::exp(phi[k]));
    if (sphi != nullptr) r[k] -= (*sphi)[k];
  }
  return r;
}

// Damped Newton for the frozen-eta nonlinear Poisson problem. Returns iterations used.
int newton_poisson(const Grid1D& grid, double eps, std::vector<double>& phi, const std::vector<double>& eta1,
                   const std::vector<double>& eta2, const std::vector<double>* sphi, const GummelOptions& opts) {
  const std::size_t n = grid.size();
  const std::size_t m = n - 2;
  std::vector<double> lower(m), diag(m), upper(m), delta(m);
  auto r = poisson_residual(grid, eps, phi, eta1, eta2, sphi);
  double rnorm = sup_norm(r);
  int it = 0;
  for (; it < opts.newton_max && rnorm >= opts.newton_tol; ++it) {
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const double hl = grid.spacing(k - 1);
      const double hr = grid.spacing(k);
      const double s = 2.0 * eps / (hl + hr);
      lower[k - 1] = -s / hl;
      upper[k - 1] = -s / hr;
      diag[k - 1] = s * (1.0 / hl + 1.0 / hr) + eta1[k] * std::exp(-phi[k]) + eta2[k] * std::exp(phi[k]);
      delta[k - 1] = -r[k];
    }
    solve_tridiagonal(lower, diag, upper, delta);

    double step_norm = 0.0;
    for (double d : delta) step_norm = std::max(step_norm, std::abs(d));
    double lambda = opts.damping;
    bool accepted = false;
    std::vector<double> trial(phi);
    for (int halving = 0; halving <= 30; ++halving) {
      for (std::size_t k = 1; k + 1 < n; ++k) trial[k] = phi[k] + lambda * delta[k - 1];
      auto rt = poisson_residual(grid, eps, trial, eta1, eta2, sphi);
      const double tnorm = sup_norm(rt);
      if (std::isfinite(tnorm) && tnorm < rnorm) {
        phi.swap(trial);
        r.swap(rt);
        rnorm = tnorm;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      // Residual stuck at the rounding floor: the Newton update itself is negligible.
      if (step_norm <= 1e-11 * (1.0 + sup_norm(phi))) return it + 1;
      throw NewtonDivergence("Newton damping exhausted after 30 halvings (residual " + std::to_string(rnorm) +
                             ")");
    }
    if (step_norm * lambda <= 1e-15 * (1.0 + sup_norm(phi))) return it + 1;
  }
  if (rnorm >= opts.newton_tol && it >= opts.newton_max) {
    throw NewtonDivergence("Newton did not reach tolerance in " + std::to_string(opts.newton_max) +
                           " iterations (residual " + std::to_string(rnorm) + ")");
  }
  return it;
}

SteadyResult gummel(const PhysParams& params, const StripBC& bc, const Grid1D& grid, const GummelOptions& opts,
                    std::vector<double> phi, const SteadySources* sources) {
  const std::size_t n = grid.size();
  phi.front() = 0.0 - bc.voltage;  // no negative zero at V = 0
  phi.back() = 0.0;
  const std::vector<double>* s1 = sources ? &sources->s1 : nullptr;
  const std::vector<double>* s2 = sources ? &sources->s2 : nullptr;
  const std::vector<double>* sp = sources ? &sources->sphi : nullptr;

  SteadyResult result;
  auto& info = result.info;
  bool converged = false;
  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    const auto p1 = slotboom_update(grid, phi, kValence[0], bc.eta_left(0), bc.eta_right(0), s1);
    const auto p2 = slotboom_update(grid, phi, kValence[1], bc.eta_left(1), bc.eta_right(1), s2);
    std::vector<double> next(phi);
    info.newton_iterations += newton_poisson(grid, params.eps, next, p1.eta, p2.eta, sp, opts);
    double update = 0.0;
    for (std::size_t k = 0; k < n; ++k) update = std::max(update, std::abs(next[k] - phi[k]));
    phi.swap(next);
    info.outer_iterations = outer;
    info.last_update = update;
    if (update < opts.outer_tol) {
      converged = true;
      break;
    }
  }

  const auto p1 = slotboom_update(grid, phi, kValence[0], bc.eta_left(0), bc.eta_right(0), s1);
  const auto p2 = slotboom_update(grid, phi, kValence[1], bc.eta_left(1), bc.eta_right(1), s2);
  if (!converged) {
    const auto r = poisson_residual(grid, params.eps, phi, p1.eta, p2.eta, sp);
    throw ConvergenceError("Gummel iteration did not converge in " + std::to_string(opts.max_outer) +
                               " outer iterations (last update " + std::to_string(info.last_update) + ")",
                           info.last_update, sup_norm(r));
  }

  SteadyState1D& st = result.state;
  st.grid = grid;
  st.phi = phi;
  st.c1.resize(n);
  st.c2.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    st.c1[k] = p1.eta[k] * std::exp(-phi[k]);
    st.c2[k] = p2.eta[k] * std::exp(phi[k]);
    if (!(st.c1[k] > 0.0) || !(st.c2[k] > 0.0) || !std::isfinite(st.c1[k]) || !std::isfinite(st.c2[k])) {
      throw PositivityLoss("concentration lost positivity at node " + std::to_string(k) +
                           "; the grid is too coarse for this data");
    }
  }
  st.c1.front() = bc.alpha1;
  st.c2.front() = bc.alpha2;
  st.c1.back() = bc.beta1;
  st.c2.back() = bc.beta2;
  st.j1 = p1.j;
  st.j2 = p2.j;
  return result;
}

std::vector<double> linear_potential(const Grid1D& grid, double voltage) {
  std::vector<double> phi(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) phi[k] = 0.0 - voltage * (1.0 - grid[k] / grid.length());
  return phi;
}

SteadyResult solve_with_continuation(const PhysParams& params, const StripBC& bc, const Grid1D& grid,
                                     const GummelOptions& opts, std::vector<double> phi0,
                                     const SteadySources* sources, int depth) {
  try {
    return gummel(params, bc, grid, opts, std::move(phi0), sources);
  } catch (const NewtonDivergence&) {
    if (depth >= opts.max_continuation) throw;
  }
  StripBC half = bc;
  half.voltage = 0.5 * bc.voltage;
  auto coarse = solve_with_continuation(params, half, grid, opts, linear_potential(grid, half.voltage), sources,
                                        depth + 1);
  std::vector<double> guess = coarse.state.phi;
  for (std::size_t k = 0; k < grid.size(); ++k) guess[k] -= half.voltage * (1.0 - grid[k] / grid.length());
  auto result = gummel(params, bc, grid, opts, std::move(guess), sources);
  result.info.continuation_levels = coarse.info.continuation_levels + 1;
  return result;
}

void check_inputs(const PhysParams& params, const StripBC& bc, const Grid1D& grid, const GummelOptions& opts,
                  const SteadySources* sources) {
  params.validate();
  bc.validate();
  opts.validate();
  if (std::abs(grid.length() - bc.length) > 1e-12 * bc.length) {
    throw InvalidArgument("grid length does not match the boundary data length L");
  }
  if (sources != nullptr) {
    const std::size_t n = grid.size();
    if (sources->s1.size() != n || sources->s2.size() != n || sources->sphi.size() != n) {
      throw InvalidArgument("source arrays must match the grid size");
    }
  }
}

}  // namespace

SteadyResult solve_steady_1d(const PhysParams& params, const StripBC& bc, const Grid1D& grid,
                             const GummelOptions& opts, const SteadySources* sources) {
  check_inputs(params, bc, grid, opts, sources);
  return solve_with_continuation(params, bc, grid, opts, linear_potential(grid, bc.voltage), sources, 0);
}

SteadyResult solve_steady_1d_from(const PhysParams& params, const StripBC& bc, const Grid1D& grid,
                                  const GummelOptions& opts, std::vector<double> phi0,
                                  const SteadySources* sources) {
  check_inputs(params, bc, grid, opts, sources);
  if (phi0.size() != grid.size()) throw InvalidArgument("initial potential does not match the grid");
  return solve_with_continuation(params, bc, grid, opts, std::move(phi0), sources, 0);
}

CurrentsReport currents(const SteadyState1D& state) {
  const auto& grid = state.grid;
  const std::size_t n = grid.size();
  if (state.c1.size() != n || state.c2.size() != n || state.phi.size() != n) {
    throw InvalidArgument("currents: field sizes do not match the grid");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!(state.c1[k] > 0.0) || !(state.c2[k] > 0.0)) throw InvalidArgument("currents: concentrations must be positive");
  }
  CurrentsReport out;
  const auto dphi = gradient_1d(state.phi, grid);
  for (int i = 0; i < 2; ++i) {
    const int z = kValence[i];
    const auto eta = state.eta(i);
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) integral += grid.spacing(k) * exp_mean(z * state.phi[k], z * state.phi[k + 1]);
    const double j = (eta[n - 1] - eta[0]) / integral;
    const auto& c = state.c(i);
    const auto dc = gradient_1d(c, grid);
    double dev = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) dev = std::max(dev, std::abs(dc[k] + z * c[k] * dphi[k] - j));
    if (i == 0) {
      out.j1 = j;
      out.flux_deviation1 = dev;
    } else {
      out.j2 = j;
      out.flux_deviation2 = dev;
    }
  }
  return out;
}

BoundsReport bound_constants(const StripBC& bc) {
  BoundsReport b;
  b.lambda1 = std::min(bc.eta_left(0), bc.beta1);
  b.Lambda1 = std::max(bc.eta_left(0), bc.beta1);
  b.lambda2 = std::min(bc.eta_left(1), bc.beta2);
  b.Lambda2 = std::max(bc.eta_left(1), bc.beta2);
  b.v_lo = std::min(-bc.voltage, 0.5 * std::log(b.lambda1 / b.Lambda2));
  b.v_hi = std::max(0.0, 0.5 * std::log(b.Lambda1 / b.lambda2));
  b.gamma_lo = bc.gamma_lo();
  b.gamma_hi = bc.gamma_hi();
  return b;
}

BoundsReport check_bounds(const SteadyState1D& state, const StripBC& bc) {
  BoundsReport b = bound_constants(bc);
  const std::size_t n = state.grid.size();
  const auto eta1 = state.eta(0);
  const auto eta2 = state.eta(1);
  auto eta_slack = [&](std::size_t k) {
    return std::min({eta1[k] - b.lambda1, b.Lambda1 - eta1[k], eta2[k] - b.lambda2, b.Lambda2 - eta2[k]});
  };
  b.slack_eta = eta_slack(0);
  b.slack_phi = std::min(state.phi[0] - b.v_lo, b.v_hi - state.phi[0]);
  b.slack_c = std::min({state.c1[0] - b.gamma_lo, b.gamma_hi - state.c1[0], state.c2[0] - b.gamma_lo,
                        b.gamma_hi - state.c2[0]});
  for (std::size_t k = 1; k < n; ++k) {
    b.slack_eta = std::min(b.slack_eta, eta_slack(k));
    b.slack_phi = std::min({b.slack_phi, state.phi[k] - b.v_lo, b.v_hi - state.phi[k]});
    b.slack_c = std::min({b.slack_c, state.c1[k] - b.gamma_lo, b.gamma_hi - state.c1[k],
                          state.c2[k] - b.gamma_lo, b.gamma_hi - state.c2[k]});
  }
  b.slack_eta_left = eta_slack(0);
  b.slack_eta_right = eta_slack(n - 1);
  b.worst_violation = std::min({b.slack_eta, b.slack_phi, b.slack_c});
  return b;
}

SteadyResidual residual_steady(const SteadyState1D& state, const PhysParams& params, const SteadySources* sources) {
  const auto& grid = state.grid;
  const std::size_t n = grid.size();
  SteadyResidual r;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double hl = grid.spacing(k - 1);
    const double hr = grid.spacing(k);
    const double vol = 0.5 * (hl + hr);
    for (int i = 0; i < 2; ++i) {
      const auto& c = state.c(i);
      const int z = kValence[i];
      const double jr = sg_flux(c[k], c[k + 1], state.phi[k], state.phi[k + 1], z, hr);
      const double jl = sg_flux(c[k - 1], c[k], state.phi[k - 1], state.phi[k], z, hl);
      double res = (jr - jl) / vol;
      if (sources != nullptr) res -= (i == 0 ? sources->s1 : sources->s2)[k];
      (i == 0 ? r.r1 : r.r2) = std::max(i == 0 ? r.r1 : r.r2, std::abs(res));
    }
    const double lap = 2.0 / (hl + hr) * ((state.phi[k + 1] - state.phi[k]) / hr - (state.phi[k] - state.phi[k - 1]) / hl);
    double res = -params.eps * lap - (state.c1[k] - state.c2[k]);
    if (sources != nullptr) res -= sources->sphi[k];
    r.rphi = std::max(r.rphi, std::abs(res));
  }
  return r;
}

}  // namespace npslab

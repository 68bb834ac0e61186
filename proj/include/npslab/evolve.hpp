#pragma once

// Time-dependent Nernst-Planck-Stokes on the periodic strip (0, L) x [0, 1).
//
//   dc_i/dt + u . grad c_i = D_i div(grad c_i + z_i c_i grad Phi) + s_i
//   -eps Lap Phi = c1 - c2 + s_phi
//   du/dt - nu Lap u + grad p = -K rho grad Phi + s_u,   div u = 0
//
// with c_i = alpha_i, beta_i and Phi = -V, 0 at x = 0, L and u = 0 on both walls.
//
// One step advances (c, u, Phi) from t to t + dt:
//  1. concentrations, backward Euler, with exponentially fitted (Scharfetter-Gummel)
//     fluxes that carry diffusion, drift and advection on every edge. The drift
//     divergence is split into an edge part and the local term z c Lap Phi, and the
//     latter is replaced through the discrete Poisson equation by the linearized
//     coupling -(c_i^n / eps)(c_i - c_other). The resulting matrix is an M-matrix with
//     unit row sums, so both species obey a joint discrete maximum principle for any dt.
//  2. velocity by incremental pressure correction on a MAC grid: implicit viscous
//     solve with the explicit electric force, then a Neumann pressure projection.
//  3. potential from the new concentrations.
// The step is unconditionally positive, but dt <= 0.5 h / (|u| + max D |grad Phi|) is
// still enforced so that transport is resolved in time.

#include <npslab/core.hpp>
#include <npslab/strip.hpp>

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace npslab {

enum class InitialKind { Constant, LinearRamp, RandomBounded, Spiked, File };

struct InitialCondition {
  InitialKind kind = InitialKind::LinearRamp;
  double value = 1.0;                                     ///< Constant
  double lo = std::numeric_limits<double>::quiet_NaN();   ///< RandomBounded; NaN means gamma_lo
  double hi = std::numeric_limits<double>::quiet_NaN();   ///< RandomBounded; NaN means gamma_hi
  double peak = std::numeric_limits<double>::quiet_NaN(); ///< Spiked; NaN means 3 gamma_hi
  std::uint64_t seed = 0;
  std::string path;                                       ///< File (field snapshot)
};

const char* initial_kind_name(InitialKind kind);
InitialKind parse_initial_kind(const std::string& name);

struct EvolveConfig {
  PhysParams params;
  StripBC bc;
  std::size_t nx = 64;
  std::size_t ny = 32;
  double dt = 1e-2;
  double t_end = 1.0;
  int output_every = 1;
  InitialCondition initial;
  bool navier_stokes = false;  ///< explicit u . grad u; no monitor is claimed with it on
  int snapshot_every = 0;      ///< 0 disables intermediate snapshots
  double band_delta = std::numeric_limits<double>::quiet_NaN();  ///< NaN means 0.05 gamma_lo
  void validate() const;
  double resolved_band_delta() const;
};

/// Analytic source terms; any empty member is treated as zero.
struct Sources2D {
  using Fn = std::function<double(double x, double y, double t)>;
  Fn c1, c2, phi, ux, uy;
};

struct DiagnosticsRow {
  double time = 0.0;
  double m_hi = 0.0;          ///< max_i max c_i (boundary included)
  double m_lo = 0.0;          ///< min_i min c_i
  double entropy1 = 0.0;      ///< int c1* psi(c1 / c1*)
  double entropy2 = 0.0;
  double grad_phi_err = 0.0;  ///< ||grad(Phi - Phi*)||^2
  double kinetic = 0.0;       ///< ||u||^2
  double energy_e = 0.0;      ///< entropy1 + entropy2 + eps/2 grad_phi_err
  double energy_f = 0.0;      ///< energy_e + kinetic / K
  double dissipation = 0.0;   ///< sum_i D_i/2 int c_i |grad(mu_i - mu_i*)|^2
  double divergence = 0.0;    ///< max |div u| on the MAC cells
};

/// Column names in CSV order.
const std::vector<std::string>& diagnostics_columns();
std::vector<double> diagnostics_values(const DiagnosticsRow& row);
DiagnosticsRow diagnostics_from_values(std::span<const double> values);

/// Holds the precomputed solvers and the 1D reference state for one configuration.
class Evolver {
 public:
  explicit Evolver(const EvolveConfig& config, const Sources2D* sources = nullptr);
  ~Evolver();
  Evolver(Evolver&&) noexcept;
  Evolver& operator=(Evolver&&) noexcept;

  const EvolveConfig& config() const;
  const StripGrid& grid() const;
  const SteadyState1D& reference() const;

  /// Initial data per config.initial; u = 0 unless read from a file, Phi from Poisson.
  StripState2D initial_state() const;
  /// The 1D reference extended constant in y, u = 0, pressure zero.
  StripState2D reference_state() const;

  /// Advance by dt (config dt when dt <= 0). Throws CflViolation.
  void step(StripState2D& state, double dt = -1.0);

  /// Largest dt accepted by the guard for this state.
  double admissible_dt(const StripState2D& state) const;

  DiagnosticsRow diagnostics(const StripState2D& state) const;
  /// Dissipation from the expanded form: (d log(c/c*))^2 + 2 z d log(c/c*) d(Phi-Phi*) + (d(Phi-Phi*))^2.
  double dissipation_expanded(const StripState2D& state) const;

  /// Recompute Phi from the concentrations at the state's time.
  void solve_potential(StripState2D& state) const;
  /// Make (ux, uy) discretely divergence-free.
  void project(StripState2D& state) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One step with a freshly built Evolver.
StripState2D step(const StripState2D& state, const EvolveConfig& config);

/// max |div u| over MAC cells.
double max_divergence(const StripState2D& state);

struct RunResult {
  std::vector<DiagnosticsRow> rows;
  StripState2D final_state;
  SteadyState1D reference;
  double band_delta = 0.0;
  double entry_time = std::numeric_limits<double>::quiet_NaN();  ///< first sample inside the band
  long steps = 0;
};

using SnapshotCallback = std::function<void(const StripState2D&)>;

RunResult run(const EvolveConfig& config, const Sources2D* sources = nullptr, const SnapshotCallback& snapshot = {});

/// First sample with gamma_lo - delta <= m_lo and m_hi <= gamma_hi + delta; NaN if none.
double entry_time(std::span<const DiagnosticsRow> rows, const StripBC& bc, double delta);

struct DecayFit {
  double fitted_rate = std::numeric_limits<double>::quiet_NaN();  ///< slope of log F
  bool certified = false;
  bool vacuous = false;      ///< F identically (numerically) zero on the window
  std::size_t samples = 0;
  double t_start = 0.0;
  double worst_ratio = 0.0;  ///< max F(t) / (F(t_start) e^{-kappa (t - t_start)})
};

/// Least-squares slope of log F on [t_start, end] and the bound F(t) <= F(t_start)
/// e^{-kappa (t - t_start)} (1 + 1e-6). Requires at least 10 samples in the window.
DecayFit decay_fit(std::span<const DiagnosticsRow> rows, double kappa, double t_start);

struct DecayCertificate {
  bool applicable = false;  ///< weak-current criterion holds
  bool certified = false;
  bool monotone = false;    ///< F nonincreasing from t_start on
  double delta = 0.0;
  double kappa = 0.0;
  double t_start = std::numeric_limits<double>::quiet_NaN();
  DecayFit fit;
};

/// Uses the smallest delta of the criteria scan whose band the run has entered (with at
/// least 10 samples left) and certifies against kappa^delta from the entry time on.
DecayCertificate certify_decay(std::span<const DiagnosticsRow> rows, const PhysParams& params, const StripBC& bc,
                               double j1, double j2);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Discrete log-Sobolev inequality on the strip. p^f, p^g solve -eps Lap p = f1 - f2
/// (resp. g) with zero Dirichlet data; omega = 2 / max(M_f, M_g), l = L.
InequalityCheck entropy_inequality_check(const Field2D& f1, const Field2D& f2, const Field2D& g1, const Field2D& g2,
                                         const PhysParams& params, const StripGrid& grid);

/// int (f - g)^2 <= factor max(|f|_inf, |g|_inf) int g psi(f / g).
/// With factor 1 this is the commonly quoted form, which fails for f/g near 1 because
/// psi(s) ~ (s - 1)^2 / 2 there. Factor 2 always holds: psi(s) >= (s - 1)^2 / (2 max(1, s)).
InequalityCheck interpolation_check(const Field2D& f, const Field2D& g, const StripGrid& grid, double factor = 1.0);

}  // namespace npslab

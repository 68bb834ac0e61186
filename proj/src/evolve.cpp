#include <npslab/evolve.hpp>
#include <npslab/criteria.hpp>
#include <npslab/error.hpp>
#include <npslab/io.hpp>
#include <npslab/steady1d.hpp>

#include <Eigen/Sparse>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace npslab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double eval(const Sources2D::Fn& f, double x, double y, double t) { return f ? f(x, y, t) : 0.0; }

}  // namespace

const char* initial_kind_name(InitialKind kind) {
  switch (kind) {
    case InitialKind::Constant: return "constant";
    case InitialKind::LinearRamp: return "linear-ramp";
    case InitialKind::RandomBounded: return "random-bounded";
    case InitialKind::Spiked: return "spiked";
    case InitialKind::File: return "file";
  }
  return "?";
}

InitialKind parse_initial_kind(const std::string& name) {
  for (auto k : {InitialKind::Constant, InitialKind::LinearRamp, InitialKind::RandomBounded, InitialKind::Spiked,
                 InitialKind::File}) {
    if (name == initial_kind_name(k)) return k;
  }
  throw ConfigError("unknown initial condition '" + name +
                    "' (expected constant, linear-ramp, random-bounded, spiked or file)");
}

void EvolveConfig::validate() const {
  params.validate();
  bc.validate();
  if (nx < 8 || ny < 8) throw ConfigError("evolve grid sizes must be >= 8");
  if (!(dt > 0.0)) throw ConfigError("evolve dt must be positive");
  if (!(t_end >= dt)) throw ConfigError("evolve t_end must be >= dt");
  if (output_every < 1) throw ConfigError("evolve output_every must be >= 1");
  if (snapshot_every < 0) throw ConfigError("evolve snapshot_every must be >= 0");
  const double d = resolved_band_delta();
  if (!(d > 0.0)) throw ConfigError("band delta must be positive");
  if (initial.kind == InitialKind::RandomBounded) {
    const double lo = std::isnan(initial.lo) ? bc.gamma_lo() : initial.lo;
    const double hi = std::isnan(initial.hi) ? bc.gamma_hi() : initial.hi;
    if (!(lo >= 0.0) || !(hi >= lo)) throw ConfigError("random-bounded needs 0 <= lo <= hi");
  }
  if (initial.kind == InitialKind::Constant && !(initial.value >= 0.0)) {
    throw ConfigError("constant initial value must be >= 0");
  }
  if (initial.kind == InitialKind::Spiked && !std::isnan(initial.peak) && !(initial.peak > 0.0)) {
    throw ConfigError("spike peak must be positive");
  }
  if (initial.kind == InitialKind::File && initial.path.empty()) throw ConfigError("initial file path missing");
}

double EvolveConfig::resolved_band_delta() const {
  return std::isnan(band_delta) ? 0.05 * bc.gamma_lo() : band_delta;
}

const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> cols{"time",     "m_hi",         "m_lo",    "entropy1",
                                             "entropy2", "grad_phi_err", "kinetic", "energy_e",
                                             "energy_f", "dissipation",  "divergence"};
  return cols;
}

std::vector<double> diagnostics_values(const DiagnosticsRow& r) {
  return {r.time,    r.m_hi,     r.m_lo,     r.entropy1,    r.entropy2,  r.grad_phi_err,
          r.kinetic, r.energy_e, r.energy_f, r.dissipation, r.divergence};
}

DiagnosticsRow diagnostics_from_values(std::span<const double> v) {
  if (v.size() != diagnostics_columns().size()) throw IoError("diagnostics row has the wrong number of values");
  DiagnosticsRow r;
  r.time = v[0];
  r.m_hi = v[1];
  r.m_lo = v[2];
  r.entropy1 = v[3];
  r.entropy2 = v[4];
  r.grad_phi_err = v[5];
  r.kinetic = v[6];
  r.energy_e = v[7];
  r.energy_f = v[8];
  r.dissipation = v[9];
  r.divergence = v[10];
  return r;
}

double max_divergence(const StripState2D& s) {
  const auto& g = s.grid;
  const double hx = g.hx(), hy = g.hy();
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < g.nx; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      const double d = (s.ux(i + 1, j) - s.ux(i, j)) / hx + (s.uy(i, j) - s.uy(i, g.jm(j))) / hy;
      m = std::max(m, std::abs(d));
    }
  }
  return m;
}

// ----------------------------------------------------------------------------------

struct Evolver::Impl {
  EvolveConfig cfg;
  StripGrid grid;
  const Sources2D* sources = nullptr;
  SteadyState1D ref;
  Field2D ref_c[2];
  Field2D ref_phi;

  PeriodicStripSolver poisson;   // interior nodes
  PeriodicStripSolver pressure;  // cells, Neumann in x
  PeriodicStripSolver visc_x, visc_y;
  double visc_dt = -1.0;

  // The concentration matrix is strictly diagonally dominant; Jacobi-preconditioned
  // BiCGSTAB normally converges in a few dozen iterations. Direct LU is the fallback.
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double, Eigen::RowMajor>, Eigen::DiagonalPreconditioner<double>> krylov;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;

  std::size_t interior() const { return (grid.nx - 2) * grid.ny; }
  std::size_t unknown(int s, std::size_t i, std::size_t j) const {
    return static_cast<std::size_t>(s) * interior() + (i - 1) * grid.ny + j;
  }

  void build_viscous(double dt);
  void concentration_step(StripState2D& st, double dt);
  void stokes_step(StripState2D& st, const Field2D& rho, double dt);
  void apply_boundary(StripState2D& st) const;
  void potential(StripState2D& st) const;
  void projection(StripState2D& st, double dt) const;
};

void Evolver::Impl::apply_boundary(StripState2D& st) const {
  for (std::size_t j = 0; j < grid.ny; ++j) {
    st.c1(0, j) = cfg.bc.alpha1;
    st.c2(0, j) = cfg.bc.alpha2;
    st.c1(grid.nx - 1, j) = cfg.bc.beta1;
    st.c2(grid.nx - 1, j) = cfg.bc.beta2;
    st.ux(0, j) = 0.0;
    st.ux(grid.nx - 1, j) = 0.0;
  }
}

void Evolver::Impl::potential(StripState2D& st) const {
  const std::size_t m = grid.nx - 2;
  const double a = cfg.params.eps / (grid.hx() * grid.hx());
  const double left = 0.0 - cfg.bc.voltage;
  Field2D b(m, grid.ny);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < grid.ny; ++j) {
      double v = st.c1(i + 1, j) - st.c2(i + 1, j);
      if (sources) v += eval(sources->phi, grid.x(i + 1), grid.y(j), st.time);
      if (i == 0) v += a * left;
      b(i, j) = v;
    }
  }
  poisson.solve(b);
  for (std::size_t j = 0; j < grid.ny; ++j) {
    st.phi(0, j) = left;
    st.phi(grid.nx - 1, j) = 0.0;
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < grid.ny; ++j) st.phi(i + 1, j) = b(i, j);
  }
}

void Evolver::Impl::build_viscous(double dt) {
  if (dt == visc_dt) return;
  const double nu = cfg.params.nu;
  const double hx = grid.hx();
  const double a = dt * nu / (hx * hx);
  // ux at interior nodes, Dirichlet zero at the walls
  const std::size_t mx = grid.nx - 2;
  visc_x = PeriodicStripSolver(std::vector<double>(mx, -a), std::vector<double>(mx, 1.0 + 2.0 * a),
                               std::vector<double>(mx, -a), std::vector<double>(mx, dt * nu), grid.ny, grid.hy());
  // uy at corners, wall value imposed by an odd ghost
  const std::size_t my = grid.nx - 1;
  std::vector<double> diag(my, 1.0 + 2.0 * a);
  diag.front() = 1.0 + 3.0 * a;
  diag.back() = 1.0 + 3.0 * a;
  visc_y = PeriodicStripSolver(std::vector<double>(my, -a), std::move(diag), std::vector<double>(my, -a),
                               std::vector<double>(my, dt * nu), grid.ny, grid.hy());
  visc_dt = dt;
}

void Evolver::Impl::concentration_step(StripState2D& st, double dt) {
  const std::size_t nx = grid.nx, ny = grid.ny;
  const double hx = grid.hx(), hy = grid.hy();
  const double eps = cfg.params.eps;
  const double t_new = st.time + dt;
  const std::size_t n = 2 * interior();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n * 7);
  Eigen::VectorXd rhs(n);

  for (int s = 0; s < 2; ++s) {
    const int z = kValence[s];
    const double D = cfg.params.diffusivity(s);
    const Field2D& c = st.c(s);
    const Sources2D::Fn* src = sources ? (s == 0 ? &sources->c1 : &sources->c2) : nullptr;
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      for (std::size_t j = 0; j < ny; ++j) {
        const std::size_t row = unknown(s, i, j);
        struct Nb {
          std::size_t i, j;
          double h, u;
        };
        const std::size_t jp = grid.jp(j), jm = grid.jm(j);
        const Nb nbs[4] = {
            {i + 1, j, hx, 0.5 * (st.ux(i, j) + st.ux(i + 1, j))},
            {i - 1, j, hx, -0.5 * (st.ux(i, j) + st.ux(i - 1, j))},
            {i, jp, hy, 0.5 * (st.uy(i - 1, j) + st.uy(i, j))},
            {i, jm, hy, -0.5 * (st.uy(i - 1, jm) + st.uy(i, jm))},
        };
        const double coupling = dt * D * std::max(c(i, j), 0.0) / eps;
        double diag = 1.0 + coupling;
        double b = c(i, j);
        for (const Nb& nb : nbs) {
          const double p = z * (st.phi(nb.i, nb.j) - st.phi(i, j)) - nb.u * nb.h / D;
          const double w = dt * D * bernoulli(-p) / (nb.h * nb.h);
          diag += w;
          if (nb.i == 0 || nb.i == nx - 1) {
            b += w * c(nb.i, nb.j);
          } else {
            trip.emplace_back(row, unknown(s, nb.i, nb.j), -w);
          }
        }
        trip.emplace_back(row, row, diag);
        trip.emplace_back(row, unknown(1 - s, i, j), -coupling);
        if (src) {
          const double x = grid.x(i), y = grid.y(j);
          b += dt * eval(*src, x, y, t_new);
          // The Poisson source enters the local drift term z c Lap Phi explicitly.
          if (sources->phi) b -= dt * D * z * c(i, j) * sources->phi(x, y, st.time) / eps;
        }
        rhs[row] = b;
      }
    }
  }

  Eigen::SparseMatrix<double, Eigen::RowMajor> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd guess(n);
  for (int s = 0; s < 2; ++s)
    for (std::size_t i = 1; i + 1 < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j) guess[unknown(s, i, j)] = st.c(s)(i, j);
  krylov.setTolerance(1e-14);
  krylov.setMaxIterations(1000);
  krylov.compute(A);
  Eigen::VectorXd sol = krylov.solveWithGuess(rhs, guess);
  if (krylov.info() != Eigen::Success) {
    Eigen::SparseMatrix<double> Ac = A;
    lu.compute(Ac);
    if (lu.info() != Eigen::Success) throw ConvergenceError("concentration system factorization failed", 0.0, 0.0);
    sol = lu.solve(rhs);
  }

  for (int s = 0; s < 2; ++s) {
    Field2D& c = st.c(s);
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      for (std::size_t j = 0; j < ny; ++j) {
        const double v = sol[unknown(s, i, j)];
        if (!std::isfinite(v)) throw PositivityLoss("non-finite concentration after step");
        c(i, j) = v;
      }
    }
  }
  if (!sources && (st.c1.min() < 0.0 || st.c2.min() < 0.0)) {
    throw PositivityLoss("negative concentration after step");
  }
}

void Evolver::Impl::projection(StripState2D& st, double dt) const {
  const std::size_t nx = grid.nx, ny = grid.ny;
  const double hx = grid.hx(), hy = grid.hy();
  Field2D phi(nx - 1, ny);
  for (std::size_t i = 0; i + 1 < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const double div = (st.ux(i + 1, j) - st.ux(i, j)) / hx + (st.uy(i, j) - st.uy(i, grid.jm(j))) / hy;
      phi(i, j) = -div / dt;
    }
  }
  pressure.solve(phi);
  for (std::size_t i = 1; i + 1 < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) st.ux(i, j) -= dt * (phi(i, j) - phi(i - 1, j)) / hx;
  }
  for (std::size_t i = 0; i + 1 < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      st.uy(i, j) -= dt * (phi(i, grid.jp(j)) - phi(i, j)) / hy;
      st.pressure(i, j) += phi(i, j);
    }
  }
}

void Evolver::Impl::stokes_step(StripState2D& st, const Field2D& rho, double dt) {
  const std::size_t nx = grid.nx, ny = grid.ny;
  const double hx = grid.hx(), hy = grid.hy();
  const double K = cfg.params.coupling;
  const double t_new = st.time + dt;
  build_viscous(dt);

  Field2D bx(nx - 2, ny), by(nx - 1, ny);
  for (std::size_t i = 1; i + 1 < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      double f = -K * rho(i, j) * (st.phi(i + 1, j) - st.phi(i - 1, j)) / (2.0 * hx);
      f -= (st.pressure(i, j) - st.pressure(i - 1, j)) / hx;
      if (sources) f += eval(sources->ux, grid.x(i), grid.y(j), t_new);
      if (cfg.navier_stokes) {
        const std::size_t jp = grid.jp(j), jm = grid.jm(j);
        const double vy = 0.25 * (st.uy(i - 1, jm) + st.uy(i, jm) + st.uy(i - 1, j) + st.uy(i, j));
        f -= st.ux(i, j) * (st.ux(i + 1, j) - st.ux(i - 1, j)) / (2.0 * hx) +
             vy * (st.ux(i, jp) - st.ux(i, jm)) / (2.0 * hy);
      }
      bx(i - 1, j) = st.ux(i, j) + dt * f;
    }
  }
  for (std::size_t i = 0; i + 1 < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t jp = grid.jp(j), jm = grid.jm(j);
      const double r = 0.25 * (rho(i, j) + rho(i + 1, j) + rho(i, jp) + rho(i + 1, jp));
      const double dphi = 0.5 * ((st.phi(i, jp) - st.phi(i, j)) + (st.phi(i + 1, jp) - st.phi(i + 1, j))) / hy;
      double f = -K * r * dphi - (st.pressure(i, jp) - st.pressure(i, j)) / hy;
      if (sources) f += eval(sources->uy, grid.x(i) + 0.5 * hx, grid.y(j) + 0.5 * hy, t_new);
      if (cfg.navier_stokes) {
        const double vx = 0.25 * (st.ux(i, j) + st.ux(i + 1, j) + st.ux(i, jp) + st.ux(i + 1, jp));
        const double right = i + 2 < nx ? st.uy(i + 1, j) : -st.uy(i, j);
        const double left = i > 0 ? st.uy(i - 1, j) : -st.uy(i, j);
        f -= vx * (right - left) / (2.0 * hx) + st.uy(i, j) * (st.uy(i, jp) - st.uy(i, jm)) / (2.0 * hy);
      }
      by(i, j) = st.uy(i, j) + dt * f;
    }
  }
  visc_x.solve(bx);
  visc_y.solve(by);
  for (std::size_t i = 1; i + 1 < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) st.ux(i, j) = bx(i - 1, j);
  }
  st.uy = by;
  projection(st, dt);
}

// ----------------------------------------------------------------------------------

Evolver::Evolver(const EvolveConfig& config, const Sources2D* sources) : impl_(std::make_unique<Impl>()) {
  config.validate();
  auto& m = *impl_;
  m.cfg = config;
  m.sources = sources;
  m.grid = StripGrid(config.nx, config.ny, config.bc.length);
  const auto& g = m.grid;

  m.ref = solve_steady_1d(config.params, config.bc, Grid1D::uniform(g.nx, g.length)).state;
  for (int s = 0; s < 2; ++s) m.ref_c[s] = Field2D(g.nx, g.ny);
  m.ref_phi = Field2D(g.nx, g.ny);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      m.ref_c[0](i, j) = m.ref.c1[i];
      m.ref_c[1](i, j) = m.ref.c2[i];
      m.ref_phi(i, j) = m.ref.phi[i];
    }
  }

  const double eps = config.params.eps;
  const double hx = g.hx();
  const std::size_t mi = g.nx - 2;
  const double a = eps / (hx * hx);
  m.poisson = PeriodicStripSolver(std::vector<double>(mi, -a), std::vector<double>(mi, 2.0 * a),
                                  std::vector<double>(mi, -a), std::vector<double>(mi, eps), g.ny, g.hy());
  const std::size_t mc = g.nx - 1;
  const double b = 1.0 / (hx * hx);
  std::vector<double> diag(mc, 2.0 * b);
  diag.front() = b;
  diag.back() = b;
  m.pressure = PeriodicStripSolver(std::vector<double>(mc, -b), std::move(diag), std::vector<double>(mc, -b),
                                   std::vector<double>(mc, 1.0), g.ny, g.hy(), true);
}

Evolver::~Evolver() = default;
Evolver::Evolver(Evolver&&) noexcept = default;
Evolver& Evolver::operator=(Evolver&&) noexcept = default;

const EvolveConfig& Evolver::config() const { return impl_->cfg; }
const StripGrid& Evolver::grid() const { return impl_->grid; }
const SteadyState1D& Evolver::reference() const { return impl_->ref; }

StripState2D Evolver::reference_state() const {
  const auto& m = *impl_;
  StripState2D s = StripState2D::zeros(m.grid);
  s.c1 = m.ref_c[0];
  s.c2 = m.ref_c[1];
  s.phi = m.ref_phi;
  return s;
}

StripState2D Evolver::initial_state() const {
  const auto& m = *impl_;
  const auto& g = m.grid;
  const auto& bc = m.cfg.bc;
  const auto& ic = m.cfg.initial;
  StripState2D s = StripState2D::zeros(g);

  auto ramp = [&](int sp, std::size_t i) {
    return bc.alpha(sp) + (bc.beta(sp) - bc.alpha(sp)) * g.x(i) / g.length;
  };

  switch (ic.kind) {
    case InitialKind::Constant:
      s.c1.data().assign(s.c1.data().size(), ic.value);
      s.c2.data().assign(s.c2.data().size(), ic.value);
      break;
    case InitialKind::LinearRamp:
      for (int sp = 0; sp < 2; ++sp)
        for (std::size_t i = 0; i < g.nx; ++i)
          for (std::size_t j = 0; j < g.ny; ++j) s.c(sp)(i, j) = ramp(sp, i);
      break;
    case InitialKind::RandomBounded: {
      const double lo = std::isnan(ic.lo) ? bc.gamma_lo() : ic.lo;
      const double hi = std::isnan(ic.hi) ? bc.gamma_hi() : ic.hi;
      std::mt19937_64 rng(ic.seed);
      for (int sp = 0; sp < 2; ++sp)
        for (std::size_t i = 0; i < g.nx; ++i)
          for (std::size_t j = 0; j < g.ny; ++j) s.c(sp)(i, j) = lo + (hi - lo) * unit_draw(rng);
      break;
    }
    case InitialKind::Spiked: {
      const double peak = std::isnan(ic.peak) ? 3.0 * bc.gamma_hi() : ic.peak;
      std::mt19937_64 rng(ic.seed);
      const double width = 0.08 * std::max(g.length, 1.0);
      for (int sp = 0; sp < 2; ++sp) {
        // centers sit on nodes so the nodal maximum is the requested peak
        double cx[3], cy[3];
        for (int k = 0; k < 3; ++k) {
          const double xi = 0.2 + 0.6 * unit_draw(rng);
          cx[k] = g.x(static_cast<std::size_t>(std::lround(xi * static_cast<double>(g.nx - 1))));
          cy[k] = g.y(std::min(g.ny - 1, static_cast<std::size_t>(unit_draw(rng) * static_cast<double>(g.ny))));
        }
        for (std::size_t i = 0; i < g.nx; ++i) {
          for (std::size_t j = 0; j < g.ny; ++j) {
            double bump = 0.0;
            for (int k = 0; k < 3; ++k) {
              const double dx = g.x(i) - cx[k];
              double dy = std::abs(g.y(j) - cy[k]);
              dy = std::min(dy, 1.0 - dy);
              bump = std::max(bump, std::exp(-(dx * dx + dy * dy) / (2.0 * width * width)));
            }
            const double base = ramp(sp, i);
            s.c(sp)(i, j) = base + std::max(peak - base, 0.0) * bump;
          }
        }
      }
      break;
    }
    case InitialKind::File: {
      StripState2D f = read_snapshot_file(ic.path);
      if (f.grid.nx != g.nx || f.grid.ny != g.ny) {
        throw ConfigError("initial file grid " + std::to_string(f.grid.nx) + "x" + std::to_string(f.grid.ny) +
                          " does not match the configured grid");
      }
      s.c1 = f.c1;
      s.c2 = f.c2;
      s.ux = f.ux;
      s.uy = f.uy;
      if (s.c1.min() < 0.0 || s.c2.min() < 0.0) throw ConfigError("initial file has negative concentrations");
      break;
    }
  }
  m.apply_boundary(s);
  if (ic.kind == InitialKind::File) {
    // The projection step size only scales the auxiliary potential; the pressure it
    // accumulates is discarded.
    m.projection(s, 1.0);
    s.pressure = Field2D(g.nx - 1, g.ny);
  }
  m.potential(s);
  return s;
}

void Evolver::solve_potential(StripState2D& state) const { impl_->potential(state); }

void Evolver::project(StripState2D& state) const {
  Field2D keep = state.pressure;
  impl_->projection(state, 1.0);
  state.pressure = keep;
}

double Evolver::admissible_dt(const StripState2D& st) const {
  const auto& g = impl_->grid;
  const double hx = g.hx(), hy = g.hy();
  double umax = std::max(st.ux.max_abs(), st.uy.max_abs());
  double gmax = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      if (i + 1 < g.nx) gmax = std::max(gmax, std::abs(st.phi(i + 1, j) - st.phi(i, j)) / hx);
      gmax = std::max(gmax, std::abs(st.phi(i, g.jp(j)) - st.phi(i, j)) / hy);
    }
  }
  const auto& p = impl_->cfg.params;
  const double rate = umax + std::max(p.d1, p.d2) * gmax;
  if (rate == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * std::min(hx, hy) / rate;
}

void Evolver::step(StripState2D& st, double dt) {
  auto& m = *impl_;
  if (dt <= 0.0) dt = m.cfg.dt;
  if (st.grid.nx != m.grid.nx || st.grid.ny != m.grid.ny) throw InvalidArgument("state grid does not match evolver");
  const double adm = admissible_dt(st);
  if (dt > adm * (1.0 + 1e-12)) {
    throw CflViolation("time step " + std::to_string(dt) + " exceeds the admissible " + std::to_string(adm), adm);
  }
  Field2D rho(m.grid.nx, m.grid.ny);
  for (std::size_t k = 0; k < rho.data().size(); ++k) rho.data()[k] = st.c1.data()[k] - st.c2.data()[k];

  m.concentration_step(st, dt);
  m.stokes_step(st, rho, dt);
  st.time += dt;
  m.potential(st);
}

namespace {

// Sum over edges of w_e * e(a, b) * hx hy / h^2 with the trapezoid weight on boundary rows.
template <class EdgeFn>
double edge_sum(const StripGrid& g, EdgeFn&& fn) {
  const double hx = g.hx(), hy = g.hy();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i) {
    const double wrow = (i == 0 || i + 1 == g.nx) ? 0.5 : 1.0;
    for (std::size_t j = 0; j < g.ny; ++j) {
      if (i + 1 < g.nx) sx += fn(i, j, i + 1, j);
      sy += wrow * fn(i, j, i, g.jp(j));
    }
  }
  return sx * hy / hx + sy * hx / hy;
}

}  // namespace

DiagnosticsRow Evolver::diagnostics(const StripState2D& st) const {
  const auto& m = *impl_;
  const auto& g = m.grid;
  DiagnosticsRow r;
  r.time = st.time;
  r.m_hi = std::max(st.c1.max(), st.c2.max());
  r.m_lo = std::min(st.c1.min(), st.c2.min());
  double ent[2];
  for (int s = 0; s < 2; ++s) {
    Field2D e(g.nx, g.ny);
    const Field2D& c = st.c(s);
    for (std::size_t k = 0; k < e.data().size(); ++k) {
      const double cs = m.ref_c[s].data()[k];
      e.data()[k] = cs * psi(std::max(c.data()[k], 0.0) / cs);
    }
    ent[s] = integrate_nodes(e, g);
  }
  r.entropy1 = ent[0];
  r.entropy2 = ent[1];
  Field2D dphi(g.nx, g.ny);
  for (std::size_t k = 0; k < dphi.data().size(); ++k) dphi.data()[k] = st.phi.data()[k] - m.ref_phi.data()[k];
  r.grad_phi_err = gradient_norm_sq(dphi, g);

  // ||u||^2 on the MAC grid: ux on nodes (trapezoid in x), uy on corners.
  Field2D uxsq(g.nx, g.ny);
  for (std::size_t k = 0; k < uxsq.data().size(); ++k) uxsq.data()[k] = st.ux.data()[k] * st.ux.data()[k];
  double ky = 0.0;
  for (double v : st.uy.data()) ky += v * v;
  r.kinetic = integrate_nodes(uxsq, g) + ky * g.hx() * g.hy();

  r.energy_e = r.entropy1 + r.entropy2 + 0.5 * m.cfg.params.eps * r.grad_phi_err;
  r.energy_f = r.energy_e + r.kinetic / m.cfg.params.coupling;

  double dis = 0.0;
  for (int s = 0; s < 2; ++s) {
    const int z = kValence[s];
    const Field2D& c = st.c(s);
    Field2D dmu(g.nx, g.ny);
    for (std::size_t k = 0; k < dmu.data().size(); ++k) {
      dmu.data()[k] = std::log(c.data()[k] / m.ref_c[s].data()[k]) + z * dphi.data()[k];
    }
    dis += 0.5 * m.cfg.params.diffusivity(s) * weighted_gradient_norm_sq(dmu, c, g);
  }
  r.dissipation = dis;
  r.divergence = max_divergence(st);
  return r;
}

double Evolver::dissipation_expanded(const StripState2D& st) const {
  const auto& m = *impl_;
  const auto& g = m.grid;
  double total = 0.0;
  for (int s = 0; s < 2; ++s) {
    const int z = kValence[s];
    const Field2D& c = st.c(s);
    const Field2D& cs = m.ref_c[s];
    auto term = [&](std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1) {
      const double dl = (std::log(c(i1, j1)) - std::log(cs(i1, j1))) - (std::log(c(i0, j0)) - std::log(cs(i0, j0)));
      const double dp = (st.phi(i1, j1) - m.ref_phi(i1, j1)) - (st.phi(i0, j0) - m.ref_phi(i0, j0));
      const double w = 0.5 * (c(i0, j0) + c(i1, j1));
      return w * (dl * dl + 2.0 * z * dl * dp + dp * dp);
    };
    total += 0.5 * m.cfg.params.diffusivity(s) * edge_sum(g, term);
  }
  return total;
}

StripState2D step(const StripState2D& state, const EvolveConfig& config) {
  Evolver ev(config);
  StripState2D next = state;
  ev.step(next);
  return next;
}

double entry_time(std::span<const DiagnosticsRow> rows, const StripBC& bc, double delta) {
  const double lo = bc.gamma_lo() - delta;
  const double hi = bc.gamma_hi() + delta;
  for (const auto& r : rows) {
    if (r.m_lo >= lo && r.m_hi <= hi) return r.time;
  }
  return kNaN;
}

RunResult run(const EvolveConfig& config, const Sources2D* sources, const SnapshotCallback& snapshot) {
  Evolver ev(config, sources);
  RunResult out;
  out.reference = ev.reference();
  out.band_delta = config.resolved_band_delta();
  StripState2D st = ev.initial_state();
  out.rows.push_back(ev.diagnostics(st));
  if (snapshot && config.snapshot_every > 0) snapshot(st);
  const long nsteps = static_cast<long>(std::ceil(config.t_end / config.dt - 1e-9));
  for (long n = 1; n <= nsteps; ++n) {
    const double dt = (n == nsteps) ? config.t_end - st.time : config.dt;
    if (dt <= 0.0) break;
    ev.step(st, dt);
    if (n == nsteps) st.time = config.t_end;
    ++out.steps;
    if (n % config.output_every == 0 || n == nsteps) out.rows.push_back(ev.diagnostics(st));
    if (snapshot && config.snapshot_every > 0 && n % config.snapshot_every == 0) snapshot(st);
  }
  out.entry_time = entry_time(out.rows, config.bc, out.band_delta);
  out.final_state = std::move(st);
  return out;
}

DecayFit decay_fit(std::span<const DiagnosticsRow> rows, double kappa, double t_start) {
  const double tol_t = 1e-12 * std::max(1.0, std::abs(t_start));
  std::vector<const DiagnosticsRow*> win;
  for (const auto& r : rows) {
    if (r.time >= t_start - tol_t) win.push_back(&r);
  }
  if (win.size() < 10) {
    throw InvalidArgument("decay_fit: window has " + std::to_string(win.size()) + " samples, need at least 10");
  }
  DecayFit fit;
  fit.samples = win.size();
  fit.t_start = win.front()->time;
  double fmax = 0.0;
  for (auto* r : win) fmax = std::max(fmax, r->energy_f);
  if (fmax <= 1e-24) {
    fit.vacuous = true;
    fit.certified = true;
    return fit;
  }
  const double f0 = win.front()->energy_f;
  bool ok = true;
  double worst = 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t used = 0;
  for (auto* r : win) {
    const double bound = f0 * std::exp(-kappa * (r->time - fit.t_start));
    if (r->energy_f > bound * (1.0 + 1e-6)) ok = false;
    if (bound > 0.0) worst = std::max(worst, r->energy_f / bound);
    if (r->energy_f > 0.0) {
      const double ly = std::log(r->energy_f);
      sx += r->time;
      sy += ly;
      sxx += r->time * r->time;
      sxy += r->time * ly;
      ++used;
    }
  }
  if (used >= 2) {
    const double nn = static_cast<double>(used);
    const double den = nn * sxx - sx * sx;
    if (den > 0.0) fit.fitted_rate = (nn * sxy - sx * sy) / den;
  }
  fit.certified = ok;
  fit.worst_ratio = worst;
  return fit;
}

DecayCertificate certify_decay(std::span<const DiagnosticsRow> rows, const PhysParams& params, const StripBC& bc,
                               double j1, double j2) {
  DecayCertificate cert;
  const auto report = stability_report(params, bc, j1, j2);
  cert.applicable = report.weak_current_ok;
  if (!cert.applicable) return cert;
  for (const auto& d : report.scan) {
    if (!(d.kappa > 0.0)) break;
    const double t0 = entry_time(rows, bc, d.delta);
    if (std::isnan(t0)) continue;
    std::size_t remaining = 0;
    for (const auto& r : rows) remaining += r.time >= t0 ? 1 : 0;
    if (remaining < 10) continue;
    cert.delta = d.delta;
    cert.kappa = d.kappa;
    cert.t_start = t0;
    cert.fit = decay_fit(rows, d.kappa, t0);
    cert.certified = cert.fit.certified;
    cert.monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      if (r.time < t0) continue;
      if (r.energy_f > prev) cert.monotone = false;
      prev = r.energy_f;
    }
    return cert;
  }
  return cert;
}

InequalityCheck entropy_inequality_check(const Field2D& f1, const Field2D& f2, const Field2D& g1, const Field2D& g2,
                                         const PhysParams& params, const StripGrid& grid) {
  const Field2D* all[4] = {&f1, &f2, &g1, &g2};
  for (const Field2D* f : all) {
    if (f->rows() != grid.nx || f->cols() != grid.ny) throw InvalidArgument("field shape does not match grid");
    if (!(f->min() > 0.0)) throw InvalidArgument("fields must be strictly positive");
  }
  for (std::size_t j = 0; j < grid.ny; ++j) {
    for (std::size_t i : {std::size_t{0}, grid.nx - 1}) {
      if (f1(i, j) != g1(i, j) || f2(i, j) != g2(i, j)) throw InvalidArgument("boundary traces of f and g differ");
    }
  }
  Field2D rf(grid.nx, grid.ny), rg(grid.nx, grid.ny);
  for (std::size_t k = 0; k < rf.data().size(); ++k) {
    rf.data()[k] = f1.data()[k] - f2.data()[k];
    rg.data()[k] = g1.data()[k] - g2.data()[k];
  }
  const Field2D pf = solve_poisson_nodes(rf, grid, params.eps, 0.0, 0.0);
  const Field2D pg = solve_poisson_nodes(rg, grid, params.eps, 0.0, 0.0);
  Field2D dp(grid.nx, grid.ny);
  for (std::size_t k = 0; k < dp.data().size(); ++k) dp.data()[k] = pf.data()[k] - pg.data()[k];

  const double mf = std::max(f1.max(), f2.max());
  const double mg = std::max(g1.max(), g2.max());
  const double omega = 2.0 / std::max(mf, mg);
  const double l = grid.length;

  double ent = 0.0, rhs = 0.0;
  const Field2D* fs[2] = {&f1, &f2};
  const Field2D* gs[2] = {&g1, &g2};
  for (int s = 0; s < 2; ++s) {
    Field2D e(grid.nx, grid.ny), dpi(grid.nx, grid.ny);
    for (std::size_t k = 0; k < e.data().size(); ++k) {
      const double f = fs[s]->data()[k], g = gs[s]->data()[k];
      e.data()[k] = g * psi(f / g);
      dpi.data()[k] = std::log(f) - std::log(g) + kValence[s] * dp.data()[k];
    }
    ent += 0.5 * integrate_nodes(e, grid);
    rhs += gradient_norm_sq(dpi, grid);
  }
  InequalityCheck out;
  out.lhs = omega / (l * l) * (ent + params.eps * gradient_norm_sq(dp, grid));
  out.rhs = rhs;
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-8);
  return out;
}

InequalityCheck interpolation_check(const Field2D& f, const Field2D& g, const StripGrid& grid, double factor) {
  if (!(factor > 0.0)) throw InvalidArgument("interpolation_check: factor must be positive");
  if (f.rows() != grid.nx || f.cols() != grid.ny || g.rows() != grid.nx || g.cols() != grid.ny) {
    throw InvalidArgument("field shape does not match grid");
  }
  if (!(f.min() > 0.0) || !(g.min() > 0.0)) throw InvalidArgument("fields must be strictly positive");
  Field2D sq(grid.nx, grid.ny), e(grid.nx, grid.ny);
  for (std::size_t k = 0; k < sq.data().size(); ++k) {
    const double a = f.data()[k], b = g.data()[k];
    sq.data()[k] = (a - b) * (a - b);
    e.data()[k] = b * psi(a / b);
  }
  InequalityCheck out;
  out.lhs = integrate_nodes(sq, grid);
  out.rhs = factor * std::max(f.max(), g.max()) * integrate_nodes(e, grid);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-8);
  return out;
}

}  // namespace npslab

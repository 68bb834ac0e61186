#include <npslab/npslab.h>

#include <npslab/config.hpp>
#include <npslab/criteria.hpp>
#include <npslab/error.hpp>
#include <npslab/evolve.hpp>
#include <npslab/flowcheck.hpp>
#include <npslab/io.hpp>
#include <npslab/steady1d.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <sstream>
#include <string>

struct nps_config {
  npslab::AppConfig cfg;
};

struct nps_steady {
  npslab::SteadyResult result;
  npslab::StripBC bc;
  npslab::PhysParams params;
};

struct nps_evolution {
  npslab::EvolveConfig cfg;
  npslab::RunResult result;
  std::vector<std::string> snapshots;
};

namespace {

thread_local std::string g_last_error;

nps_status fail(nps_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

nps_status from_code(npslab::ErrorCode code) {
  switch (code) {
    case npslab::ErrorCode::InvalidArgument: return NPS_ERR_INVALID_ARGUMENT;
    case npslab::ErrorCode::Config: return NPS_ERR_CONFIG;
    case npslab::ErrorCode::Io: return NPS_ERR_IO;
    case npslab::ErrorCode::NoConvergence: return NPS_ERR_NO_CONVERGENCE;
    case npslab::ErrorCode::NewtonDivergence: return NPS_ERR_NEWTON_DIVERGENCE;
    case npslab::ErrorCode::PositivityLoss: return NPS_ERR_POSITIVITY;
    case npslab::ErrorCode::Cfl: return NPS_ERR_CFL;
  }
  return NPS_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
nps_status guarded(Fn&& fn) {
  try {
    fn();
    return NPS_OK;
  } catch (const npslab::Error& e) {
    return fail(from_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(NPS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NPS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NPS_ERR_INTERNAL, "unknown error");
  }
}

nps_status copy_out(const std::string& value, char* buf, std::size_t cap, std::size_t* needed) {
  if (needed) *needed = value.size() + 1;
  if (buf == nullptr || cap == 0) return NPS_OK;
  if (cap < value.size() + 1) return fail(NPS_ERR_INVALID_ARGUMENT, "buffer too small");
  std::memcpy(buf, value.c_str(), value.size() + 1);
  return NPS_OK;
}

#define NPS_REQUIRE(cond, msg) \
  do {                         \
    if (!(cond)) return fail(NPS_ERR_INVALID_ARGUMENT, msg); \
  } while (0)

}  // namespace

extern "C" {

const char* nps_version(void) { return "0.1.0"; }

const char* nps_last_error(void) { return g_last_error.c_str(); }

const char* nps_status_name(nps_status status) {
  switch (status) {
    case NPS_OK: return "ok";
    case NPS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NPS_ERR_CONFIG: return "configuration error";
    case NPS_ERR_IO: return "i/o error";
    case NPS_ERR_NO_CONVERGENCE: return "no convergence";
    case NPS_ERR_NEWTON_DIVERGENCE: return "newton divergence";
    case NPS_ERR_POSITIVITY: return "positivity loss";
    case NPS_ERR_CFL: return "time step too large";
    case NPS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

// ---- configuration ---------------------------------------------------------------

nps_status nps_config_new(nps_config** out) {
  NPS_REQUIRE(out, "out is NULL");
  return guarded([&] { *out = new nps_config{}; });
}

nps_status nps_config_load(const char* path, nps_config** out) {
  NPS_REQUIRE(path && out, "NULL argument");
  return guarded([&] { *out = new nps_config{npslab::load_config(path)}; });
}

nps_status nps_config_parse(const char* text, nps_config** out) {
  NPS_REQUIRE(text && out, "NULL argument");
  return guarded([&] {
    std::istringstream in(text);
    *out = new nps_config{npslab::parse_config(in, "<text>")};
  });
}

nps_status nps_config_clone(const nps_config* cfg, nps_config** out) {
  NPS_REQUIRE(cfg && out, "NULL argument");
  return guarded([&] { *out = new nps_config{cfg->cfg}; });
}

nps_status nps_config_set(nps_config* cfg, const char* key, const char* value) {
  NPS_REQUIRE(cfg && key && value, "NULL argument");
  return guarded([&] { npslab::set_config_value(cfg->cfg, key, value); });
}

nps_status nps_config_get(const nps_config* cfg, const char* key, char* buf, size_t cap, size_t* needed) {
  NPS_REQUIRE(cfg && key, "NULL argument");
  std::string value;
  const nps_status s = guarded([&] { value = npslab::get_config_value(cfg->cfg, key); });
  return s == NPS_OK ? copy_out(value, buf, cap, needed) : s;
}

nps_status nps_config_validate(const nps_config* cfg) {
  NPS_REQUIRE(cfg, "NULL argument");
  return guarded([&] { cfg->cfg.validate(); });
}

nps_status nps_config_format(const nps_config* cfg, char* buf, size_t cap, size_t* needed) {
  NPS_REQUIRE(cfg, "NULL argument");
  return copy_out(npslab::format_config(cfg->cfg), buf, cap, needed);
}

void nps_config_free(nps_config* cfg) { delete cfg; }

// ---- steady ----------------------------------------------------------------------

nps_status nps_steady_solve(const nps_config* cfg, nps_steady** out) {
  NPS_REQUIRE(cfg && out, "NULL argument");
  return guarded([&] {
    const auto& c = cfg->cfg;
    c.validate();
    auto result = npslab::solve_steady_1d(c.params, c.bc, c.make_grid(), c.solver);
    *out = new nps_steady{std::move(result), c.bc, c.params};
  });
}

size_t nps_steady_size(const nps_steady* st) { return st ? st->result.state.grid.size() : 0; }

nps_status nps_steady_profiles(const nps_steady* st, double* x, double* c1, double* c2, double* phi) {
  NPS_REQUIRE(st, "NULL argument");
  const auto& s = st->result.state;
  for (std::size_t k = 0; k < s.grid.size(); ++k) {
    if (x) x[k] = s.grid[k];
    if (c1) c1[k] = s.c1[k];
    if (c2) c2[k] = s.c2[k];
    if (phi) phi[k] = s.phi[k];
  }
  return NPS_OK;
}

nps_status nps_steady_currents(const nps_steady* st, nps_currents* out) {
  NPS_REQUIRE(st && out, "NULL argument");
  return guarded([&] {
    const auto r = npslab::currents(st->result.state);
    *out = {r.j1, r.j2, r.flux_deviation1, r.flux_deviation2};
  });
}

nps_status nps_steady_bounds(const nps_steady* st, nps_bounds* out) {
  NPS_REQUIRE(st && out, "NULL argument");
  return guarded([&] {
    const auto b = npslab::check_bounds(st->result.state, st->bc);
    *out = {b.lambda1,   b.lambda2,   b.Lambda1, b.Lambda2,         b.v_lo,           b.v_hi,
            b.gamma_lo,  b.gamma_hi,  b.slack_eta, b.slack_phi,     b.slack_c,        b.worst_violation,
            b.slack_eta_left, b.slack_eta_right};
  });
}

nps_status nps_steady_info_get(const nps_steady* st, nps_steady_info* out) {
  NPS_REQUIRE(st && out, "NULL argument");
  return guarded([&] {
    const auto& i = st->result.info;
    const auto r = npslab::residual_steady(st->result.state, st->params);
    *out = {i.outer_iterations, i.newton_iterations, i.continuation_levels, i.last_update, r.r1, r.r2, r.rphi};
  });
}

nps_status nps_steady_write_table(const nps_steady* st, const char* path) {
  NPS_REQUIRE(st && path, "NULL argument");
  return guarded([&] { npslab::write_csv_file(path, npslab::state_table(st->result.state)); });
}

void nps_steady_free(nps_steady* st) { delete st; }

// ---- criteria --------------------------------------------------------------------

nps_status nps_criteria_evaluate(const nps_config* cfg, double j1, double j2, nps_stability_report* out) {
  NPS_REQUIRE(cfg && out, "NULL argument");
  return guarded([&] {
    const auto r = npslab::stability_report(cfg->cfg.params, cfg->cfg.bc, j1, j2);
    nps_stability_report o{};
    o.g1 = r.g1;
    o.g2 = r.g2;
    o.j1 = r.j1;
    o.j2 = r.j2;
    o.lhs1 = r.lhs1;
    o.lhs2 = r.lhs2;
    o.margin = r.margin;
    o.weak_current_ok = r.weak_current_ok;
    o.m1_delta = r.m1_delta;
    o.m2_delta = r.m2_delta;
    o.kappa1_delta = r.kappa1_delta;
    o.kappa2_delta = r.kappa2_delta;
    o.kappa_delta = r.kappa_delta;
    o.kappa_fluid = r.kappa_fluid;
    o.delta_used = r.delta_used;
    o.suff_log_lhs1 = r.sufficient.log_lhs1;
    o.suff_log_lhs2 = r.sufficient.log_lhs2;
    o.suff_exp_lhs1 = r.sufficient.exp_lhs1;
    o.suff_exp_lhs2 = r.sufficient.exp_lhs2;
    o.suff_log_ok = r.suff_log_ok;
    o.suff_exp_ok = r.suff_exp_ok;
    *out = o;
  });
}

nps_status nps_decay_rate(const nps_config* cfg, double j1, double j2, double delta, double* kappa1, double* kappa2,
                          double* kappa) {
  NPS_REQUIRE(cfg, "NULL argument");
  return guarded([&] {
    const auto d = npslab::decay_rate(cfg->cfg.params, cfg->cfg.bc, j1, j2, delta);
    if (kappa1) *kappa1 = d.kappa1;
    if (kappa2) *kappa2 = d.kappa2;
    if (kappa) *kappa = d.kappa;
  });
}

// ---- flowcheck -------------------------------------------------------------------

namespace {

void fill_flow(const npslab::FlowIndicator& f, nps_flow_result* out, double* ci1, double* ci2, std::size_t cap) {
  *out = {f.i1, f.i2, f.tolerance, f.predicts_flow, f.components.size()};
  for (std::size_t k = 0; k < f.components.size() && k < cap; ++k) {
    if (ci1) ci1[k] = f.components[k].i1;
    if (ci2) ci2[k] = f.components[k].i2;
  }
}

}  // namespace

nps_status nps_flowcheck_file(const char* path, double tol, nps_flow_result* out, double* comp_i1, double* comp_i2,
                              size_t capacity) {
  NPS_REQUIRE(path && out, "NULL argument");
  return guarded([&] {
    const auto curve = npslab::read_curve_file(path);
    fill_flow(npslab::flow_indicator(curve, tol), out, comp_i1, comp_i2, capacity);
  });
}

nps_status nps_flowcheck_samples(const double* s, const double* x, const double* y, const double* gamma1,
                                 const double* gamma2, const double* w, size_t n, double tol, nps_flow_result* out) {
  NPS_REQUIRE(s && x && y && gamma1 && gamma2 && w && out, "NULL argument");
  return guarded([&] {
    npslab::BoundaryCurve2D curve;
    curve.components.emplace_back();
    for (std::size_t k = 0; k < n; ++k) curve.components[0].push_back({s[k], x[k], y[k], gamma1[k], gamma2[k], w[k]});
    fill_flow(npslab::flow_indicator(curve, tol), out, nullptr, nullptr, 0);
  });
}

// ---- evolution -------------------------------------------------------------------

nps_status nps_evolution_run(const nps_config* cfg, const char* snapshot_dir, nps_evolution** out) {
  NPS_REQUIRE(cfg && out, "NULL argument");
  return guarded([&] {
    cfg->cfg.validate();
    auto ev = std::make_unique<nps_evolution>();
    ev->cfg = cfg->cfg.evolve_config();
    npslab::SnapshotCallback cb;
    if (snapshot_dir != nullptr && ev->cfg.snapshot_every > 0) {
      std::filesystem::create_directories(snapshot_dir);
      const std::string dir = snapshot_dir;
      const double dt = ev->cfg.dt;
      auto* list = &ev->snapshots;
      cb = [dir, dt, list](const npslab::StripState2D& s) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%06ld.txt", std::lround(s.time / dt));
        const std::string path = (std::filesystem::path(dir) / name).string();
        npslab::write_snapshot_file(path, s);
        list->push_back(path);
      };
    }
    ev->result = npslab::run(ev->cfg, nullptr, cb);
    *out = ev.release();
  });
}

size_t nps_evolution_rows(const nps_evolution* ev) { return ev ? ev->result.rows.size() : 0; }

size_t nps_evolution_columns(void) { return npslab::diagnostics_columns().size(); }

const char* nps_evolution_column_name(size_t k) {
  const auto& cols = npslab::diagnostics_columns();
  return k < cols.size() ? cols[k].c_str() : nullptr;
}

nps_status nps_evolution_row(const nps_evolution* ev, size_t k, double* values) {
  NPS_REQUIRE(ev && values, "NULL argument");
  NPS_REQUIRE(k < ev->result.rows.size(), "row index out of range");
  const auto v = npslab::diagnostics_values(ev->result.rows[k]);
  std::copy(v.begin(), v.end(), values);
  return NPS_OK;
}

nps_status nps_evolution_info_get(const nps_evolution* ev, nps_evolution_info* out) {
  NPS_REQUIRE(ev && out, "NULL argument");
  const auto& r = ev->result;
  *out = {r.steps, r.entry_time, r.band_delta, r.reference.j1, r.reference.j2, ev->snapshots.size()};
  return NPS_OK;
}

nps_status nps_evolution_write_csv(const nps_evolution* ev, const char* path) {
  NPS_REQUIRE(ev && path, "NULL argument");
  return guarded([&] {
    npslab::CsvTable t;
    t.header = npslab::diagnostics_columns();
    for (const auto& r : ev->result.rows) t.rows.push_back(npslab::diagnostics_values(r));
    npslab::write_csv_file(path, t);
  });
}

nps_status nps_evolution_write_final(const nps_evolution* ev, const char* path) {
  NPS_REQUIRE(ev && path, "NULL argument");
  return guarded([&] { npslab::write_snapshot_file(path, ev->result.final_state); });
}

nps_status nps_evolution_snapshot_path(const nps_evolution* ev, size_t k, char* buf, size_t cap, size_t* needed) {
  NPS_REQUIRE(ev, "NULL argument");
  NPS_REQUIRE(k < ev->snapshots.size(), "snapshot index out of range");
  return copy_out(ev->snapshots[k], buf, cap, needed);
}

nps_status nps_evolution_certify(const nps_evolution* ev, nps_decay_certificate* out) {
  NPS_REQUIRE(ev && out, "NULL argument");
  return guarded([&] {
    const auto& r = ev->result;
    const auto c = npslab::certify_decay(r.rows, ev->cfg.params, ev->cfg.bc, r.reference.j1, r.reference.j2);
    *out = {c.applicable, c.certified, c.monotone, c.fit.vacuous, c.delta, c.kappa, c.t_start,
            c.fit.fitted_rate, c.fit.worst_ratio, c.fit.samples};
  });
}

void nps_evolution_free(nps_evolution* ev) { delete ev; }

}  // extern "C"

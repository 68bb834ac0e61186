// npslab command-line front end. Talks to the library only through the C interface.

#include <npslab/npslab.h>

#include "svg_chart.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#ifndef NPS_ACCEPTANCE_PATH
#define NPS_ACCEPTANCE_PATH ""
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 2;
constexpr int kExitUsage = 64;

struct Failure {
  int code;
  std::string message;
};

int exit_code_for(nps_status s) {
  switch (s) {
    case NPS_OK: return kExitOk;
    case NPS_ERR_INVALID_ARGUMENT:
    case NPS_ERR_CONFIG:
    case NPS_ERR_IO: return kExitUsage;
    default: return kExitNumeric;
  }
}

void check(nps_status s, const std::string& what) {
  if (s != NPS_OK) throw Failure{exit_code_for(s), what + ": " + nps_last_error()};
}

using ConfigPtr = std::unique_ptr<nps_config, decltype(&nps_config_free)>;
using SteadyPtr = std::unique_ptr<nps_steady, decltype(&nps_steady_free)>;
using EvolutionPtr = std::unique_ptr<nps_evolution, decltype(&nps_evolution_free)>;

struct Common {
  std::string config;
  std::string out;
  std::size_t grid = 0;
  std::optional<unsigned long long> seed;
  std::vector<std::string> set;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "configuration file (defaults when omitted)");
  cmd->add_option("--out", c.out, "output directory (default: $NPS_OUT_DIR or .)");
  cmd->add_option("--seed", c.seed, "seed for randomized initial data");
  cmd->add_option("--set", c.set, "override a configuration value, key=value")->take_all();
}

std::string out_dir(const Common& c) {
  std::string dir = c.out;
  if (dir.empty()) {
    const char* env = std::getenv("NPS_OUT_DIR");
    dir = env && *env ? env : ".";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kExitUsage, "cannot create output directory '" + dir + "': " + ec.message()};
  return dir;
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void set_value(nps_config* cfg, const std::string& key, const std::string& value) {
  check(nps_config_set(cfg, key.c_str(), value.c_str()), "setting " + key);
}

std::string get_value(const nps_config* cfg, const std::string& key) {
  std::size_t needed = 0;
  check(nps_config_get(cfg, key.c_str(), nullptr, 0, &needed), "reading " + key);
  std::string buf(needed, '\0');
  check(nps_config_get(cfg, key.c_str(), buf.data(), buf.size(), &needed), "reading " + key);
  buf.resize(needed - 1);
  return buf;
}

ConfigPtr load_config(const Common& c) {
  nps_config* raw = nullptr;
  if (c.config.empty()) {
    check(nps_config_new(&raw), "creating configuration");
  } else {
    check(nps_config_load(c.config.c_str(), &raw), "loading configuration");
  }
  ConfigPtr cfg(raw, nps_config_free);
  for (const auto& kv : c.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Failure{kExitUsage, "--set expects key=value, got '" + kv + "'"};
    set_value(cfg.get(), kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) set_value(cfg.get(), "evolve.seed", std::to_string(*c.seed));
  return cfg;
}

void validate(const nps_config* cfg) { check(nps_config_validate(cfg), "configuration"); }

SteadyPtr solve_steady(const nps_config* cfg) {
  nps_steady* raw = nullptr;
  check(nps_steady_solve(cfg, &raw), "steady solve");
  return SteadyPtr(raw, nps_steady_free);
}

void emit(const json& summary, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Failure{kExitUsage, "cannot write '" + path + "'"};
  f << summary.dump(2) << '\n';
  std::cout << summary.dump(2) << std::endl;
}

json currents_json(const nps_currents& c) {
  return {{"j1", c.j1}, {"j2", c.j2}, {"flux_deviation1", c.flux_deviation1}, {"flux_deviation2", c.flux_deviation2}};
}

json bounds_json(const nps_bounds& b) {
  return {{"lambda1", b.lambda1},     {"lambda2", b.lambda2},
          {"Lambda1", b.Lambda1},     {"Lambda2", b.Lambda2},
          {"v_lo", b.v_lo},           {"v_hi", b.v_hi},
          {"gamma_lo", b.gamma_lo},   {"gamma_hi", b.gamma_hi},
          {"slack_eta", b.slack_eta}, {"slack_phi", b.slack_phi},
          {"slack_c", b.slack_c},     {"worst_violation", b.worst_violation}};
}

json report_json(const nps_stability_report& r) {
  return {{"j1", r.j1},
          {"j2", r.j2},
          {"g1", r.g1},
          {"g2", r.g2},
          {"lhs1", r.lhs1},
          {"lhs2", r.lhs2},
          {"margin", r.margin},
          {"weak_current_ok", r.weak_current_ok != 0},
          {"delta", r.delta_used},
          {"m1_delta", r.m1_delta},
          {"m2_delta", r.m2_delta},
          {"kappa1_delta", r.kappa1_delta},
          {"kappa2_delta", r.kappa2_delta},
          {"kappa_fluid", r.kappa_fluid},
          {"kappa_delta", r.kappa_delta},
          {"sufficient",
           {{"log_form", {{"lhs1", r.suff_log_lhs1}, {"lhs2", r.suff_log_lhs2}, {"ok", r.suff_log_ok != 0}}},
            {"exp_form", {{"lhs1", r.suff_exp_lhs1}, {"lhs2", r.suff_exp_lhs2}, {"ok", r.suff_exp_ok != 0}}}}}};
}

// ---- steady ----------------------------------------------------------------------

struct Profiles {
  std::vector<double> x, c1, c2, phi;
};

Profiles profiles(const nps_steady* st) {
  Profiles p;
  const std::size_t n = nps_steady_size(st);
  p.x.resize(n);
  p.c1.resize(n);
  p.c2.resize(n);
  p.phi.resize(n);
  check(nps_steady_profiles(st, p.x.data(), p.c1.data(), p.c2.data(), p.phi.data()), "profiles");
  return p;
}

// Nested grids (n0 - 1) 2^k + 1; the error of level k is its max nodal distance to
// level k + 1 over c1, c2 and phi.
json refinement_table(const nps_config* base, std::size_t n0, int levels, const std::string& csv_path) {
  std::vector<Profiles> sols;
  std::vector<std::size_t> sizes;
  for (int k = 0; k <= levels; ++k) {
    const std::size_t n = (n0 - 1) * (std::size_t{1} << k) + 1;
    nps_config* raw = nullptr;
    check(nps_config_clone(base, &raw), "clone");
    ConfigPtr cfg(raw, nps_config_free);
    set_value(cfg.get(), "grid.n", std::to_string(n));
    auto st = solve_steady(cfg.get());
    sols.push_back(profiles(st.get()));
    sizes.push_back(n);
  }
  std::vector<double> err(sizes.size(), std::nan("")), order(sizes.size(), std::nan(""));
  for (std::size_t k = 0; k + 1 < sols.size(); ++k) {
    double e = 0.0;
    for (std::size_t i = 0; i < sols[k].x.size(); ++i) {
      const std::size_t f = 2 * i;
      e = std::max({e, std::abs(sols[k].c1[i] - sols[k + 1].c1[f]), std::abs(sols[k].c2[i] - sols[k + 1].c2[f]),
                    std::abs(sols[k].phi[i] - sols[k + 1].phi[f])});
    }
    err[k] = e;
  }
  // differences at rounding level (e.g. an exactly representable solution) carry no order
  double scale = 1.0;
  for (const auto& s : sols) {
    for (const auto* v : {&s.c1, &s.c2, &s.phi}) {
      for (double x : *v) scale = std::max(scale, std::abs(x));
    }
  }
  const double floor = 1e-12 * scale;
  bool rounding_only = true;
  for (std::size_t k = 0; k + 1 < sols.size(); ++k) {
    rounding_only = rounding_only && err[k] <= floor;
    if (k > 0 && err[k - 1] > floor && err[k] > floor) order[k] = std::log2(err[k - 1] / err[k]);
  }
  std::ofstream csv(csv_path);
  if (!csv) throw Failure{kExitUsage, "cannot write '" + csv_path + "'"};
  csv << "n,error,order\n";
  json rows = json::array();
  double min_order = std::nan("");
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    csv << sizes[k] << ',' << format_double(err[k]) << ',' << format_double(order[k]) << '\n';
    rows.push_back({{"n", sizes[k]}, {"error", err[k]}, {"order", order[k]}});
    if (!std::isnan(order[k])) min_order = std::isnan(min_order) ? order[k] : std::min(min_order, order[k]);
  }
  return {{"levels", rows}, {"min_order", min_order}, {"rounding_only", rounding_only}, {"table", csv_path}};
}

int cmd_steady(const Common& c, int refine) {
  auto cfg = load_config(c);
  if (c.grid) set_value(cfg.get(), "grid.n", std::to_string(c.grid));
  validate(cfg.get());
  const std::string dir = out_dir(c);
  auto st = solve_steady(cfg.get());

  nps_currents cur{};
  nps_bounds bounds{};
  nps_steady_info info{};
  check(nps_steady_currents(st.get(), &cur), "currents");
  check(nps_steady_bounds(st.get(), &bounds), "bounds");
  check(nps_steady_info_get(st.get(), &info), "solver info");

  const std::string table = join(dir, "steady.csv");
  check(nps_steady_write_table(st.get(), table.c_str()), "writing state table");

  json s;
  s["command"] = "steady";
  s["config"] = c.config;
  s["grid_n"] = nps_steady_size(st.get());
  s["currents"] = currents_json(cur);
  s["bounds"] = bounds_json(bounds);
  s["solver"] = {{"outer_iterations", info.outer_iterations},
                 {"newton_iterations", info.newton_iterations},
                 {"continuation_levels", info.continuation_levels},
                 {"last_update", info.last_update}};
  s["residuals"] = {{"c1", info.residual1}, {"c2", info.residual2}, {"phi", info.residual_phi}};
  json paths = {{"state_table", table}};
  if (refine > 0) {
    const std::string conv = join(dir, "convergence.csv");
    s["convergence"] = refinement_table(cfg.get(), nps_steady_size(st.get()), refine, conv);
    paths["convergence"] = conv;
  }
  const std::string summary = join(dir, "steady_summary.json");
  paths["summary"] = summary;
  s["paths"] = paths;
  emit(s, summary);
  return kExitOk;
}

// ---- criteria --------------------------------------------------------------------

json criteria_summary(const nps_config* cfg) {
  auto st = solve_steady(cfg);
  nps_currents cur{};
  nps_bounds bounds{};
  check(nps_steady_currents(st.get(), &cur), "currents");
  check(nps_steady_bounds(st.get(), &bounds), "bounds");
  nps_stability_report rep{};
  check(nps_criteria_evaluate(cfg, cur.j1, cur.j2, &rep), "criteria");
  json scan = json::array();
  for (int k = 0; k <= 10; ++k) {
    const double delta = 0.05 * k * bounds.gamma_lo;
    double k1 = 0, k2 = 0, kk = 0;
    check(nps_decay_rate(cfg, cur.j1, cur.j2, delta, &k1, &k2, &kk), "decay rate");
    scan.push_back({{"delta", delta}, {"kappa1", k1}, {"kappa2", k2}, {"kappa", kk}});
  }
  json s = report_json(rep);
  s["scan"] = scan;
  s["gamma_lo"] = bounds.gamma_lo;
  s["gamma_hi"] = bounds.gamma_hi;
  return s;
}

int cmd_criteria(const Common& c) {
  auto cfg = load_config(c);
  if (c.grid) set_value(cfg.get(), "grid.n", std::to_string(c.grid));
  validate(cfg.get());
  const std::string dir = out_dir(c);
  json s;
  s["command"] = "criteria";
  s["config"] = c.config;
  s["report"] = criteria_summary(cfg.get());
  const std::string path = join(dir, "criteria_summary.json");
  s["paths"] = {{"summary", path}};
  emit(s, path);
  return kExitOk;
}

// ---- evolve ----------------------------------------------------------------------

struct Diagnostics {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::vector<double> column(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    std::vector<double> v;
    if (it == names.end()) return v;
    const auto k = static_cast<std::size_t>(it - names.begin());
    for (const auto& r : rows) v.push_back(r[k]);
    return v;
  }
};

Diagnostics diagnostics(const nps_evolution* ev) {
  Diagnostics d;
  const std::size_t nc = nps_evolution_columns();
  for (std::size_t k = 0; k < nc; ++k) d.names.emplace_back(nps_evolution_column_name(k));
  for (std::size_t r = 0; r < nps_evolution_rows(ev); ++r) {
    std::vector<double> v(nc);
    check(nps_evolution_row(ev, r, v.data()), "diagnostics");
    d.rows.push_back(std::move(v));
  }
  return d;
}

json certificate_json(const nps_decay_certificate& c) {
  return {{"applicable", c.applicable != 0}, {"certified", c.certified != 0}, {"monotone", c.monotone != 0},
          {"vacuous", c.vacuous != 0},       {"delta", c.delta},             {"kappa", c.kappa},
          {"t_start", c.t_start},            {"fitted_rate", c.fitted_rate}, {"worst_ratio", c.worst_ratio},
          {"samples", c.samples}};
}

EvolutionPtr run_evolution(const nps_config* cfg, const char* snapshot_dir) {
  nps_evolution* raw = nullptr;
  check(nps_evolution_run(cfg, snapshot_dir, &raw), "evolution");
  return EvolutionPtr(raw, nps_evolution_free);
}

int cmd_evolve(const Common& c, bool certify, bool plot) {
  auto cfg = load_config(c);
  if (c.grid) set_value(cfg.get(), "evolve.nx", std::to_string(c.grid));
  validate(cfg.get());
  const std::string dir = out_dir(c);
  const bool snapshots = std::stol(get_value(cfg.get(), "evolve.snapshot_every")) > 0;
  const std::string snap_dir = join(dir, "snapshots");

  auto ev = run_evolution(cfg.get(), snapshots ? snap_dir.c_str() : nullptr);
  nps_evolution_info info{};
  check(nps_evolution_info_get(ev.get(), &info), "evolution info");

  const std::string diag_csv = join(dir, "diagnostics.csv"), final_txt = join(dir, "final_state.txt");
  check(nps_evolution_write_csv(ev.get(), diag_csv.c_str()), "writing diagnostics");
  check(nps_evolution_write_final(ev.get(), final_txt.c_str()), "writing final state");
  json paths = {{"diagnostics", diag_csv}, {"final_state", final_txt}};
  if (snapshots) {
    json list = json::array();
    for (std::size_t k = 0; k < info.snapshots; ++k) {
      std::size_t needed = 0;
      check(nps_evolution_snapshot_path(ev.get(), k, nullptr, 0, &needed), "snapshot path");
      std::string p(needed, '\0');
      check(nps_evolution_snapshot_path(ev.get(), k, p.data(), p.size(), &needed), "snapshot path");
      p.resize(needed - 1);
      list.push_back(p);
    }
    paths["snapshots"] = list;
  }

  const Diagnostics d = diagnostics(ev.get());
  const auto t = d.column("time"), mhi = d.column("m_hi"), mlo = d.column("m_lo"), F = d.column("energy_f");
  double hi_rise = 0.0, lo_drop = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    hi_rise = std::max(hi_rise, mhi[k] - mhi[k - 1]);
    lo_drop = std::max(lo_drop, mlo[k - 1] - mlo[k]);
  }

  json s;
  s["command"] = "evolve";
  s["config"] = c.config;
  s["steps"] = info.steps;
  s["samples"] = d.rows.size();
  s["reference_currents"] = {{"j1", info.j1}, {"j2", info.j2}};
  s["band_delta"] = info.band_delta;
  s["entry_time"] = info.entry_time;
  s["monitors"] = {{"max_rise_m_hi", hi_rise},
                   {"max_drop_m_lo", lo_drop},
                   {"m_hi_initial", mhi.empty() ? std::nan("") : mhi.front()},
                   {"m_hi_final", mhi.empty() ? std::nan("") : mhi.back()},
                   {"m_lo_initial", mlo.empty() ? std::nan("") : mlo.front()},
                   {"m_lo_final", mlo.empty() ? std::nan("") : mlo.back()}};
  if (!d.rows.empty()) {
    json first, last;
    for (std::size_t k = 0; k < d.names.size(); ++k) {
      first[d.names[k]] = d.rows.front()[k];
      last[d.names[k]] = d.rows.back()[k];
    }
    s["initial"] = first;
    s["final"] = last;
  }

  int code = kExitOk;
  if (certify) {
    nps_decay_certificate cert{};
    check(nps_evolution_certify(ev.get(), &cert), "certification");
    s["certificate"] = certificate_json(cert);
    if (cert.applicable && !cert.certified) code = kExitNumeric;
  }
  if (plot) {
    const std::string energy_svg = join(dir, "energy.svg"), monitors_svg = join(dir, "monitors.svg");
    const bool ok1 = nps_cli::write_line_chart(energy_svg, "relative energy F(t)", {{"F", t, F, "#1f77b4"}}, true);
    const bool ok2 = nps_cli::write_line_chart(monitors_svg, "concentration range",
                                               {{"max c", t, mhi, "#d62728"}, {"min c", t, mlo, "#2ca02c"}}, false);
    if (!ok1 || !ok2) throw Failure{kExitUsage, "cannot write plots in '" + dir + "'"};
    paths["plot_energy"] = energy_svg;
    paths["plot_monitors"] = monitors_svg;
  }
  const std::string summary = join(dir, "evolve_summary.json");
  paths["summary"] = summary;
  s["paths"] = paths;
  emit(s, summary);
  return code;
}

// ---- flowcheck -------------------------------------------------------------------

int cmd_flowcheck(const Common& c, const std::string& curve, double tol, bool verbose) {
  const std::string dir = out_dir(c);
  nps_flow_result r{};
  check(nps_flowcheck_file(curve.c_str(), tol, &r, nullptr, nullptr, 0), "flowcheck");
  std::vector<double> ci1(r.components), ci2(r.components);
  check(nps_flowcheck_file(curve.c_str(), tol, &r, ci1.data(), ci2.data(), ci1.size()), "flowcheck");

  json s;
  s["command"] = "flowcheck";
  s["curve"] = curve;
  s["i1"] = r.i1;
  s["i2"] = r.i2;
  s["tolerance"] = r.tolerance;
  s["predicts_flow"] = r.predicts_flow != 0;
  s["n_components"] = r.components;
  if (verbose) {
    json comps = json::array();
    for (std::size_t k = 0; k < ci1.size(); ++k) {
      comps.push_back({{"i1", ci1[k]}, {"i2", ci2[k]}, {"i1_plus_i2", ci1[k] + ci2[k]}});
    }
    s["components"] = comps;
  }
  const std::string path = join(dir, "flowcheck_summary.json");
  s["paths"] = {{"summary", path}};
  emit(s, path);
  return kExitOk;
}

// ---- sweep -----------------------------------------------------------------------

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

// "key=v1,v2;key2=w1" -> axes; the empty string gives no axes (a single point).
std::vector<SweepAxis> parse_sweep(const std::string& spec, const nps_config* base) {
  std::vector<SweepAxis> axes;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ';')) {
    part = trim(part);
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw Failure{kExitUsage, "sweep: expected key=v1,v2,... in '" + part + "'"};
    SweepAxis a{trim(part.substr(0, eq)), {}};
    std::stringstream vs(part.substr(eq + 1));
    std::string v;
    while (std::getline(vs, v, ',')) {
      v = trim(v);
      if (v.empty()) throw Failure{kExitUsage, "sweep: empty value for '" + a.key + "'"};
      a.values.push_back(v);
    }
    if (a.values.empty()) throw Failure{kExitUsage, "sweep: no values for '" + a.key + "'"};
    for (const auto& other : axes) {
      if (other.key == a.key) throw Failure{kExitUsage, "sweep: key '" + a.key + "' listed twice"};
    }
    nps_config* probe = nullptr;
    check(nps_config_clone(base, &probe), "clone");
    ConfigPtr p(probe, nps_config_free);
    for (const auto& val : a.values) {
      if (nps_config_set(p.get(), a.key.c_str(), val.c_str()) != NPS_OK) {
        throw Failure{kExitUsage, "sweep: " + std::string(nps_last_error())};
      }
    }
    axes.push_back(std::move(a));
  }
  return axes;
}

struct SweepRow {
  std::vector<std::string> point;
  int status = NPS_OK;
  std::string error;
  std::vector<double> values;
};

const std::vector<std::string>& sweep_columns(bool with_evolve) {
  static const std::vector<std::string> base{"j1",           "j2",          "g1",          "g2",
                                             "lhs1",         "lhs2",        "margin",      "weak_current_ok",
                                             "delta",        "kappa1_delta", "kappa2_delta", "kappa_fluid",
                                             "kappa_delta",  "suff_log_ok", "suff_exp_ok"};
  static const std::vector<std::string> full = [] {
    auto v = base;
    for (const char* n : {"entry_time", "fitted_rate", "certified"}) v.emplace_back(n);
    return v;
  }();
  return with_evolve ? full : base;
}

SweepRow sweep_point(const nps_config* base, const std::vector<SweepAxis>& axes, std::size_t index, bool with_evolve) {
  SweepRow row;
  std::vector<std::size_t> pick(axes.size());
  for (std::size_t a = axes.size(); a-- > 0;) {
    pick[a] = index % axes[a].values.size();
    index /= axes[a].values.size();
  }
  try {
    nps_config* raw = nullptr;
    check(nps_config_clone(base, &raw), "clone");
    ConfigPtr cfg(raw, nps_config_free);
    for (std::size_t a = 0; a < axes.size(); ++a) {
      row.point.push_back(axes[a].values[pick[a]]);
      set_value(cfg.get(), axes[a].key, axes[a].values[pick[a]]);
    }
    validate(cfg.get());
    auto st = solve_steady(cfg.get());
    nps_currents cur{};
    check(nps_steady_currents(st.get(), &cur), "currents");
    nps_stability_report r{};
    check(nps_criteria_evaluate(cfg.get(), cur.j1, cur.j2, &r), "criteria");
    row.values = {r.j1,           r.j2,           r.g1,          r.g2,
                  r.lhs1,         r.lhs2,         r.margin,      double(r.weak_current_ok),
                  r.delta_used,   r.kappa1_delta, r.kappa2_delta, r.kappa_fluid,
                  r.kappa_delta,  double(r.suff_log_ok), double(r.suff_exp_ok)};
    if (with_evolve) {
      auto ev = run_evolution(cfg.get(), nullptr);
      nps_evolution_info info{};
      check(nps_evolution_info_get(ev.get(), &info), "evolution info");
      nps_decay_certificate cert{};
      check(nps_evolution_certify(ev.get(), &cert), "certification");
      row.values.push_back(info.entry_time);
      row.values.push_back(cert.fitted_rate);
      row.values.push_back(cert.certified);
    }
  } catch (const Failure& f) {
    row.status = f.code;
    row.error = f.message;
    row.values.assign(sweep_columns(with_evolve).size(), std::nan(""));
  }
  return row;
}

int cmd_sweep(const Common& c, const std::string& spec, int jobs, bool with_evolve) {
  auto cfg = load_config(c);
  if (c.grid) set_value(cfg.get(), "grid.n", std::to_string(c.grid));
  validate(cfg.get());
  const auto axes = parse_sweep(spec, cfg.get());
  const std::string dir = out_dir(c);

  std::size_t total = 1;
  for (const auto& a : axes) total *= a.values.size();
  std::vector<SweepRow> rows(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < total;) rows[k] = sweep_point(cfg.get(), axes, k, with_evolve);
  };
  const auto nthreads = static_cast<std::size_t>(std::clamp(jobs, 1, 256));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(nthreads, total); ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  const std::string csv_path = join(dir, "sweep.csv");
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw Failure{kExitUsage, "cannot write '" + csv_path + "'"};
  for (const auto& a : axes) csv << a.key << ',';
  csv << "status";
  for (const auto& n : sweep_columns(with_evolve)) csv << ',' << n;
  csv << '\n';
  int code = kExitOk;
  json failures = json::array();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    for (const auto& v : r.point) csv << v << ',';
    csv << r.status;
    for (double v : r.values) csv << ',' << format_double(v);
    csv << '\n';
    if (r.status != NPS_OK) {
      code = std::max(code, r.status);
      failures.push_back({{"row", k}, {"error", r.error}});
    }
  }
  csv.close();

  json s;
  s["command"] = "sweep";
  s["config"] = c.config;
  s["spec"] = spec;
  s["points"] = total;
  s["failures"] = failures;
  const std::string path = join(dir, "sweep_summary.json");
  s["paths"] = {{"table", csv_path}, {"summary", path}};
  emit(s, path);
  return code;
}

// ---- selftest --------------------------------------------------------------------

std::string acceptance_binary(const char* argv0) {
  if (const char* env = std::getenv("NPS_ACCEPTANCE"); env && *env) return env;
  const std::string built = NPS_ACCEPTANCE_PATH;
  if (!built.empty() && fs::exists(built)) return built;
  std::error_code ec;
  fs::path self = fs::read_symlink("/proc/self/exe", ec);
  if (ec) self = fs::absolute(argv0, ec);
  return (self.parent_path() / "nps_acceptance").string();
}

int cmd_selftest(const char* argv0) {
  const std::string bin = acceptance_binary(argv0);
  if (!fs::exists(bin)) throw Failure{kExitUsage, "acceptance binary not found at '" + bin + "' (set NPS_ACCEPTANCE)"};
  std::cout << "running " << bin << std::endl;
  const int rc = std::system(("\"" + bin + "\"").c_str());
  return rc == 0 ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"npslab: steady currents, stability criteria and strip simulations for two-ion electrolytes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(nps_version()));

  Common common;
  int refine = 0;
  bool certify = false, plot = false, verbose = false, with_evolve = false;
  double tol = -1.0;
  int jobs = 1;
  std::string curve, sweep_spec;

  auto* steady = app.add_subcommand("steady", "solve the one-dimensional steady problem");
  add_common(steady, common);
  steady->add_option("--grid", common.grid, "number of grid nodes");
  steady->add_option("--refine", refine, "refinement levels for a self-convergence table")->check(CLI::Range(0, 8));

  auto* criteria = app.add_subcommand("criteria", "evaluate the stability criteria at the steady state");
  add_common(criteria, common);
  criteria->add_option("--grid", common.grid, "number of grid nodes");

  auto* evolve = app.add_subcommand("evolve", "run the time-dependent strip simulation");
  add_common(evolve, common);
  evolve->add_option("--grid", common.grid, "nodes across the strip (evolve.nx)");
  evolve->add_flag("--certify", certify, "certify exponential decay of the relative energy");
  evolve->add_flag("--plot", plot, "write SVG charts of the energy and concentration range");

  auto* flow = app.add_subcommand("flowcheck", "evaluate the boundary flow indicator for a curve file");
  add_common(flow, common);
  flow->add_option("curve", curve, "curve file with columns s x y gamma1 gamma2 w")->required();
  flow->add_option("--tol", tol, "decision tolerance (negative: scale-relative default)");
  flow->add_flag("--verbose", verbose, "report per-component integrals");

  auto* sweep = app.add_subcommand("sweep", "Cartesian parameter sweep of steady currents and criteria");
  add_common(sweep, common);
  sweep->add_option("--grid", common.grid, "number of grid nodes");
  sweep->add_option("--sweep", sweep_spec, "key=v1,v2;key2=w1,w2 (empty: one point)");
  sweep->add_option("--jobs", jobs, "concurrent sweep points")->check(CLI::PositiveNumber);
  sweep->add_flag("--with-evolve", with_evolve, "also run the strip simulation and certify decay per point");

  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*steady) return cmd_steady(common, refine);
    if (*criteria) return cmd_criteria(common);
    if (*evolve) return cmd_evolve(common, certify, plot);
    if (*flow) return cmd_flowcheck(common, curve, tol, verbose);
    if (*sweep) return cmd_sweep(common, sweep_spec, jobs, with_evolve);
    if (*selftest) return cmd_selftest(argv[0]);
  } catch (const Failure& f) {
    std::cerr << "npslab: error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "npslab: error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}

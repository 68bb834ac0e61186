#include <npslab/config.hpp>
#include <npslab/error.hpp>
#include <npslab/io.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace npslab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const IoError&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

long to_integer(const std::string& key, const std::string& v) {
  const char* b = v.c_str();
  char* e = nullptr;
  errno = 0;
  const long n = std::strtol(b, &e, 10);
  if (e == b || *e != '\0' || errno != 0) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return n;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  const long n = to_integer(key, v);
  if (n < 0) throw ConfigError(key + ": must be nonnegative");
  return static_cast<std::size_t>(n);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

struct Entry {
  std::string key;
  std::function<void(AppConfig&, const std::string&)> set;
  std::function<std::string(const AppConfig&)> get;
};

#define NPS_DOUBLE(name, member)                                                          \
  Entry {                                                                                 \
    name, [](AppConfig& c, const std::string& v) { c.member = to_double(name, v); },     \
        [](const AppConfig& c) { return format_double(c.member); }                        \
  }
#define NPS_INT(name, member)                                                             \
  Entry {                                                                                 \
    name, [](AppConfig& c, const std::string& v) { c.member = static_cast<int>(to_integer(name, v)); }, \
        [](const AppConfig& c) { return std::to_string(c.member); }                       \
  }
#define NPS_SIZE(name, member)                                                            \
  Entry {                                                                                 \
    name, [](AppConfig& c, const std::string& v) { c.member = to_size(name, v); },       \
        [](const AppConfig& c) { return std::to_string(c.member); }                       \
  }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table{
      NPS_DOUBLE("params.d1", params.d1),
      NPS_DOUBLE("params.d2", params.d2),
      NPS_DOUBLE("params.eps", params.eps),
      NPS_DOUBLE("params.nu", params.nu),
      NPS_DOUBLE("params.coupling", params.coupling),
      NPS_DOUBLE("bc.alpha1", bc.alpha1),
      NPS_DOUBLE("bc.alpha2", bc.alpha2),
      NPS_DOUBLE("bc.beta1", bc.beta1),
      NPS_DOUBLE("bc.beta2", bc.beta2),
      NPS_DOUBLE("bc.voltage", bc.voltage),
      NPS_DOUBLE("bc.length", bc.length),
      NPS_SIZE("grid.n", grid_n),
      NPS_DOUBLE("grid.grading", grading),
      NPS_INT("solver.max_outer", solver.max_outer),
      NPS_DOUBLE("solver.outer_tol", solver.outer_tol),
      NPS_DOUBLE("solver.newton_tol", solver.newton_tol),
      NPS_INT("solver.newton_max", solver.newton_max),
      NPS_DOUBLE("solver.damping", solver.damping),
      NPS_INT("solver.max_continuation", solver.max_continuation),
      NPS_SIZE("evolve.nx", evolve.nx),
      NPS_SIZE("evolve.ny", evolve.ny),
      NPS_DOUBLE("evolve.dt", evolve.dt),
      NPS_DOUBLE("evolve.t_end", evolve.t_end),
      NPS_INT("evolve.output_every", evolve.output_every),
      Entry{"evolve.initial",
            [](AppConfig& c, const std::string& v) { c.evolve.initial.kind = parse_initial_kind(v); },
            [](const AppConfig& c) { return std::string(initial_kind_name(c.evolve.initial.kind)); }},
      NPS_DOUBLE("evolve.value", evolve.initial.value),
      NPS_DOUBLE("evolve.lo", evolve.initial.lo),
      NPS_DOUBLE("evolve.hi", evolve.initial.hi),
      NPS_DOUBLE("evolve.peak", evolve.initial.peak),
      Entry{"evolve.seed",
            [](AppConfig& c, const std::string& v) {
              const char* b = v.c_str();
              char* e = nullptr;
              errno = 0;
              const unsigned long long n = std::strtoull(b, &e, 10);
              if (e == b || *e != '\0' || errno != 0 || v.front() == '-') {
                throw ConfigError("evolve.seed: expected an unsigned integer, got '" + v + "'");
              }
              c.evolve.initial.seed = n;
            },
            [](const AppConfig& c) { return std::to_string(c.evolve.initial.seed); }},
      Entry{"evolve.file", [](AppConfig& c, const std::string& v) { c.evolve.initial.path = v; },
            [](const AppConfig& c) { return c.evolve.initial.path; }},
      NPS_INT("evolve.snapshot_every", evolve.snapshot_every),
      Entry{"evolve.navier_stokes",
            [](AppConfig& c, const std::string& v) { c.evolve.navier_stokes = to_bool("evolve.navier_stokes", v); },
            [](const AppConfig& c) { return std::string(c.evolve.navier_stokes ? "true" : "false"); }},
      NPS_DOUBLE("evolve.band_delta", evolve.band_delta),
  };
  return table;
}

#undef NPS_DOUBLE
#undef NPS_INT
#undef NPS_SIZE

const Entry& find_entry(const std::string& key) {
  for (const auto& e : entries()) {
    if (e.key == key) return e;
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

}  // namespace

Grid1D AppConfig::make_grid() const {
  if (grid_n < 3) throw ConfigError("grid.n must be >= 3");
  if (!(grading >= 0.0)) throw ConfigError("grid.grading must be >= 0");
  return grading > 0.0 ? Grid1D::graded(grid_n, bc.length, grading) : Grid1D::uniform(grid_n, bc.length);
}

EvolveConfig AppConfig::evolve_config() const {
  EvolveConfig e = evolve;
  e.params = params;
  e.bc = bc;
  return e;
}

void AppConfig::validate() const {
  try {
    params.validate();
    bc.validate();
    solver.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  make_grid();
  evolve_config().validate();
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& e : entries()) k.push_back(e.key);
    return k;
  }();
  return keys;
}

void set_config_value(AppConfig& cfg, const std::string& dotted_key, const std::string& value) {
  find_entry(dotted_key).set(cfg, value);
}

std::string get_config_value(const AppConfig& cfg, const std::string& dotted_key) {
  return find_entry(dotted_key).get(cfg);
}

AppConfig parse_config(std::istream& in, const std::string& source) {
  AppConfig cfg;
  std::string section;
  std::string line;
  std::size_t lineno = 0;
  auto where = [&] { return source + ":" + std::to_string(lineno) + ": "; };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where() + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"params", "bc", "grid", "solver", "evolve"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known)) {
        throw ConfigError(where() + "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where() + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(where() + "key '" + key + "' outside of a section");
    if (value.empty()) throw ConfigError(where() + "empty value for '" + key + "'");
    try {
      set_config_value(cfg, section + "." + key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where() + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in, path);
}

std::string format_config(const AppConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const auto& e : entries()) {
    const auto dot = e.key.find('.');
    const std::string sec = e.key.substr(0, dot);
    const std::string value = e.get(cfg);
    if (value.empty()) continue;
    if (sec != section) {
      out << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
      section = sec;
    }
    out << e.key.substr(dot + 1) << " = " << value << '\n';
  }
  return out.str();
}

}  // namespace npslab

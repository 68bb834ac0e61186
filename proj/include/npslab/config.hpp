#pragma once

// Flat "key = value" configuration with [params], [bc], [grid], [solver] and [evolve]
// sections. Unknown sections and keys are errors. '#' starts a comment.
//
//   [params]  d1 d2 eps nu coupling
//   [bc]      alpha1 alpha2 beta1 beta2 voltage length
//   [grid]    n grading
//   [solver]  max_outer outer_tol newton_tol newton_max damping max_continuation
//   [evolve]  nx ny dt t_end output_every initial value lo hi peak seed file
//             snapshot_every navier_stokes band_delta

#include <npslab/core.hpp>
#include <npslab/evolve.hpp>
#include <npslab/steady1d.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace npslab {

struct AppConfig {
  PhysParams params;
  StripBC bc;
  std::size_t grid_n = 129;
  double grading = 0.0;  ///< 0 gives a uniform grid
  GummelOptions solver;
  EvolveConfig evolve;   ///< params and bc are filled from the sections above

  Grid1D make_grid() const;
  /// evolve with params and bc synchronized.
  EvolveConfig evolve_config() const;
  void validate() const;
};

AppConfig parse_config(std::istream& in, const std::string& source = "<config>");
AppConfig load_config(const std::string& path);

/// Set one value by dotted name, e.g. "bc.voltage". Throws ConfigError.
void set_config_value(AppConfig& cfg, const std::string& dotted_key, const std::string& value);
std::string get_config_value(const AppConfig& cfg, const std::string& dotted_key);

/// All dotted keys in canonical order.
const std::vector<std::string>& config_keys();

/// Canonical text form; parse_config(format_config(c)) reproduces c.
std::string format_config(const AppConfig& cfg);

}  // namespace npslab

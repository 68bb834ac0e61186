/* npslab C interface.
 *
 * All functions return an nps_status. On failure a human-readable message is available
 * from nps_last_error() on the calling thread until the next failing call on that thread.
 * Handles are opaque, owned by the caller and released with the matching *_free
 * function (NULL is accepted). A handle may be read from several threads at once but
 * must not be modified concurrently.
 */
#ifndef NPSLAB_NPSLAB_H
#define NPSLAB_NPSLAB_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(NPSLAB_BUILDING)
#    define NPS_API __declspec(dllexport)
#  else
#    define NPS_API __declspec(dllimport)
#  endif
#else
#  define NPS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nps_status {
  NPS_OK = 0,
  NPS_ERR_INVALID_ARGUMENT = 1,
  NPS_ERR_CONFIG = 2,
  NPS_ERR_IO = 3,
  NPS_ERR_NO_CONVERGENCE = 4,
  NPS_ERR_NEWTON_DIVERGENCE = 5,
  NPS_ERR_POSITIVITY = 6,
  NPS_ERR_CFL = 7,
  NPS_ERR_INTERNAL = 99
} nps_status;

typedef struct nps_config nps_config;
typedef struct nps_steady nps_steady;
typedef struct nps_evolution nps_evolution;

NPS_API const char* nps_version(void);
NPS_API const char* nps_last_error(void);
NPS_API const char* nps_status_name(nps_status status);

/* ---- configuration ------------------------------------------------------------ */

NPS_API nps_status nps_config_new(nps_config** out);
NPS_API nps_status nps_config_load(const char* path, nps_config** out);
NPS_API nps_status nps_config_parse(const char* text, nps_config** out);
NPS_API nps_status nps_config_clone(const nps_config* cfg, nps_config** out);
/* Dotted keys such as "bc.voltage" or "evolve.seed". */
NPS_API nps_status nps_config_set(nps_config* cfg, const char* key, const char* value);
/* Copies the value (NUL-terminated) into buf when it fits; *needed receives the
 * required size including the terminator. buf may be NULL when cap is 0. */
NPS_API nps_status nps_config_get(const nps_config* cfg, const char* key, char* buf, size_t cap, size_t* needed);
NPS_API nps_status nps_config_validate(const nps_config* cfg);
/* Canonical text form, same buffer protocol as nps_config_get. */
NPS_API nps_status nps_config_format(const nps_config* cfg, char* buf, size_t cap, size_t* needed);
NPS_API void nps_config_free(nps_config* cfg);

/* ---- steady one-dimensional currents ------------------------------------------ */

typedef struct nps_currents {
  double j1, j2;
  double flux_deviation1, flux_deviation2;
} nps_currents;

typedef struct nps_bounds {
  double lambda1, lambda2, Lambda1, Lambda2;
  double v_lo, v_hi;
  double gamma_lo, gamma_hi;
  double slack_eta, slack_phi, slack_c;
  double worst_violation;
  double slack_eta_left, slack_eta_right;
} nps_bounds;

typedef struct nps_steady_info {
  int outer_iterations;
  int newton_iterations;
  int continuation_levels;
  double last_update;
  double residual1, residual2, residual_phi;
} nps_steady_info;

NPS_API nps_status nps_steady_solve(const nps_config* cfg, nps_steady** out);
NPS_API size_t nps_steady_size(const nps_steady* st);
/* Each output array must hold nps_steady_size() values; any pointer may be NULL. */
NPS_API nps_status nps_steady_profiles(const nps_steady* st, double* x, double* c1, double* c2, double* phi);
NPS_API nps_status nps_steady_currents(const nps_steady* st, nps_currents* out);
NPS_API nps_status nps_steady_bounds(const nps_steady* st, nps_bounds* out);
NPS_API nps_status nps_steady_info_get(const nps_steady* st, nps_steady_info* out);
/* CSV with columns x,c1,c2,phi,eta1,eta2,mu1,mu2. */
NPS_API nps_status nps_steady_write_table(const nps_steady* st, const char* path);
NPS_API void nps_steady_free(nps_steady* st);

/* ---- stability criteria ------------------------------------------------------- */

typedef struct nps_stability_report {
  double g1, g2;
  double j1, j2;
  double lhs1, lhs2;
  double margin;
  int weak_current_ok;
  double m1_delta, m2_delta;
  double kappa1_delta, kappa2_delta, kappa_delta;
  double kappa_fluid;
  double delta_used;
  double suff_log_lhs1, suff_log_lhs2;
  double suff_exp_lhs1, suff_exp_lhs2;
  int suff_log_ok, suff_exp_ok;
} nps_stability_report;

NPS_API nps_status nps_criteria_evaluate(const nps_config* cfg, double j1, double j2, nps_stability_report* out);
NPS_API nps_status nps_decay_rate(const nps_config* cfg, double j1, double j2, double delta, double* kappa1,
                                  double* kappa2, double* kappa);

/* ---- boundary flow indicator ------------------------------------------------- */

typedef struct nps_flow_result {
  double i1, i2;
  double tolerance;
  int predicts_flow;
  size_t components;
} nps_flow_result;

/* tol < 0 selects the default scale-relative tolerance. Per-component integrals are
 * written to comp_i1/comp_i2 (capacity entries; either may be NULL). */
NPS_API nps_status nps_flowcheck_file(const char* path, double tol, nps_flow_result* out, double* comp_i1,
                                      double* comp_i2, size_t capacity);
/* One closed component given as parallel arrays of length n. */
NPS_API nps_status nps_flowcheck_samples(const double* s, const double* x, const double* y, const double* gamma1,
                                         const double* gamma2, const double* w, size_t n, double tol,
                                         nps_flow_result* out);

/* ---- time-dependent strip simulation ----------------------------------------- */

typedef struct nps_evolution_info {
  long steps;
  double entry_time; /* NaN when the band was never entered */
  double band_delta;
  double j1, j2;     /* currents of the reference steady state */
  size_t snapshots;
} nps_evolution_info;

typedef struct nps_decay_certificate {
  int applicable;
  int certified;
  int monotone;
  int vacuous;
  double delta, kappa, t_start;
  double fitted_rate;
  double worst_ratio;
  size_t samples;
} nps_decay_certificate;

/* snapshot_dir may be NULL; otherwise snapshots (every evolve.snapshot_every steps)
 * are written there as snapshot_<step>.txt. */
NPS_API nps_status nps_evolution_run(const nps_config* cfg, const char* snapshot_dir, nps_evolution** out);
NPS_API size_t nps_evolution_rows(const nps_evolution* ev);
NPS_API size_t nps_evolution_columns(void);
NPS_API const char* nps_evolution_column_name(size_t k);
/* values must hold nps_evolution_columns() entries. */
NPS_API nps_status nps_evolution_row(const nps_evolution* ev, size_t k, double* values);
NPS_API nps_status nps_evolution_info_get(const nps_evolution* ev, nps_evolution_info* out);
NPS_API nps_status nps_evolution_write_csv(const nps_evolution* ev, const char* path);
NPS_API nps_status nps_evolution_write_final(const nps_evolution* ev, const char* path);
NPS_API nps_status nps_evolution_snapshot_path(const nps_evolution* ev, size_t k, char* buf, size_t cap,
                                               size_t* needed);
NPS_API nps_status nps_evolution_certify(const nps_evolution* ev, nps_decay_certificate* out);
NPS_API void nps_evolution_free(nps_evolution* ev);

#ifdef __cplusplus
}
#endif

#endif /* NPSLAB_NPSLAB_H */

#ifndef COBOSON_COBOSON_H
#define COBOSON_COBOSON_H

/*
 * C interface to the coboson library.
 *
 * Every fallible call returns a cb_status; on failure cb_last_error() holds a
 * message for the calling thread until its next failing call. Objects are
 * opaque handles released with their matching *_free function (NULL is
 * accepted). Strings returned through char** are released with cb_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define COBOSON_API __declspec(dllexport)
#else
#define COBOSON_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cb_status {
  CB_OK = 0,
  CB_PARSE_ERROR = 1,
  CB_VALIDATION_ERROR = 2,
  CB_DOMAIN_ERROR = 3,
  CB_ACCURACY_ERROR = 4,
  CB_IO_ERROR = 5,
  CB_INVALID_ARGUMENT = 6, /* NULL handle or output pointer */
  CB_INTERNAL_ERROR = 7
} cb_status;

typedef enum cb_regime { CB_COHERENT = 0, CB_INCOHERENT = 1, CB_EXCEPTIONAL = 2 } cb_regime;

COBOSON_API const char* cb_version(void);
COBOSON_API const char* cb_last_error(void);
/* "parse_error", "validation_error", "domain_error", ... */
COBOSON_API const char* cb_status_name(cb_status status);
COBOSON_API void cb_string_free(char* text);

/* Thread count: requested > 0 wins, else COBOSON_THREADS, else 1. */
COBOSON_API cb_status cb_resolve_threads(int requested, unsigned* out);

/* ---- Schmidt spectra and coboson statistics ---------------------------- */

typedef struct cb_spectrum cb_spectrum;

COBOSON_API cb_status cb_spectrum_create(const double* weights, size_t count, cb_spectrum** out);
COBOSON_API cb_status cb_spectrum_uniform(size_t modes, cb_spectrum** out);
COBOSON_API cb_status cb_spectrum_load(const char* path, cb_spectrum** out);
COBOSON_API void cb_spectrum_free(cb_spectrum* spectrum);

COBOSON_API cb_status cb_spectrum_mode_count(const cb_spectrum* s, size_t* out);
COBOSON_API cb_status cb_spectrum_coefficients(const cb_spectrum* s, double* out, size_t capacity);
COBOSON_API cb_status cb_purity(const cb_spectrum* s, double* out);
COBOSON_API cb_status cb_schmidt_number(const cb_spectrum* s, double* out);
COBOSON_API cb_status cb_chi(const cb_spectrum* s, int n, double* out);
/* chi_{n+1} / chi_n */
COBOSON_API cb_status cb_chi_ratio(const cb_spectrum* s, int n, double* out);
COBOSON_API cb_status cb_purity_bounds(const cb_spectrum* s, int n, double* lower, double* upper);
COBOSON_API cb_status cb_fragment_norm(const cb_spectrum* s, int n, double* out);
COBOSON_API cb_status cb_ideality_alpha(const cb_spectrum* s, int n, double* out);

/* Quantum dot with r = a_B / L. */
COBOSON_API cb_status cb_qdot_g2_zero(int n, double r, double* out);
COBOSON_API cb_status cb_bosonic_deviation(int n, double r, double* out);

/* ---- Two-site dynamics ------------------------------------------------- */

typedef struct cb_two_site {
  double omega1;
  double omega2;
  double coupling;
  double gamma1;
  double gamma2;
} cb_two_site;

COBOSON_API cb_status cb_p12_closed(const cb_two_site* sys, double t, double* out);
COBOSON_API cb_status cb_ep_limit(const cb_two_site* sys, double t, double* out);
COBOSON_API cb_status cb_classify_regime(const cb_two_site* sys, cb_regime* regime, int* extension);
/* *found = 0 when no exceptional point exists; *coupling is then untouched. */
COBOSON_API cb_status cb_find_exceptional_point(double gamma1, double gamma2, double omega0,
                                                int* found, double* coupling);
COBOSON_API cb_status cb_eigenvector_coalescence(double coupling, double gamma_diff, double omega0,
                                                 double* out);

typedef struct cb_trajectory cb_trajectory;

/* Exact propagation from the state localized on site 1. */
COBOSON_API cb_status cb_two_site_propagate(const cb_two_site* sys, double t_max, double dt,
                                            cb_trajectory** out);
COBOSON_API void cb_trajectory_free(cb_trajectory* traj);
COBOSON_API cb_status cb_trajectory_shape(const cb_trajectory* traj, size_t* steps, size_t* sites);
COBOSON_API cb_status cb_trajectory_time(const cb_trajectory* traj, size_t step, double* out);
COBOSON_API cb_status cb_trajectory_population(const cb_trajectory* traj, size_t step, size_t site,
                                               double* out);
COBOSON_API cb_status cb_trajectory_norm(const cb_trajectory* traj, size_t step, double* out);
COBOSON_API cb_status cb_trajectory_error_estimate(const cb_trajectory* traj, double* out);

/* ---- Branching fractions ----------------------------------------------- */

COBOSON_API cb_status cb_f2_closed(const cb_two_site* sys, double* out);
/* horizon = 0 chooses one from tol. */
COBOSON_API cb_status cb_f2_time_domain(const cb_two_site* sys, double horizon, double tol,
                                        double* value, double* error_estimate);
COBOSON_API cb_status cb_f2_spectral(const cb_two_site* sys, double e_span, long n_points,
                                     double* value, double* truncation);
COBOSON_API cb_status cb_recommended_spectral_grid(const cb_two_site* sys, double target,
                                                   double* e_span, long* n_points);

/* ---- Site networks ------------------------------------------------------ */

typedef struct cb_network cb_network;

/* couplings: row-major sites x sites, symmetric with zero diagonal. */
COBOSON_API cb_status cb_network_create(size_t sites, const double* energies, const double* decays,
                                        const double* couplings, cb_network** out);
COBOSON_API void cb_network_free(cb_network* net);
/* initial_site is zero-based. */
COBOSON_API cb_status cb_network_propagate(const cb_network* net, size_t initial_site, double t_max,
                                           double dt, cb_trajectory** out);
/* fractions has room for one entry per site. */
COBOSON_API cb_status cb_network_branching(const cb_network* net, size_t initial_site,
                                           double horizon, double tol, double* fractions,
                                           double* survival);

/* ---- Scenarios and results --------------------------------------------- */

typedef struct cb_scenario cb_scenario;
typedef struct cb_result cb_result;

COBOSON_API cb_status cb_scenario_parse(const char* document, cb_scenario** out);
COBOSON_API cb_status cb_scenario_load(const char* path, cb_scenario** out);
COBOSON_API cb_status cb_scenario_preset(const char* name, cb_scenario** out);
COBOSON_API void cb_scenario_free(cb_scenario* scenario);
COBOSON_API cb_status cb_scenario_serialize(const cb_scenario* scenario, char** out);
/* Borrowed strings valid for the scenario's lifetime. */
COBOSON_API cb_status cb_scenario_kind(const cb_scenario* scenario, const char** out);
COBOSON_API cb_status cb_scenario_output_path(const cb_scenario* scenario, const char** out);
COBOSON_API cb_status cb_scenario_output_format(const cb_scenario* scenario, const char** out);

/* threads = 0 resolves through cb_resolve_threads. */
COBOSON_API cb_status cb_scenario_run(const cb_scenario* scenario, unsigned threads, cb_result** out);
COBOSON_API void cb_result_free(cb_result* result);
/* Main table, followed by the branching table after a blank line if present. */
COBOSON_API cb_status cb_result_csv(const cb_result* result, char** out);
COBOSON_API cb_status cb_result_table_csv(const cb_result* result, char** out);
/* *out = NULL when the result has no branching table. */
COBOSON_API cb_status cb_result_branching_csv(const cb_result* result, char** out);
COBOSON_API cb_status cb_result_json(const cb_result* result, char** out);
COBOSON_API cb_status cb_result_row_count(const cb_result* result, size_t* out);

/* Preset names, index 0..count-1; NULL past the end. */
COBOSON_API const char* cb_preset_name(size_t index);

/* Oracle-agreement checks; *report is one "PASS|FAIL name: detail" line each. */
COBOSON_API cb_status cb_selftest(uint64_t seed, int* all_passed, char** report);

#ifdef __cplusplus
}
#endif

#endif /* COBOSON_COBOSON_H */

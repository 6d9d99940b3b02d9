/* C interface to the varq library. All strings are UTF-8. Strings returned
 * through `char**` out-parameters are owned by the caller and released with
 * varq_string_free. Functions never throw; on failure they return a non-zero
 * status and store a message retrievable with varq_last_error on the same
 * thread. */
#ifndef VARQ_VARQ_H
#define VARQ_VARQ_H

#include <stddef.h>
#include <stdint.h>

#if defined(VARQ_BUILDING_LIBRARY)
#define VARQ_API __attribute__((visibility("default")))
#else
#define VARQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum varq_status {
  VARQ_OK = 0,
  VARQ_ERR_INVALID_ARGUMENT = 1,
  VARQ_ERR_GRID_MISMATCH = 2,
  VARQ_ERR_INVALID_CONFIG = 3,
  VARQ_ERR_NUMERICAL = 4,
  VARQ_ERR_DENSITY_FLOOR = 5,
  VARQ_ERR_PHASE_UNWRAP = 6,
  VARQ_ERR_VERIFICATION = 7,
  VARQ_ERR_IO = 8,
  VARQ_ERR_INTERNAL = 99
} varq_status;

typedef enum varq_boundary { VARQ_DIRICHLET = 0, VARQ_PERIODIC = 1 } varq_boundary;

/* Result of one scenario run. */
typedef struct varq_report varq_report;

VARQ_API const char* varq_version(void);

/* Message of the most recent failure on this thread, or "" if none. */
VARQ_API const char* varq_last_error(void);

VARQ_API void varq_string_free(char* s);

/* Writes a JSON array of {"severity","path","message"} objects to
 * `diagnostics_json`. Returns VARQ_OK when there are no errors (warnings
 * allowed) and VARQ_ERR_INVALID_CONFIG otherwise; the array is written in
 * both cases. */
VARQ_API varq_status varq_validate_config(const char* config_json, char** diagnostics_json);

/* Parses and runs a configuration. When `scenario` is non-NULL it must
 * match the configuration's scenario, or fills it in when absent. A
 * non-zero `has_seed` overrides the configured seed. */
VARQ_API varq_status varq_run(const char* scenario, const char* config_json, int has_seed, uint64_t seed,
                              varq_report** out);

/* 1 if every tolerance check passed, 0 otherwise (also for NULL). */
VARQ_API int varq_report_passed(const varq_report* report);

/* 0 when all checks pass, 2 otherwise. */
VARQ_API int varq_report_exit_code(const varq_report* report);

VARQ_API size_t varq_report_check_count(const varq_report* report);

/* Name, value, tolerance and outcome of check `index`. Any out-pointer may
 * be NULL. The name pointer stays valid until the report is freed. */
VARQ_API varq_status varq_report_check(const varq_report* report, size_t index, const char** name, double* value,
                                       double* tolerance, int* passed);

VARQ_API varq_status varq_report_json(const varq_report* report, char** json);

/* Writes plot files into `directory`. `series` is a comma-separated list of
 * series names, or NULL/"" for all. The written paths are returned as a
 * JSON array in `written_json` (may be NULL). */
VARQ_API varq_status varq_report_emit_plots(const varq_report* report, const char* directory, const char* series,
                                            char** written_json);

VARQ_API void varq_report_free(varq_report* report);

/* Kernels on a single axis. `rho` and `q_out` hold `n_points` values. */
VARQ_API varq_status varq_bohm_potential_1d(size_t n_points, double x_min, double x_max, varq_boundary boundary,
                                            int stencil_order, double hbar, double mass, const double* rho,
                                            double* q_out);

/* Lowest `levels` energies of a particle in V = k/2 (x - center)^2 on a
 * Dirichlet line. */
VARQ_API varq_status varq_harmonic_levels(size_t n_points, double x_min, double x_max, double hbar, double mass,
                                          double k, double center, size_t levels, double* energies_out);

#ifdef __cplusplus
}
#endif

#endif /* VARQ_VARQ_H */

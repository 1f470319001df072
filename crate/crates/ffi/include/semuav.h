#ifndef SEMUAV_H
#define SEMUAV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum {
  SEM_STATUS_OK = 0,
  SEM_STATUS_NULL_POINTER = 1,
  SEM_STATUS_INVALID_ARGUMENT = 2,
  SEM_STATUS_CONFIG = 3,
  SEM_STATUS_IO = 4,
  SEM_STATUS_INFEASIBLE = 5,
  SEM_STATUS_NUMERIC = 6,
  SEM_STATUS_INTERNAL = 7,
  SEM_STATUS_PANIC = 8,
} SemStatus;

/**
 * Scenario: model parameters plus solver settings.
 */
typedef struct SemParams SemParams;

/**
 * Result of one solve.
 */
typedef struct SemSolution SemSolution;

/**
 * Flat copy of the main fields of a solution.
 */
typedef struct {
  double e_total;
  double t_total;
  /**
   * 0 = offload to the server, 1 = generate at the BS.
   */
  uint8_t offload;
  double rho;
  double p_uav;
  double p_bs;
  double x;
  double y;
  double h;
  double qos;
  /**
   * Best energies with a = 0 and a = 1; infinity when infeasible.
   */
  double v0;
  double v1;
  double e_u;
  double e_ub;
  double e_b;
  double e_bi;
  double e_bs;
} SemSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *sem_version(void);

/**
 * Message of the last failed call on this thread, empty after a success.
 * Valid until the next call on the same thread.
 */
const char *sem_last_error(void);

/**
 * Default scenario.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
SemStatus sem_params_default(SemParams **out);

/**
 * Scenario from TOML text.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
SemStatus sem_params_from_toml(const char *toml, SemParams **out);

/**
 * Scenario from a TOML file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
SemStatus sem_params_from_file(const char *path, SemParams **out);

/**
 * # Safety
 * `params` must come from one of the constructors, or be null.
 */
void sem_params_free(SemParams *params);

/**
 * Sets a model parameter by symbolic name (e.g. "B_B", "T_th", "D") in SI
 * units. The scenario is validated on the next solve.
 *
 * # Safety
 * `params` must be a live handle and `name` a NUL-terminated string.
 */
SemStatus sem_params_set(SemParams *params, const char *name, double value);

/**
 * Reads a model parameter by symbolic name, in SI units.
 *
 * # Safety
 * `params` must be a live handle, `name` a NUL-terminated string and
 * `out` a valid pointer.
 */
SemStatus sem_params_get(const SemParams *params, const char *name, double *out);

/**
 * Power grid resolution and number of zoom-in rounds.
 *
 * # Safety
 * `params` must be a live handle.
 */
SemStatus sem_params_set_grid(SemParams *params, size_t n_pu, size_t n_pb, uint32_t refine_rounds);

/**
 * Checks the scenario without solving it.
 *
 * # Safety
 * `params` must be a live handle.
 */
SemStatus sem_params_validate(const SemParams *params);

/**
 * Closed-form UAV location.
 *
 * # Safety
 * `params` must be a live handle and `x`, `y`, `h` valid pointers.
 */
SemStatus sem_uav_location(const SemParams *params, double *x, double *y, double *h);

/**
 * Solves the scenario with the named scheme ("proposed", "bcd",
 * "non_semantic", ...). Null `scheme` means "proposed".
 *
 * # Safety
 * `params` must be a live handle, `scheme` null or a NUL-terminated
 * string, and `out` a valid pointer.
 */
SemStatus sem_solve(const SemParams *params, const char *scheme, SemSolution **out);

/**
 * # Safety
 * `solution` must be a live handle and `out` a valid pointer.
 */
SemStatus sem_solution_summary(const SemSolution *solution, SemSummary *out);

/**
 * Full solution as JSON. Free the string with [`sem_string_free`].
 *
 * # Safety
 * `solution` must be a live handle and `out` a valid pointer.
 */
SemStatus sem_solution_json(const SemSolution *solution, char **out);

/**
 * # Safety
 * `solution` must come from [`sem_solve`], or be null.
 */
void sem_solution_free(SemSolution *solution);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void sem_string_free(char *s);

/**
 * Principal branch of the Lambert W function.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
SemStatus sem_lambert_w0(double x, double *out);

/**
 * Lower branch of the Lambert W function, for -1/e <= x < 0.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
SemStatus sem_lambert_wm1(double x, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEMUAV_H */

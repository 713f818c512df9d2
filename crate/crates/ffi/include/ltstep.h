#ifndef LTSTEP_H
#define LTSTEP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LtsStatus {
  LTS_STATUS_OK = 0,
  LTS_STATUS_NULL_POINTER = 1,
  /**
   * A string argument is not UTF-8, or a name or number is out of range.
   */
  LTS_STATUS_INVALID_ARGUMENT = 2,
  LTS_STATUS_CONFIG = 3,
  LTS_STATUS_DIMENSION = 4,
  LTS_STATUS_SOLVER = 5,
  /**
   * The run finished but some window missed the iteration tolerance. Results are
   * available.
   */
  LTS_STATUS_NOT_CONVERGED = 6,
  /**
   * Results were requested before a successful solve.
   */
  LTS_STATUS_NOT_SOLVED = 7,
  LTS_STATUS_BUFFER_TOO_SMALL = 8,
  LTS_STATUS_INTERNAL = 9,
} LtsStatus;

/**
 * Opaque run handle.
 */
typedef struct LtsRun LtsRun;

/**
 * Scalar results of a solved run.
 */
typedef struct LtsSummary {
  double final_l2_error;
  double final_l2_error_fine;
  double final_l2_error_coarse;
  double space_time_h1_error;
  double mean_iterations;
  double max_conservativity_defect;
  bool converged;
} LtsSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays valid until the
 * next failing call on the same thread.
 */
const char *lts_last_error(void);

/**
 * Create a run from configuration text (`section.key = value` lines).
 *
 * # Safety
 * `config` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LtsStatus lts_run_new(const char *config, struct LtsRun **out);

/**
 * Release a run. Null is ignored.
 *
 * # Safety
 * `run` must come from [`lts_run_new`] and not have been freed.
 */
void lts_run_free(struct LtsRun *run);

/**
 * Select the variant by name: `is1-coarse`, `is1-fine`, `is2-coarse` or `is2-fine`.
 * Discards earlier results.
 *
 * # Safety
 * `run` must be a live handle and `name` a NUL-terminated string.
 */
enum LtsStatus lts_run_set_variant(struct LtsRun *run, const char *name);

/**
 * Select the solve mode by name: `converged`, `single-iteration`, `predictor-only` or
 * `direct`. `eps` and `max_iters` apply to the converged mode; zero picks the defaults.
 * Discards earlier results.
 *
 * # Safety
 * `run` must be a live handle and `name` a NUL-terminated string.
 */
enum LtsStatus lts_run_set_mode(struct LtsRun *run, const char *name, double eps, size_t max_iters);

/**
 * March over all windows. Returns `NotConverged` when some window missed the tolerance;
 * results are kept in that case.
 *
 * # Safety
 * `run` must be a live handle.
 */
enum LtsStatus lts_run_solve(struct LtsRun *run);

/**
 * Number of cells in the fine and coarse subdomains.
 *
 * # Safety
 * `run` must be a live handle; `fine` and `coarse` valid pointers.
 */
enum LtsStatus lts_run_cell_counts(const struct LtsRun *run, size_t *fine, size_t *coarse);

/**
 * Number of coarse windows.
 *
 * # Safety
 * `run` must be a live handle and `out` a valid pointer.
 */
enum LtsStatus lts_run_window_count(const struct LtsRun *run, size_t *out);

/**
 * Cell centers, fine subdomain first. `len` is the capacity of `buf`.
 *
 * # Safety
 * `run` must be a live handle and `buf` valid for `len` writes.
 */
enum LtsStatus lts_run_cell_centers(const struct LtsRun *run, double *buf, size_t len);

/**
 * Cell values at the final time, fine subdomain first.
 *
 * # Safety
 * `run` must be a live handle and `buf` valid for `len` writes.
 */
enum LtsStatus lts_run_final_solution(const struct LtsRun *run, double *buf, size_t len);

/**
 * # Safety
 * `run` must be a live handle and `out` a valid pointer.
 */
enum LtsStatus lts_run_summary(const struct LtsRun *run, struct LtsSummary *out);

/**
 * Average `ratio` fine trace values into one coarse value.
 *
 * # Safety
 * `fine` must be valid for `ratio` reads and `out` a valid pointer.
 */
enum LtsStatus lts_project_fine_to_coarse(const double *fine, size_t ratio, double *out);

/**
 * Copy one coarse value into `ratio` fine slots.
 *
 * # Safety
 * `out` must be valid for `ratio` writes.
 */
enum LtsStatus lts_inject_coarse_to_fine(double value, size_t ratio, double *out);

/**
 * Check configuration text without creating a run.
 *
 * # Safety
 * `config` must be a NUL-terminated string.
 */
enum LtsStatus lts_validate_config(const char *config);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LTSTEP_H */

#ifndef RIGIDITY_LAB_H
#define RIGIDITY_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RlStatus {
  RL_STATUS_OK = 0,
  /**
   * Malformed input: bad JSON, wrong shapes, invalid parameters.
   */
  RL_STATUS_MALFORMED = 1,
  /**
   * Well-formed input for which the computation is undefined or fails
   * (not hyperbolic, unsolvable lifting, ...). A report is still produced.
   */
  RL_STATUS_DOMAIN = 2,
  RL_STATUS_NULL_POINTER = 3,
  RL_STATUS_INVALID_UTF8 = 4,
  RL_STATUS_PANIC = 5,
} RlStatus;

/**
 * Opaque report handle.
 */
typedef struct RlReport RlReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Runs a JSON request such as `{"command": "hyperbolic", "matrix": [[2,1],[1,1]]}`.
 *
 * On `RL_STATUS_OK`, `RL_STATUS_MALFORMED` and `RL_STATUS_DOMAIN` a report
 * is stored in `*out` (the error JSON for the latter two).
 *
 * # Safety
 * `request` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RlStatus rl_run_json(const char *request, struct RlReport **out);

/**
 * Borrowed JSON text of a report; valid until the report is freed.
 *
 * # Safety
 * `report` must come from [`rl_run_json`] and not have been freed.
 */
const char *rl_report_json(const struct RlReport *report);

/**
 * # Safety
 * `report` must come from [`rl_run_json`] and not have been freed.
 */
enum RlStatus rl_report_status(const struct RlReport *report);

/**
 * # Safety
 * `report` must come from [`rl_run_json`]; null is ignored.
 */
void rl_report_free(struct RlReport *report);

/**
 * Hyperbolicity of a `d × d` integer matrix given row-major.
 *
 * # Safety
 * `entries` must point to `d * d` values and `out` must be valid.
 */
enum RlStatus rl_is_hyperbolic(const int64_t *entries, uintptr_t d, double tol, bool *out);

/**
 * Message for the last failure on this thread, or null. Borrowed until the
 * next call on the same thread.
 */
const char *rl_last_error(void);

/**
 * Report schema version, a static string.
 */
const char *rl_schema_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RIGIDITY_LAB_H */

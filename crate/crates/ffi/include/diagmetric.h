#ifndef DIAGMETRIC_H
#define DIAGMETRIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DmStatus {
  DM_STATUS_OK = 0,
  DM_STATUS_NULL_POINTER = 1,
  DM_STATUS_INVALID_INPUT = 2,
  DM_STATUS_PARSE = 3,
  DM_STATUS_SOLVER = 4,
  DM_STATUS_PANIC = 5,
} DmStatus;

typedef enum DmVerdict {
  DM_VERDICT_CONVERGED = 0,
  DM_VERDICT_INFEASIBLE = 1,
  DM_VERDICT_ITERATION_LIMIT = 2,
} DmVerdict;

typedef struct DmHiggsDatum DmHiggsDatum;

typedef struct DmRootSystem DmRootSystem;

typedef struct DmTodaProblem DmTodaProblem;

typedef struct DmTodaSolution DmTodaSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library from the same thread.
 */
const char *dm_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void dm_string_free(char *s);

/**
 * Builds a named root system such as `("G", 2)`.
 *
 * # Safety
 * `letter` must be a NUL-terminated string and `out` writable.
 */
enum DmStatus dm_root_system_new(const char *letter, uintptr_t rank, struct DmRootSystem **out);

/**
 * # Safety
 * `rs` must be null or a handle from [`dm_root_system_new`] not yet freed.
 */
void dm_root_system_free(struct DmRootSystem *rs);

/**
 * # Safety
 * `rs` must be a live handle and `out` writable.
 */
enum DmStatus dm_root_system_root_count(const struct DmRootSystem *rs, uintptr_t *out);

/**
 * Roots and their coroots as CSV; free the result with [`dm_string_free`].
 *
 * # Safety
 * `rs` must be a live handle and `out` writable.
 */
enum DmStatus dm_root_system_roots_csv(const struct DmRootSystem *rs, char **out);

/**
 * Decides closed (`strict = false`) or open (`strict = true`) cone
 * membership for a JSON cone problem. The verdict with its certificate is
 * returned as JSON when `verdict_json` is not null.
 *
 * # Safety
 * `problem_json` must be a NUL-terminated string; `answer` must be
 * writable; `verdict_json` may be null.
 */
enum DmStatus dm_cone_decide(const char *problem_json,
                             bool strict,
                             bool *answer,
                             char **verdict_json);

/**
 * Checks a verdict's certificate against its problem, both as JSON.
 *
 * # Safety
 * Both strings must be NUL-terminated and `valid` writable.
 */
enum DmStatus dm_cone_verify(const char *problem_json, const char *verdict_json, bool *valid);

/**
 * Parses a datum such as `{"r":2,"degrees":["1","-1"],"arrows":[[2,1]]}`.
 *
 * # Safety
 * `json` must be NUL-terminated and `out` writable.
 */
enum DmStatus dm_higgs_datum_from_json(const char *json, struct DmHiggsDatum **out);

/**
 * # Safety
 * `d` must be null or a live datum handle.
 */
void dm_higgs_datum_free(struct DmHiggsDatum *d);

/**
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum DmStatus dm_higgs_is_semistable(const struct DmHiggsDatum *d, bool *out);

/**
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum DmStatus dm_higgs_is_stable(const struct DmHiggsDatum *d, bool *out);

/**
 * Smallest `n ≥ 1` making the dual character integral.
 *
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum DmStatus dm_higgs_minimal_n(const struct DmHiggsDatum *d, uint64_t *out);

/**
 * Loads a problem file; relative CSV paths resolve against its directory.
 *
 * # Safety
 * `path` must be NUL-terminated and `out` writable.
 */
enum DmStatus dm_toda_problem_load(const char *path, struct DmTodaProblem **out);

/**
 * Builds a problem from JSON text. `base_dir` may be null, in which case
 * CSV paths resolve against the working directory.
 *
 * # Safety
 * `json` must be NUL-terminated, `base_dir` null or NUL-terminated, and
 * `out` writable.
 */
enum DmStatus dm_toda_problem_from_json(const char *json,
                                        const char *base_dir,
                                        struct DmTodaProblem **out);

/**
 * # Safety
 * `p` must be null or a live problem handle.
 */
void dm_toda_problem_free(struct DmTodaProblem *p);

/**
 * Number of doubles in a state: cells times rank.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum DmStatus dm_toda_problem_len(const struct DmTodaProblem *p, uintptr_t *out);

/**
 * Runs the solver from `Ω = 0`. Pass `tol <= 0` or `max_iter = 0` for the
 * defaults. A returned solution may carry any verdict; only hard errors
 * give a non-`Ok` status.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum DmStatus dm_toda_solve(const struct DmTodaProblem *p,
                            double tol,
                            uintptr_t max_iter,
                            bool force_iterate,
                            struct DmTodaSolution **out);

/**
 * # Safety
 * `s` must be null or a live solution handle.
 */
void dm_toda_solution_free(struct DmTodaSolution *s);

/**
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
enum DmStatus dm_toda_solution_verdict(const struct DmTodaSolution *s, enum DmVerdict *out);

/**
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
enum DmStatus dm_toda_solution_residual(const struct DmTodaSolution *s, double *out);

/**
 * Copies the state into `buf`, which must hold at least
 * [`dm_toda_problem_len`] doubles; `written` receives the count.
 *
 * # Safety
 * `buf` must be valid for `len` writes and `written` writable.
 */
enum DmStatus dm_toda_solution_omega(const struct DmTodaSolution *s,
                                     double *buf,
                                     uintptr_t len,
                                     uintptr_t *written);

/**
 * The full solve report as JSON; free with [`dm_string_free`].
 *
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
enum DmStatus dm_toda_solution_report_json(const struct DmTodaSolution *s, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIAGMETRIC_H */

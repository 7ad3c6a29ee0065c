#ifndef ROBUST_APPT_H
#define ROBUST_APPT_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RaptMethod {
  RAPT_METHOD_PTA = 0,
  RAPT_METHOD_ASAP = 1,
  RAPT_METHOD_MILP0 = 2,
  RAPT_METHOD_MILP = 3,
  RAPT_METHOD_WSRAS = 4,
  RAPT_METHOD_SAA = 5,
  RAPT_METHOD_EXACT = 6,
} RaptMethod;

/**
 * Status codes shared by every function.
 */
typedef enum RaptStatus {
  RAPT_STATUS_OK = 0,
  /**
   * Unexpected internal failure.
   */
  RAPT_STATUS_FAILURE = 1,
  RAPT_STATUS_INVALID_INPUT = 2,
  /**
   * The method does not apply to this instance.
   */
  RAPT_STATUS_NOT_APPLICABLE = 3,
  /**
   * A time limit stopped the solver; the returned schedule is the best found.
   */
  RAPT_STATUS_TIME_LIMIT = 4,
  RAPT_STATUS_NULL_POINTER = 6,
  RAPT_STATUS_PANIC = 7,
} RaptStatus;

/**
 * Opaque instance handle.
 */
typedef struct RaptInstance RaptInstance;

/**
 * Opaque schedule handle.
 */
typedef struct RaptSchedule RaptSchedule;

/**
 * Solver settings. Zero-initialize for defaults.
 */
typedef struct RaptSolveOptions {
  /**
   * Seconds; zero or negative means no limit.
   */
  double time_limit;
  /**
   * Waiting cost for the weighted-sum method.
   */
  double wait_cost;
  /**
   * Worker threads for the exact method; zero means one.
   */
  uint32_t threads;
  /**
   * Row-major `sample_count x n` service times for the sample-average method.
   */
  const double *samples;
  size_t sample_count;
} RaptSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next library call on the same thread.
 */
const char *rapt_last_error_message(void);

/**
 * Parses and validates an instance from JSON.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum RaptStatus rapt_instance_from_json(const char *json, struct RaptInstance **out);

/**
 * # Safety
 * `inst` must come from [`rapt_instance_from_json`] and not be freed twice.
 */
void rapt_instance_free(struct RaptInstance *inst);

/**
 * Parses a schedule `{"perm": [...], "start": [...]}` with one-based `perm`.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum RaptStatus rapt_schedule_from_json(const char *json, struct RaptSchedule **out);

/**
 * # Safety
 * `sched` must come from this library and not be freed twice.
 */
void rapt_schedule_free(struct RaptSchedule *sched);

/**
 * Number of appointments in the schedule, or zero for a null handle.
 *
 * # Safety
 * `sched` must be null or a live handle.
 */
size_t rapt_schedule_len(const struct RaptSchedule *sched);

/**
 * Copies start times (by appointment) and one-based customer numbers into
 * caller buffers of length `len`; either buffer may be null.
 *
 * # Safety
 * Non-null buffers must hold `len` elements.
 */
enum RaptStatus rapt_schedule_get(const struct RaptSchedule *sched,
                                  double *start,
                                  size_t *perm,
                                  size_t len);

/**
 * Serializes the schedule as JSON. Release with [`rapt_string_free`].
 *
 * # Safety
 * `sched` must be a live handle and `out` a valid pointer.
 */
enum RaptStatus rapt_schedule_to_json(const struct RaptSchedule *sched, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void rapt_string_free(char *s);

/**
 * Solves `inst` with a [`RaptMethod`] value. On `RAPT_STATUS_OK` or `RAPT_STATUS_TIME_LIMIT` a schedule
 * is stored in `out` and its objective in `objective` (if non-null).
 *
 * # Safety
 * Pointers must be valid; `opts` may be null for defaults.
 */
enum RaptStatus rapt_solve(const struct RaptInstance *inst,
                           int32_t method,
                           const struct RaptSolveOptions *opts,
                           struct RaptSchedule **out,
                           double *objective);

/**
 * Worst-case total cost of a schedule over the uncertainty set.
 *
 * # Safety
 * Handles must be live and `out` valid.
 */
enum RaptStatus rapt_worst_case_cost(const struct RaptSchedule *sched,
                                     const struct RaptInstance *inst,
                                     double *out);

/**
 * Worst-case waiting time of zero-based appointment `appointment`.
 *
 * # Safety
 * Handles must be live and `out` valid.
 */
enum RaptStatus rapt_worst_case_wait(const struct RaptSchedule *sched,
                                     const struct RaptInstance *inst,
                                     size_t appointment,
                                     double *out);

/**
 * Sets `feasible` to whether every guarantee holds in the worst case.
 *
 * # Safety
 * Handles must be live and `feasible` valid.
 */
enum RaptStatus rapt_check_feasibility(const struct RaptSchedule *sched,
                                       const struct RaptInstance *inst,
                                       bool *feasible);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROBUST_APPT_H */

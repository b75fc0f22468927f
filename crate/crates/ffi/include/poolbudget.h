#ifndef POOLBUDGET_H
#define POOLBUDGET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PbAlgorithm {
  PB_ALGORITHM_ORACLE_UWO = 0,
  PB_ALGORITHM_ORACLE_UWOWP = 1,
  PB_ALGORITHM_UWO_FPTAS = 2,
  PB_ALGORITHM_IDENTICAL_COSTS = 3,
  PB_ALGORITHM_GREEDY = 4,
  PB_ALGORITHM_SYMMETRIC = 5,
  PB_ALGORITHM_LAMINAR_FPTAS = 6,
  PB_ALGORITHM_MAXPE = 7,
} PbAlgorithm;

typedef enum PbFamily {
  PB_FAMILY_UNIFORM = 0,
  PB_FAMILY_NORMAL = 1,
  PB_FAMILY_BERNOULLI = 2,
} PbFamily;

typedef enum PbStatus {
  PB_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  PB_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not UTF-8.
   */
  PB_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed or invalid input data.
   */
  PB_STATUS_INPUT_ERROR = 3,
  /**
   * The instance does not meet the solver's preconditions.
   */
  PB_STATUS_PRECONDITION_FAILED = 4,
  /**
   * An internal panic was caught at the boundary.
   */
  PB_STATUS_PANIC = 5,
} PbStatus;

/**
 * Opaque validated instance.
 */
typedef struct PbInstance PbInstance;

/**
 * Opaque solver report.
 */
typedef struct PbReport PbReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next call into this library on the thread.
 */
const char *pb_last_error(void);

/**
 * Parses and validates a JSON instance.
 *
 * # Safety
 * `json` is a nul-terminated string; `out` is writable.
 */
enum PbStatus pb_instance_from_json(const char *json, struct PbInstance **out);

/**
 * Draws a synthetic additive instance.
 *
 * # Safety
 * `out` is writable.
 */
enum PbStatus pb_generate_synthetic(enum PbFamily family,
                                    size_t agents,
                                    size_t projects,
                                    uint64_t seed,
                                    struct PbInstance **out);

/**
 * Serializes an instance as JSON into a new string.
 *
 * # Safety
 * `instance` is a live handle; `out` is writable.
 */
enum PbStatus pb_instance_to_json(const struct PbInstance *instance, char **out);

/**
 * Project count, or 0 for a null handle.
 *
 * # Safety
 * `instance` is null or a live handle.
 */
size_t pb_instance_num_projects(const struct PbInstance *instance);

/**
 * Agent count, or 0 for a null handle.
 *
 * # Safety
 * `instance` is null or a live handle.
 */
size_t pb_instance_num_agents(const struct PbInstance *instance);

/**
 * # Safety
 * `instance` is null or a handle not yet freed.
 */
void pb_instance_free(struct PbInstance *instance);

/**
 * Runs a solver. `eps_num / eps_den` is the approximation parameter and is
 * ignored by exact algorithms.
 *
 * # Safety
 * `instance` is a live handle; `out` is writable.
 */
enum PbStatus pb_solve(const struct PbInstance *instance,
                       enum PbAlgorithm algorithm,
                       int64_t eps_num,
                       int64_t eps_den,
                       struct PbReport **out);

/**
 * Number of funded projects, or 0 for a null handle.
 *
 * # Safety
 * `report` is null or a live handle.
 */
size_t pb_report_funded_len(const struct PbReport *report);

/**
 * Copies up to `cap` funded project indices, ascending, into `buf` and
 * returns the total count.
 *
 * # Safety
 * `report` is null or a live handle; `buf` holds `cap` writable slots.
 */
size_t pb_report_funded(const struct PbReport *report, size_t *buf, size_t cap);

/**
 * Social welfare of the funded set, rounded to a double; NaN for a null
 * handle. The exact value is in the JSON report.
 *
 * # Safety
 * `report` is null or a live handle.
 */
double pb_report_welfare(const struct PbReport *report);

/**
 * Payment excess of the funded set, rounded to a double; NaN for a null
 * handle.
 *
 * # Safety
 * `report` is null or a live handle.
 */
double pb_report_excess(const struct PbReport *report);

/**
 * Serializes a report, with exact fractions, as JSON into a new string.
 *
 * # Safety
 * `report` is a live handle; `out` is writable.
 */
enum PbStatus pb_report_to_json(const struct PbReport *report, char **out);

/**
 * # Safety
 * `report` is null or a handle not yet freed.
 */
void pb_report_free(struct PbReport *report);

/**
 * # Safety
 * `s` is null or a string returned by this library and not yet freed.
 */
void pb_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POOLBUDGET_H */

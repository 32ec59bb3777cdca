#ifndef ISOWEIGHTS_H
#define ISOWEIGHTS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum IwStatus {
  IwStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  IwStatus_NullPointer = 1,
  /**
   * An input string was not valid UTF-8.
   */
  IwStatus_InvalidUtf8 = 2,
  /**
   * Malformed JSON, or a profile violating balance or range.
   */
  IwStatus_Schema = 3,
  /**
   * The profile admits no multigraph, or the requested mode is refused.
   */
  IwStatus_Infeasible = 4,
  /**
   * Any other library failure; see `iw_last_error`.
   */
  IwStatus_Failed = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  IwStatus_Panic = 6,
} IwStatus;

/**
 * Opaque weight system.
 */
typedef struct IwWeightSystem IwWeightSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; empty after a success.
 * The pointer stays valid until the next library call on the same thread.
 */
const char *iw_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *iw_version(void);

/**
 * Release a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string obtained from this library, not yet freed.
 */
void iw_string_free(char *s);

/**
 * Parse a weight system from `{"n": …, "points": [{"lambda": …, "weights": […]}, …]}`.
 *
 * # Safety
 * `json` must be null or a NUL-terminated string; `out` must be null or writable.
 */
enum IwStatus iw_weight_system_from_json(const char *json, struct IwWeightSystem **out);

/**
 * Build a standard example from a spec such as `{"name":"cp","xi":[2,1,0]}`.
 *
 * # Safety
 * As for [`iw_weight_system_from_json`].
 */
enum IwStatus iw_weight_system_fixture(const char *spec, struct IwWeightSystem **out);

/**
 * Release a weight system. Null is ignored.
 *
 * # Safety
 * `ws` must be null or a handle from this library, not yet freed.
 */
void iw_weight_system_free(struct IwWeightSystem *ws);

/**
 * Number of fixed points, or 0 for a null handle.
 *
 * # Safety
 * `ws` must be null or a live handle.
 */
uintptr_t iw_weight_system_len(const struct IwWeightSystem *ws);

/**
 * Serialize a weight system to JSON.
 *
 * # Safety
 * `ws` must be a live handle; `out` must be writable.
 */
enum IwStatus iw_weight_system_to_json(const struct IwWeightSystem *ws, char **out);

/**
 * Structural, localization and Laurent checks; writes the report JSON.
 *
 * # Safety
 * `ws` must be a live handle; `out` must be writable.
 */
enum IwStatus iw_verify(const struct IwWeightSystem *ws, char **out);

/**
 * Level data, `r_s(1)` and (in dimension 8) the solver report.
 * `k0 <= 0` lets the library choose.
 *
 * # Safety
 * `ws` must be a live handle; `out` must be writable.
 */
enum IwStatus iw_hattori(const struct IwWeightSystem *ws, int64_t k0, int64_t l_max, char **out);

/**
 * Solutions `(l, m)` of the dimension-8 system for the given `C1`.
 *
 * # Safety
 * `out` must be writable.
 */
enum IwStatus iw_dim8_solver(int64_t c1, int64_t l_max, char **out);

/**
 * Enumerate multigraphs. Request: `{"n": 3, "lambdas": [..]?, "filter": "nonnegative"?, "dedup": "reversal"?}`.
 *
 * # Safety
 * `request` must be a NUL-terminated string; `out` must be writable.
 */
enum IwStatus iw_enumerate(const char *request,
                           char **out);

/**
 * Run the classification. Request: `{"n": 3, "lambdas": [..]?, "options": {..}?, "cache_dir": ".."?}`;
 * missing option fields take their defaults.
 *
 * # Safety
 * `request` must be a NUL-terminated string; `out` must be writable.
 */
enum IwStatus iw_classify(const char *request,
                          char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ISOWEIGHTS_H */

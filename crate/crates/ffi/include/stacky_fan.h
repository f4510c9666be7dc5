#ifndef STACKY_FAN_H
#define STACKY_FAN_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  SF_STATUS_OK = 0,
  /**
   * Null pointer, bad UTF-8 or out-of-range index.
   */
  SF_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Malformed JSON or parameters the library rejects.
   */
  SF_STATUS_INVALID_INPUT = 2,
  SF_STATUS_BOUND_EXCEEDED = 3,
  SF_STATUS_INVALID_TRIANGULATION = 4,
  SF_STATUS_COMPATIBILITY = 5,
  SF_STATUS_UNSUPPORTED = 6,
  /**
   * A panic was caught at the boundary.
   */
  SF_STATUS_INTERNAL = 7,
  SF_STATUS_BUFFER_TOO_SMALL = 8,
} SfStatus;

/**
 * A triangulation of a dilated simplex.
 */
typedef struct SfTriangulation SfTriangulation;

/**
 * An owned list of triangulations.
 */
typedef struct SfTriangulationList SfTriangulationList;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; empty after a success.
 * Valid until the next call into this library on the same thread.
 */
const char *sf_last_error(void);

/**
 * Library version, a static string.
 */
const char *sf_version(void);

/**
 * Parse `{"r","n","points","cells"}` JSON.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
SfStatus sf_triangulation_from_json(const char *json, SfTriangulation **out);

/**
 * Serialize to JSON; free the string with [`sf_string_free`].
 *
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
SfStatus sf_triangulation_to_json(const SfTriangulation *t, char **out);

/**
 * # Safety
 * `t` must be null or a handle from this library not yet freed.
 */
void sf_triangulation_free(SfTriangulation *t);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void sf_string_free(char *s);

/**
 * # Safety
 * `t` must be a live handle; the out-pointers must be writable.
 */
SfStatus sf_triangulation_shape(const SfTriangulation *t, size_t *r, uint64_t *n);

/**
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
SfStatus sf_triangulation_num_cells(const SfTriangulation *t, size_t *out);

/**
 * Fails with `InvalidTriangulation` when the cells do not triangulate.
 *
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
SfStatus sf_triangulation_is_unimodular(const SfTriangulation *t, bool *out);

/**
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
SfStatus sf_triangulation_is_invariant(const SfTriangulation *t, bool *out);

/**
 * Whether `fine` refines `coarse`. Refusals other than invalid input
 * give `Ok` with `false`.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
SfStatus sf_refines(const SfTriangulation *fine, const SfTriangulation *coarse, bool *out);

/**
 * All unimodular triangulations of `n·Δ^r`, refused above `max_points`
 * lattice points.
 *
 * # Safety
 * `out` must be writable.
 */
SfStatus sf_enumerate(size_t r, uint64_t n, size_t max_points, SfTriangulationList **out);

/**
 * # Safety
 * `list` must be a live handle; `out` must be writable.
 */
SfStatus sf_list_len(const SfTriangulationList *list, size_t *out);

/**
 * A copy of element `index`, owned by the caller.
 *
 * # Safety
 * `list` must be a live handle; `out` must be writable.
 */
SfStatus sf_list_get(const SfTriangulationList *list, size_t index, SfTriangulation **out);

/**
 * # Safety
 * `list` must be null or a handle from this library not yet freed.
 */
void sf_list_free(SfTriangulationList *list);

/**
 * Symmetric unimodular triangulation of `n·Δ^r` refining every unimodular
 * triangulation; `m` receives the dilation factor (the level is `m·n`).
 *
 * # Safety
 * The out-pointers must be writable.
 */
SfStatus sf_symmetric_refinement(size_t r,
                                 uint64_t n,
                                 size_t max_retry,
                                 uint64_t *m,
                                 SfTriangulation **out);

/**
 * Smith invariants of a row-major `rows x cols` matrix, trailing zeros
 * included. `written` always receives the required length.
 *
 * # Safety
 * `entries` must hold `rows * cols` values; `divisors` must hold `cap`.
 */
SfStatus sf_snf_divisors(const int64_t *entries,
                         size_t rows,
                         size_t cols,
                         int64_t *divisors,
                         size_t cap,
                         size_t *written);

/**
 * Levels `k_1, ..., k_depth` of the cofinal tower. On failure `written`
 * still receives the levels reached, which are copied if they fit.
 *
 * # Safety
 * `levels` must hold `cap` values; `written` must be writable.
 */
SfStatus sf_tower_levels(size_t r, size_t depth, uint64_t *levels, size_t cap, size_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STACKY_FAN_H */

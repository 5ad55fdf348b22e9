#ifndef ECIC_H
#define ECIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EcicRadiusKind {
  /**
   * No receivers, so every radius works.
   */
  ECIC_RADIUS_KIND_UNBOUNDED = 0,
  /**
   * Some receiver cannot decode even without errors.
   */
  ECIC_RADIUS_KIND_NOT_EVEN_IC = 1,
  ECIC_RADIUS_KIND_RADIUS = 2,
} EcicRadiusKind;

typedef enum EcicStatus {
  ECIC_STATUS_OK = 0,
  ECIC_STATUS_NULL_POINTER = 1,
  ECIC_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed or inconsistent input.
   */
  ECIC_STATUS_INVALID_INPUT = 3,
  /**
   * A search or enumeration limit was reached; the answer is unknown.
   */
  ECIC_STATUS_BUDGET_EXCEEDED = 4,
  /**
   * An internal consistency check failed.
   */
  ECIC_STATUS_INTERNAL = 5,
  ECIC_STATUS_PANIC = 6,
} EcicStatus;

/**
 * An ICSI instance.
 */
typedef struct EcicInstance EcicInstance;

/**
 * An encoding matrix over a finite field.
 */
typedef struct EcicMatrix EcicMatrix;

typedef struct EcicParams {
  size_t alpha;
  size_t kappa;
} EcicParams;

typedef struct EcicRadius {
  enum EcicRadiusKind kind;
  /**
   * Meaningful only for `Radius`.
   */
  size_t value;
} EcicRadius;

typedef struct EcicSearchResult {
  bool complete;
  /**
   * The optimal length; valid when `complete`.
   */
  size_t optimal_length;
  bool has_infeasible_below;
  /**
   * Largest length proven infeasible; valid when `has_infeasible_below`.
   */
  size_t infeasible_below;
  /**
   * Smallest length known to admit a code.
   */
  size_t feasible_at;
  uint64_t nodes;
} EcicSearchResult;

typedef struct EcicDecodeResult {
  uint8_t recovered;
  size_t estimate_weight;
  /**
   * False when the error estimate is heavier than the requested cap.
   */
  bool within_cap;
} EcicDecodeResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ecic_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void ecic_string_free(char *s);

/**
 * Parses an instance from its JSON document (1-based indices).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum EcicStatus ecic_instance_from_json(const char *json, struct EcicInstance **out_instance);

/**
 * A named instance: `pentagon`, `example1`, `odd-cycle-complement:<l>` or
 * `no-side-info:<n>`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum EcicStatus ecic_instance_builtin(const char *name, struct EcicInstance **out_instance);

/**
 * # Safety
 * `inst` must be null or a handle from this library that is not yet freed.
 */
void ecic_instance_free(struct EcicInstance *inst);

/**
 * # Safety
 * `inst` must be a live handle.
 */
size_t ecic_instance_messages(const struct EcicInstance *inst);

/**
 * # Safety
 * `inst` must be a live handle.
 */
size_t ecic_instance_receivers(const struct EcicInstance *inst);

/**
 * Parses a matrix in the text format: a `q rows cols` header, then one row
 * of space-separated elements per line.
 *
 * # Safety
 * `matrix_text` must be a NUL-terminated string; `out` must be writable.
 */
enum EcicStatus ecic_matrix_from_text(const char *matrix_text, struct EcicMatrix **out_matrix);

/**
 * A named binary matrix: `example1` or `pentagon`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum EcicStatus ecic_matrix_builtin(const char *name, struct EcicMatrix **out_matrix);

/**
 * # Safety
 * `matrix` must be null or a handle from this library that is not yet freed.
 */
void ecic_matrix_free(struct EcicMatrix *matrix);

/**
 * The matrix in the text format; free with [`ecic_string_free`].
 *
 * # Safety
 * `matrix` must be a live handle; `out_text` must be writable.
 */
enum EcicStatus ecic_matrix_to_text(const struct EcicMatrix *matrix, char **out_text);

/**
 * α(H) and κ_q(H).
 *
 * # Safety
 * `inst` must be a live handle; `out_params` must be writable.
 */
enum EcicStatus ecic_params(const struct EcicInstance *inst,
                            uint32_t q,
                            struct EcicParams *out_params);

/**
 * Whether the matrix is a (δ, H)-ECIC for the instance.
 *
 * # Safety
 * `inst` and `matrix` must be live handles; `out_valid` must be writable.
 */
enum EcicStatus ecic_verify(const struct EcicInstance *inst,
                            const struct EcicMatrix *matrix,
                            size_t delta,
                            bool *out_valid);

/**
 * The largest δ for which the matrix is a (δ, H)-ECIC.
 *
 * # Safety
 * `inst` and `matrix` must be live handles; `out_radius` must be writable.
 */
enum EcicStatus ecic_radius(const struct EcicInstance *inst,
                            const struct EcicMatrix *matrix,
                            struct EcicRadius *out_radius);

/**
 * The bounds report as a JSON object; free with [`ecic_string_free`].
 * Quantities that exceeded a budget are null and listed under `unknown`.
 *
 * # Safety
 * `inst` must be a live handle; `out_json` must be writable.
 */
enum EcicStatus ecic_bounds_json(const struct EcicInstance *inst,
                                 uint32_t q,
                                 size_t delta,
                                 char **out_json);

/**
 * Exhaustive search for the optimal (δ, H)-ECIC length. `node_budget` of 0
 * means the default. Running out of nodes is not a failure: the result is
 * then a bracket with `complete` false. `out_witness` may be null; otherwise
 * it receives the shortest code found, or null if there is none.
 *
 * # Safety
 * `inst` must be a live handle; `out_result` must be writable.
 */
enum EcicStatus ecic_search(const struct EcicInstance *inst,
                            uint32_t q,
                            size_t delta,
                            uint64_t node_budget,
                            size_t jobs,
                            struct EcicSearchResult *out_result,
                            struct EcicMatrix **out_witness);

/**
 * `x · L` into `out_codeword`, which must hold `cols` elements.
 *
 * # Safety
 * `x` must point to `x_len` elements and `out_codeword` to
 * `out_len` writable elements.
 */
enum EcicStatus ecic_encode(const struct EcicMatrix *matrix,
                            const uint8_t *x,
                            size_t x_len,
                            uint8_t *out_codeword,
                            size_t out_len);

/**
 * Syndrome-decodes receiver `receiver`'s demanded symbol from the received
 * word `y`. `side` holds the receiver's side information in increasing
 * message order. `weight_cap` only sets `within_cap`; the estimate is always
 * an exact coset leader.
 *
 * # Safety
 * `inst` and `matrix` must be live handles; `y` must point to `y_len`
 * elements, `side` to `side_len` elements; `out_result` must be writable.
 */
enum EcicStatus ecic_decode(const struct EcicInstance *inst,
                            const struct EcicMatrix *matrix,
                            size_t receiver,
                            const uint8_t *y,
                            size_t y_len,
                            const uint8_t *side,
                            size_t side_len,
                            size_t weight_cap,
                            struct EcicDecodeResult *out_result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ECIC_H */

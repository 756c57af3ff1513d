#ifndef KGLUSHKOV_H
#define KGLUSHKOV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KgRejectReason {
  KG_REJECT_REASON_NONE = 0,
  KG_REJECT_REASON_NOT_HOMOGENEOUS = 1,
  KG_REJECT_REASON_NOT_HAMMOCK = 2,
  KG_REJECT_REASON_ORBIT_BOUNDARY_IRREGULAR = 3,
  KG_REJECT_REASON_FACTORIZATION_FAILED = 4,
  KG_REJECT_REASON_NOT_REDUCIBLE = 5,
  KG_REJECT_REASON_VERIFICATION_FAILED = 6,
} KgRejectReason;

typedef enum KgStatus {
  KG_STATUS_OK = 0,
  KG_STATUS_NULL_ARGUMENT = 1,
  KG_STATUS_INVALID_UTF8 = 2,
  KG_STATUS_UNKNOWN_SEMIRING = 3,
  KG_STATUS_PARSE_ERROR = 4,
  KG_STATUS_NOT_PROPER = 5,
  KG_STATUS_SCHEMA_ERROR = 6,
  /**
   * The automaton is not a Glushkov automaton of an SNF expression.
   */
  KG_STATUS_REJECTED = 7,
  KG_STATUS_PANIC = 8,
} KgStatus;

/**
 * Opaque K-expression.
 */
typedef struct KgExpr KgExpr;

/**
 * Opaque weighted automaton.
 */
typedef struct KgWfa KgWfa;

typedef struct KgExprClass {
  bool proper;
  bool enf;
  bool snf;
} KgExprClass;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *kg_last_error(void);

/**
 * Parses an expression over the named semiring (`boolean`, `naturals`,
 * `tropical`, `rationals`).
 *
 * # Safety
 * `semiring_name` and `text` must be NUL-terminated strings; `out` must be
 * writable.
 */
enum KgStatus kg_expr_parse(const char *semiring_name, const char *src, struct KgExpr **out);

/**
 * # Safety
 * `e` must come from this library and not be used afterwards.
 */
void kg_expr_free(struct KgExpr *e);

/**
 * # Safety
 * `e` must be a live handle; `out` must be writable.
 */
enum KgStatus kg_expr_render(const struct KgExpr *e, char **out);

/**
 * # Safety
 * `e` must be a live handle; `out` must be writable.
 */
enum KgStatus kg_expr_classify(const struct KgExpr *e, struct KgExprClass *out);

/**
 * Glushkov automaton of a proper expression.
 *
 * # Safety
 * `e` must be a live handle; `out` must be writable.
 */
enum KgStatus kg_wfa_build(const struct KgExpr *e, struct KgWfa **out);

/**
 * Reads a WFA JSON document; the semiring comes from the document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum KgStatus kg_wfa_from_json(const char *json, struct KgWfa **out);

/**
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum KgStatus kg_wfa_to_json(const struct KgWfa *m, char **out);

/**
 * Number of states, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t kg_wfa_state_count(const struct KgWfa *m);

/**
 * Coefficient of `word` (empty string for the empty word), rendered as
 * a weight literal.
 *
 * # Safety
 * `m` must be a live handle, `word` a NUL-terminated string, `out`
 * writable.
 */
enum KgStatus kg_wfa_coefficient(const struct KgWfa *m, const char *word, char **out);

/**
 * Recovers an expression from `m`. On success `*out_expr` receives the
 * expression text and `*out_reason` is `KG_REJECT_REASON_NONE`. When the
 * automaton is rejected the call returns `KG_STATUS_REJECTED`, sets
 * `*out_reason` and leaves `*out_expr` null. `verify_len` > 0 checks the
 * result on all words up to that length.
 *
 * # Safety
 * `m` must be a live handle; `out_expr` and `out_reason` must be writable.
 */
enum KgStatus kg_wfa_recover(const struct KgWfa *m,
                             size_t verify_len,
                             char **out_expr,
                             enum KgRejectReason *out_reason);

/**
 * # Safety
 * `m` must come from this library and not be used afterwards.
 */
void kg_wfa_free(struct KgWfa *m);

/**
 * # Safety
 * `s` must be a string returned by this library, or null.
 */
void kg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KGLUSHKOV_H */

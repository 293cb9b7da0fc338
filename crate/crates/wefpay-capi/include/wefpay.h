#ifndef WEFPAY_H
#define WEFPAY_H

/* Generated by cbindgen from the wefpay-capi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a fallible call.
 */
enum WefpayStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  /**
   * The computation completed with a positive verdict.
   */
  WEFPAY_STATUS_OK = 0,
  /**
   * The computation completed with a negative verdict: envy was found,
   * no payment vector works, a transform precondition failed, or a
   * bound is violated. Output is still written where documented.
   */
  WEFPAY_STATUS_NEGATIVE = 1,
  /**
   * The input could not be processed: malformed JSON, a missing
   * document field, an unknown objective or transform, or a guard
   * refused the problem size. No output is written.
   */
  WEFPAY_STATUS_INVALID = 2,
  /**
   * An internal error in the library; no output is written.
   */
  WEFPAY_STATUS_INTERNAL = 3,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum WefpayStatus WefpayStatus;
#else
typedef int32_t WefpayStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/**
 * Opaque handle to a parsed instance document.
 */
typedef struct WefpayDoc WefpayDoc;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a JSON instance document into a fresh handle.
 *
 * Writes the handle to `out_doc` on success. Release it with
 * [`wefpay_doc_free`].
 *
 * # Safety
 *
 * `json` must be a valid NUL-terminated string and `out_doc` valid for
 * writes.
 */
WefpayStatus wefpay_doc_parse(const char *json, struct WefpayDoc **out_doc);

/**
 * Releases a document handle. Passing null is a no-op.
 *
 * # Safety
 *
 * `doc` must be null or a handle from [`wefpay_doc_parse`] that has not
 * been freed already.
 */
void wefpay_doc_free(struct WefpayDoc *doc);

/**
 * Renders the document back to its JSON file representation.
 *
 * # Safety
 *
 * `doc` must be a live handle and `out_json` valid for writes.
 */
WefpayStatus wefpay_doc_to_json(const struct WefpayDoc *doc, char **out_json);

/**
 * Checks weighted envy-freeness of the document's allocation and
 * payments; both fields are required.
 *
 * Writes a JSON report (`wef`, `classification`, and the worst envious
 * pair as `witness` when envy exists) and returns `Ok` when the pair is
 * envy-free, `Negative` otherwise.
 *
 * # Safety
 *
 * `doc` must be a live handle and `out_json` valid for writes.
 */
WefpayStatus wefpay_check(const struct WefpayDoc *doc, char **out_json);

/**
 * Computes the pointwise smallest nonnegative payments that make the
 * document's allocation envy-free; the `allocation` field is required.
 *
 * Writes a JSON report (`payments`, `total`, `classification`) on `Ok`.
 * Returns `Negative` without output when no payments work.
 *
 * # Safety
 *
 * `doc` must be a live handle and `out_json` valid for writes.
 */
WefpayStatus wefpay_minimal_subsidy(const struct WefpayDoc *doc, char **out_json);

/**
 * Optimizes `objective` over payment vectors for the document's
 * allocation; the `allocation` field is required.
 *
 * `objective` is a catalog name: `P1`, `P1w`, `P2`, `P3max`, `P3norm`,
 * `P4`, `P5sum`, or `P5max`. Writes a JSON report (`objective`,
 * `optimum`, `optimum_decimal`, `payments`, `classification`) on `Ok`.
 * Returns `Negative` without output when no payments work.
 *
 * # Safety
 *
 * `doc` must be a live handle, `objective` a valid NUL-terminated string,
 * and `out_json` valid for writes.
 */
WefpayStatus wefpay_opt(const struct WefpayDoc *doc, const char *objective, char **out_json);

/**
 * Optimizes `objective` over every allocation of the document's instance
 * by exhaustive search; any `allocation` field is ignored.
 *
 * Writes the [`wefpay_opt`] report plus the winning `allocation` on `Ok`.
 * Returns `Negative` without output when no allocation admits payments,
 * and `Invalid` when the search space exceeds the guard.
 *
 * # Safety
 *
 * `doc` must be a live handle, `objective` a valid NUL-terminated string,
 * and `out_json` valid for writes.
 */
WefpayStatus wefpay_search(const struct WefpayDoc *doc, const char *objective, char **out_json);

/**
 * Evaluates the payment-bound relations for the document's allocation;
 * the `allocation` field is required.
 *
 * Writes a JSON report (one row per relation plus `all_hold`) and returns
 * `Ok` when every bound holds, `Negative` when any fails. Returns
 * `Negative` without output when no payments work at all.
 *
 * # Safety
 *
 * `doc` must be a live handle and `out_json` valid for writes.
 */
WefpayStatus wefpay_bounds(const struct WefpayDoc *doc, char **out_json);

/**
 * Applies a payment transform to the document's payments; the `payments`
 * field is required.
 *
 * `kind` is one of `"slide"`, `"balance"`, `"normalize"`, or
 * `"to-subsidy"`; `z` is the slide amount as a rational string (required
 * for `"slide"`, ignored otherwise and may be null). Writes a JSON report
 * (`transform`, `payments`, `classification`, and `total_subsidy` for
 * `"to-subsidy"`) on `Ok`. Returns `Negative` without output when the
 * transform's precondition fails.
 *
 * # Safety
 *
 * `doc` must be a live handle, `kind` a valid NUL-terminated string, `z`
 * null or a valid NUL-terminated string, and `out_json` valid for writes.
 */
WefpayStatus wefpay_transform(const struct WefpayDoc *doc,
                              const char *kind,
                              const char *z,
                              char **out_json);

/**
 * Returns the explanation recorded by the most recent call on this
 * thread — set for `Invalid`, `Internal`, and `Negative` results that
 * carry no JSON output — or null when there is nothing to explain. The
 * caller owns the returned string; release it with
 * [`wefpay_string_free`].
 */
char *wefpay_last_error_message(void);

/**
 * Releases a string returned by this library. Passing null is a no-op.
 *
 * # Safety
 *
 * `s` must be null or a string returned by this library that has not been
 * freed already.
 */
void wefpay_string_free(char *s);

/**
 * Library version as a static NUL-terminated string; do not free it.
 */
const char *wefpay_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEFPAY_H */

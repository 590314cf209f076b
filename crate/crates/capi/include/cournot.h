/* C interface for the cournot oligopoly solver and efficiency bounds. */

#pragma once

/* Generated with cbindgen:0.28.0 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a C-interface call.
typedef enum CournotStatus {
  // The call succeeded.
  COURNOT_STATUS_OK = 0,
  // A required pointer argument was null.
  COURNOT_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  COURNOT_STATUS_INVALID_UTF8 = 2,
  // The instance JSON did not describe a valid market.
  COURNOT_STATUS_PARSE_ERROR = 3,
  // The market is degenerate: no supplier can profitably produce.
  COURNOT_STATUS_DEGENERATE = 4,
  // A solver failed; see `cournot_last_error`.
  COURNOT_STATUS_SOLVER_ERROR = 5,
  // A numeric argument was outside its domain.
  COURNOT_STATUS_INVALID_ARGUMENT = 6,
  // An internal invariant failed; see `cournot_last_error`.
  COURNOT_STATUS_INTERNAL_ERROR = 7,
} CournotStatus;

// Opaque market handle created by `cournot_instance_parse` and released
// by `cournot_instance_free`.
typedef struct CournotInstance CournotInstance;

// Message describing the most recent failure on this thread, or null when
// every call so far succeeded.  The pointer stays valid until the next
// failing call on the same thread; do not free it.
const char *cournot_last_error(void);

// Parses an instance from JSON of the form
// `{"demand": {...}, "costs": [...], "R": <optional>}` and stores a heap
// handle in `out`.  On any failure `out` is untouched.
//
// # Safety
// `json` must point to a NUL-terminated string and `out` to writable
// memory for one pointer.
enum CournotStatus cournot_instance_parse(const char *json, struct CournotInstance **out);

// Releases a handle returned by `cournot_instance_parse`.  Null is a
// no-op.  Passing the same handle twice is undefined behavior.
//
// # Safety
// `inst` must be null or a pointer obtained from `cournot_instance_parse`
// that has not been freed yet.
void cournot_instance_free(struct CournotInstance *inst);

// Number of suppliers in the instance, or -1 when `inst` is null.
//
// # Safety
// `inst` must be null or a live handle from `cournot_instance_parse`.
int cournot_instance_suppliers(const struct CournotInstance *inst);

// Solves the instance end to end — social optimum, stationary candidates
// with deviation audits, monopoly output, and every applicable efficiency
// bound — and stores the JSON report as a NUL-terminated string in `out`.
// Free the string with `cournot_string_free`.
//
// `residual_tol` overrides the first-order residual tolerance when it is
// a finite positive number; any other value keeps the default (1e-8).
//
// # Safety
// `inst` must be a live handle from `cournot_instance_parse` and `out`
// must point to writable memory for one pointer.
enum CournotStatus cournot_instance_analyze_json(const struct CournotInstance *inst,
                                                 double residual_tol,
                                                 char **out);

// Largest profit any supplier could still gain by deviating from the
// allocation `x` (length `len`), written to `out_deficit`; `out_verified`
// receives 1 when no profitable deviation exists within tolerance.
//
// # Safety
// `inst` must be a live handle; `x` must point to `len` doubles;
// `out_deficit` and `out_verified` must be writable.
enum CournotStatus cournot_instance_verify(const struct CournotInstance *inst,
                                           const double *x,
                                           size_t len,
                                           double *out_deficit,
                                           int *out_verified);

// Releases a string returned by this library.  Null is a no-op.
//
// # Safety
// `s` must be null or a string pointer produced by this library that has
// not been freed yet.
void cournot_string_free(char *s);

// Worst-case efficiency `3b^2 - 4b + 2` of a stationary allocation with
// normalized aggregate `b` under affine demand.  Returns NaN outside the
// domain `0.5 <= b < 1`.
double cournot_bound_g(double b);

// Worst-case equilibrium efficiency for convex demand with curvature
// ratio `cbar >= 1`.  Returns NaN outside the domain.
double cournot_bound_f(double cbar);

// Worst-case monopoly efficiency `3/(3 + cbar)` for convex demand with
// curvature ratio `cbar >= 1`.  Returns NaN outside the domain.
double cournot_bound_mono(double cbar);

/* C ABI for the wicklab workbench. Generated by cbindgen; do not edit. */

#ifndef WICKLAB_H
#define WICKLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call in this ABI.
typedef enum WicklabStatus {
  // The call succeeded.
  WICKLAB_STATUS_OK = 0,
  // A required pointer argument was null.
  WICKLAB_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  WICKLAB_STATUS_INVALID_UTF8 = 2,
  // An argument was malformed (zero mode, duplicate mode, bad JSON, …);
  // `wicklab_last_message` has the detail.
  WICKLAB_STATUS_INVALID_ARGUMENT = 3,
  // The library declined the request (inadmissible map, degree cap or
  // node budget exceeded, …); `wicklab_last_message` has the detail.
  WICKLAB_STATUS_REJECTED = 4,
  // An internal panic was caught at the boundary; the handle state is
  // unspecified afterwards.
  WICKLAB_STATUS_PANICKED = 5,
} WicklabStatus;

// Opaque handle to a transformation map with complex double coefficients.
typedef struct WicklabLambda WicklabLambda;

// Opaque handle to a Wick polynomial with complex double coefficients.
typedef struct WicklabPoly WicklabPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The library version as a static NUL-terminated string.
const char *wicklab_version(void);

// Detail text for the most recent failure or validity witness on the
// calling thread. The pointer stays valid until the next call on the
// same thread that records a message; never free it.
const char *wicklab_last_message(void);

// A new zero polynomial. Release with [`wicklab_poly_free`].
struct WicklabPoly *wicklab_poly_new(void);

// A deep copy of `poly`, or null when `poly` is null. Release with
// [`wicklab_poly_free`].
//
// # Safety
// `poly` must be null or a live handle from this library.
struct WicklabPoly *wicklab_poly_clone(const struct WicklabPoly *poly);

// Release a polynomial handle. Null is accepted and ignored.
//
// # Safety
// `poly` must be null or an unreleased handle from this library.
void wicklab_poly_free(struct WicklabPoly *poly);

// Add `(re + i·im)·:x^α:` to the polynomial, where α is given as
// parallel arrays of `n` (mode, multiplicity) pairs; `n = 0` addresses
// the constant term. Adding to an existing term accumulates.
//
// # Safety
// `poly` must be a live handle; `modes` and `mults` must point to `n`
// readable elements each (or `n` must be 0).
enum WicklabStatus wicklab_poly_add_term(struct WicklabPoly *poly,
                                         const uint32_t *modes,
                                         const uint32_t *mults,
                                         size_t n,
                                         double re,
                                         double im);

// Number of stored (nonzero) terms.
//
// # Safety
// `poly` must be a live handle and `out` a writable pointer.
enum WicklabStatus wicklab_poly_term_count(const struct WicklabPoly *poly, size_t *out);

// Total degree (0 for the zero polynomial).
//
// # Safety
// `poly` must be a live handle and `out` a writable pointer.
enum WicklabStatus wicklab_poly_degree(const struct WicklabPoly *poly, uint32_t *out);

// The coefficient at the multi-index given by `n` (mode, multiplicity)
// pairs (zero when the term is absent).
//
// # Safety
// `poly` must be a live handle; `modes`/`mults` as in
// [`wicklab_poly_add_term`]; `out_re`/`out_im` must be writable.
enum WicklabStatus wicklab_poly_coefficient(const struct WicklabPoly *poly,
                                            const uint32_t *modes,
                                            const uint32_t *mults,
                                            size_t n,
                                            double *out_re,
                                            double *out_im);

// Gaussian inner product ⟨a, b⟩ (antilinear in `a`).
//
// # Safety
// `a` and `b` must be live handles; `out_re`/`out_im` must be writable.
enum WicklabStatus wicklab_poly_inner_product(const struct WicklabPoly *a,
                                              const struct WicklabPoly *b,
                                              double *out_re,
                                              double *out_im);

// Squared Gaussian norm ‖poly‖² (a real number).
//
// # Safety
// `poly` must be a live handle and `out` a writable pointer.
enum WicklabStatus wicklab_poly_norm_squared(const struct WicklabPoly *poly, double *out);

// Pointwise (Wick-expanded) product `a·b` as a new handle in `*out`.
// `degree_cap = 0` selects the library default; a product exceeding the
// cap is rejected rather than truncated.
//
// # Safety
// `a` and `b` must be live handles and `out` a writable pointer.
enum WicklabStatus wicklab_poly_wick_product(const struct WicklabPoly *a,
                                             const struct WicklabPoly *b,
                                             uint32_t degree_cap,
                                             struct WicklabPoly **out);

// A new empty transformation map. Release with [`wicklab_lambda_free`].
struct WicklabLambda *wicklab_lambda_new(void);

// Release a map handle. Null is accepted and ignored.
//
// # Safety
// `lambda` must be null or an unreleased handle from this library.
void wicklab_lambda_free(struct WicklabLambda *lambda);

// Set the image of the position direction e_mode to the constant
// `re + i·im` (validity later requires it to be real).
//
// # Safety
// `lambda` must be a live handle.
enum WicklabStatus wicklab_lambda_set_v(struct WicklabLambda *lambda,
                                        uint32_t mode,
                                        double re,
                                        double im);

// Set the image of the momentum direction Je_mode to a copy of `poly`.
//
// # Safety
// `lambda` and `poly` must be live handles.
enum WicklabStatus wicklab_lambda_set_jv(struct WicklabLambda *lambda,
                                         uint32_t mode,
                                         const struct WicklabPoly *poly);

// Check the commutation-compatibility conditions. `*out_valid` receives
// the verdict; when the map is invalid, the witness text is available
// through [`wicklab_last_message`].
//
// # Safety
// `lambda` must be a live handle and `out_valid` a writable pointer.
enum WicklabStatus wicklab_lambda_validate(const struct WicklabLambda *lambda, bool *out_valid);

// Parse a model from JSON, run its suites with the given seed, and
// return the JSON report. `*out_report` receives a NUL-terminated
// string owned by the caller (release with [`wicklab_string_free`]);
// `*out_failed` receives the number of failed checks, so 0 means every
// check passed.
//
// # Safety
// `json` must be a NUL-terminated string; `out_report` and `out_failed`
// must be writable pointers.
enum WicklabStatus wicklab_check_model_json(const char *json,
                                            uint64_t seed,
                                            char **out_report,
                                            size_t *out_failed);

// Release a string returned by [`wicklab_check_model_json`]. Null is
// accepted and ignored.
//
// # Safety
// `s` must be null or an unreleased string from this library.
void wicklab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WICKLAB_H */

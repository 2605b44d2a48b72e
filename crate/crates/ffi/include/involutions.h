#ifndef INVOLUTIONS_H
#define INVOLUTIONS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes.
 */
typedef enum InvStatus {
  INV_OK = 0,
  INV_NULL_POINTER = 1,
  INV_INVALID_ARGUMENT = 2,
  INV_UNKNOWN_NAME = 3,
  INV_OUTSIDE_DOMAIN = 4,
  INV_NUMERICAL_FAILURE = 5,
  INV_VERIFICATION_FAILED = 6,
  INV_PANIC = 7,
} InvStatus;

/*
 An involution `h` of an open interval.
 */
typedef struct InvInvolution InvInvolution;

/*
 An isochronous potential built from an involution.
 */
typedef struct InvPotential InvPotential;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or an empty string. The
 pointer stays valid until the next failing call on the same thread.
 */
const char *inv_last_error(void);

/*
 Builds a catalog involution, e.g. `"rational"` with one parameter.

 # Safety
 `name` must be a NUL-terminated string, `params` must point to `n_params`
 doubles (or be null when `n_params` is 0) and `out` must be writable.
 */
enum InvStatus inv_catalog_new(const char *name,
                               const double *params,
                               size_t n_params,
                               struct InvInvolution **out);

/*
 Builds the involution of a named even function, e.g. `"y2_over_8"`.

 # Safety
 Same contract as [`inv_catalog_new`].
 */
enum InvStatus inv_from_even_preset(const char *name,
                                    const double *params,
                                    size_t n_params,
                                    struct InvInvolution **out);

/*
 Releases an involution; null is ignored.

 # Safety
 `h` must come from this library and not be used afterwards.
 */
void inv_involution_free(struct InvInvolution *h);

/*
 `h(x)`.

 # Safety
 `h` must be a live handle and `out` writable.
 */
enum InvStatus inv_involution_eval(const struct InvInvolution *h, double x, double *out);

/*
 Endpoints of the domain; infinite ends are returned as ±infinity.

 # Safety
 `h` must be a live handle and `lo`, `hi` writable.
 */
enum InvStatus inv_involution_domain(const struct InvInvolution *h, double *lo, double *hi);

/*
 Checks `h∘h = id`, strict decrease and `h(0) = 0` on `samples` points
 with absolute and relative tolerance `tol`. `passed` receives 1 or 0.

 # Safety
 `h` must be a live handle and the outputs writable.
 */
enum InvStatus inv_involution_verify(const struct InvInvolution *h,
                                     size_t samples,
                                     double tol,
                                     double *max_residual,
                                     int32_t *passed);

/*
 The unique fixed point, found by bracketing `x − h(x)`.

 # Safety
 `h` must be a live handle and `out` writable.
 */
enum InvStatus inv_involution_fixed_point(const struct InvInvolution *h, double tol, double *out);

/*
 `V(x) = ω²/8·(x − h(x))²`.

 # Safety
 `h` must be a live handle and `out` writable.
 */
enum InvStatus inv_potential_new(const struct InvInvolution *h,
                                 double omega,
                                 struct InvPotential **out);

/*
 Releases a potential; null is ignored.

 # Safety
 `p` must come from this library and not be used afterwards.
 */
void inv_potential_free(struct InvPotential *p);

/*
 `V(x)`.

 # Safety
 `p` must be a live handle and `out` writable.
 */
enum InvStatus inv_potential_eval(const struct InvPotential *p, double x, double *out);

/*
 Period of the orbit with energy `energy`, by quadrature.

 # Safety
 `p` must be a live handle and `out` writable.
 */
enum InvStatus inv_potential_period(const struct InvPotential *p, double energy, double *out);

/*
 Closed-form solution of `y'(t) = a·y(−t/(1+t))`, `y(0) = y0`.

 # Safety
 `out` must be writable.
 */
enum InvStatus inv_fde_closed_form(double a, double y0, double t, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* INVOLUTIONS_H */

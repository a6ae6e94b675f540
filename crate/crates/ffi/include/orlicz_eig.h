#ifndef ORLICZ_EIG_H
#define ORLICZ_EIG_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum OeStatus {
  OE_STATUS_OK = 0,
  /**
   * Null pointer or malformed argument.
   */
  OE_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Parameters rejected before any computation.
   */
  OE_STATUS_CONFIG_ERROR = 2,
  /**
   * A numerical method failed.
   */
  OE_STATUS_NUMERICAL_ERROR = 3,
  /**
   * A Rust panic was caught at the boundary.
   */
  OE_STATUS_PANIC = 4,
} OeStatus;

/**
 * Opaque eigenpair.
 */
typedef struct OeEigenPair OeEigenPair;

/**
 * Opaque Young function.
 */
typedef struct OeYoung OeYoung;

/**
 * Solver and discretization parameters of [`oe_eig_first`].
 */
typedef struct OeSolveOptions {
  double a;
  double b;
  size_t n_elements;
  /**
   * Luxemburg tolerance.
   */
  double tol;
  double residual_tol;
  size_t max_iters;
} OeSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`) and returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t oe_last_error_message(char *buf, size_t len);

/**
 * Parses a family string such as `power:2` or `powersum:2,1,4,1`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum OeStatus oe_young_new(const char *spec, struct OeYoung **out);

/**
 * # Safety
 * `y` must be null or a handle from [`oe_young_new`] not yet freed.
 */
void oe_young_free(struct OeYoung *y);

/**
 * `G(t)`, `g(t)` and `g'(t)`.
 *
 * # Safety
 * `y` must be a live handle and the output pointers valid.
 */
enum OeStatus oe_young_evaluate(const struct OeYoung *y,
                                double t,
                                double *big_g,
                                double *g,
                                double *g_prime);

/**
 * Growth exponents `p⁻ ≤ p⁺`.
 *
 * # Safety
 * `y` must be a live handle and the output pointers valid.
 */
enum OeStatus oe_young_exponents(const struct OeYoung *y, double *p_minus, double *p_plus);

/**
 * Structural flags: `G(√t)` convex and `g'` non-increasing.
 *
 * # Safety
 * `y` must be a live handle and the output pointers valid.
 */
enum OeStatus oe_young_flags(const struct OeYoung *y, bool *sqrt_convex, bool *gprime_decreasing);

/**
 * Luxemburg norm `‖u‖_G` of the piecewise-linear field with interior nodal
 * values `coefficients[0..n_elements-1]` on `(a, b)`.
 *
 * # Safety
 * `y` must be a live handle, `coefficients` must hold `len` values and
 * `out` must be valid.
 */
enum OeStatus oe_norm_g(const struct OeYoung *y,
                        double a,
                        double b,
                        size_t n_elements,
                        const double *coefficients,
                        size_t len,
                        double *out);

/**
 * Seminorm `[u]_{s,G}` (or `‖u'‖_G` when `s = 1`) of the field described
 * as in [`oe_norm_g`].
 *
 * # Safety
 * Same as [`oe_norm_g`].
 */
enum OeStatus oe_seminorm(const struct OeYoung *y,
                          double s,
                          double a,
                          double b,
                          size_t n_elements,
                          const double *coefficients,
                          size_t len,
                          double *out);

/**
 * Default options: `(0, 1)`, 128 elements, Luxemburg tolerance `1e-12`,
 * residual tolerance `1e-7`, 2000 iterations.
 */
struct OeSolveOptions oe_solve_options_default(void);

/**
 * First eigenpair of order `s ∈ (0, 1]`. A non-converged run still returns
 * `OE_STATUS_OK`; query [`oe_eigenpair_converged`].
 *
 * # Safety
 * `y` must be a live handle, `options` and `out` valid pointers.
 */
enum OeStatus oe_eig_first(const struct OeYoung *y,
                           double s,
                           const struct OeSolveOptions *options,
                           struct OeEigenPair **out);

/**
 * # Safety
 * `p` must be null or a handle from [`oe_eig_first`] not yet freed.
 */
void oe_eigenpair_free(struct OeEigenPair *p);

/**
 * Eigenvalue, or NaN for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
double oe_eigenpair_lambda(const struct OeEigenPair *p);

/**
 * Euler-Lagrange multiplier, or NaN for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
double oe_eigenpair_mu(const struct OeEigenPair *p);

/**
 * Final residual norm, or NaN for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
double oe_eigenpair_residual(const struct OeEigenPair *p);

/**
 * # Safety
 * `p` must be null or a live handle.
 */
bool oe_eigenpair_converged(const struct OeEigenPair *p);

/**
 * # Safety
 * `p` must be null or a live handle.
 */
size_t oe_eigenpair_iterations(const struct OeEigenPair *p);

/**
 * Number of nodal values including both endpoints.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t oe_eigenpair_len(const struct OeEigenPair *p);

/**
 * Copies the nodal values of the eigenfunction, endpoints included.
 *
 * # Safety
 * `p` must be a live handle and `buf` must hold `len` writable values.
 */
enum OeStatus oe_eigenpair_values(const struct OeEigenPair *p, double *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORLICZ_EIG_H */

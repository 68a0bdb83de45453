#ifndef HOLOCOND_H
#define HOLOCOND_H

/* Generated with cbindgen:0.27.0 */

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HolocondConditioning {
  HOLOCOND_CONDITIONING_NONE,
  HOLOCOND_CONDITIONING_ZERO_AT_ORIGIN,
  HOLOCOND_CONDITIONING_CRITICAL_AT_ORIGIN,
} HolocondConditioning;

/**
 * Radial densities exposed through [`holocond_radial_density`]. Kinds
 * without a degree ignore the `n` argument.
 */
typedef enum HolocondDensityKind {
  /**
   * Zeros given a critical point at 0, degree `n`, Lebesgue measure in `z`.
   */
  HOLOCOND_DENSITY_KIND_DN_SU2,
  /**
   * The same at the `n^{-1/2}` length scale.
   */
  HOLOCOND_DENSITY_KIND_RESCALED_DN,
  HOLOCOND_DENSITY_KIND_D_INFINITY,
  /**
   * Kac-Rice formula with affine-frame jets at the `n^{-1/2}` scale.
   */
  HOLOCOND_DENSITY_KIND_RESCALED_KN,
  HOLOCOND_DENSITY_KIND_K_INFINITY,
  /**
   * Critical points given a zero at 0, normal-frame evaluation.
   */
  HOLOCOND_DENSITY_KIND_RESCALED_KN_NORMAL_FRAME,
  HOLOCOND_DENSITY_KIND_K_INFINITY_NORMAL_FRAME,
  /**
   * Smooth part of the zeros-given-zero limit density.
   */
  HOLOCOND_DENSITY_KIND_ZEROS_GIVEN_ZERO,
} HolocondDensityKind;

typedef enum HolocondReference {
  HOLOCOND_REFERENCE_KAC_RICE,
  HOLOCOND_REFERENCE_NORMAL_FRAME,
} HolocondReference;

/**
 * Result code of every fallible call.
 */
enum HolocondStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  HOLOCOND_STATUS_OK = 0,
  HOLOCOND_STATUS_NULL_POINTER = 1,
  HOLOCOND_STATUS_INVALID_ARGUMENT = 2,
  /**
   * An argument lies outside the domain of the requested quantity.
   */
  HOLOCOND_STATUS_DOMAIN = 3,
  /**
   * A covariance that must be positive is not.
   */
  HOLOCOND_STATUS_DEGENERATE = 4,
  /**
   * The polynomial's leading coefficient is numerically zero.
   */
  HOLOCOND_STATUS_DEGENERATE_LEADING_COEFFICIENT = 5,
  /**
   * The output buffer is shorter than the result; the required length has
   * been written to the length out-pointer.
   */
  HOLOCOND_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * The experiment handle has not been run yet.
   */
  HOLOCOND_STATUS_NOT_RUN = 7,
  HOLOCOND_STATUS_PANIC = 8,
};
#ifndef __cplusplus
typedef int32_t HolocondStatus;
#endif // __cplusplus

/**
 * Opaque Monte Carlo experiment.
 */
typedef struct HolocondExperiment HolocondExperiment;

/**
 * Opaque sampled polynomial.
 */
typedef struct HolocondPolynomial HolocondPolynomial;

typedef struct HolocondComplex {
  double re;
  double im;
} HolocondComplex;

/**
 * `(d/dz)^a (d/dw̄)^b K(z, w)` is `entries[a][b] * exp(log_scale)`.
 */
typedef struct HolocondJet {
  struct HolocondComplex entries[3][3];
  double log_scale;
} HolocondJet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * is owned by the library and valid until the next failing call.
 */
const char *holocond_last_error_message(void);

/**
 * Evaluates a radial density at radius `r >= 0`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
HolocondStatus holocond_radial_density(enum HolocondDensityKind kind,
                                       uint32_t n,
                                       double r,
                                       double *out);

/**
 * Derivative jet of the SU(2) kernel `(1 + z w̄)^n`, `n >= 2`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
HolocondStatus holocond_su2_jet(uint32_t n,
                                struct HolocondComplex z,
                                struct HolocondComplex w,
                                struct HolocondJet *out);

/**
 * Creates an experiment histogramming zeros (for `CriticalAtOrigin` and
 * `None`) or critical points (for `ZeroAtOrigin`) of `trials` sampled
 * degree-`n` polynomials over the annuli between consecutive `edges`.
 *
 * # Safety
 * `edges` must be valid for `edge_count` reads and `out` for one write.
 */
HolocondStatus holocond_experiment_new(uint32_t n,
                                       uint64_t trials,
                                       enum HolocondConditioning conditioning,
                                       const double *edges,
                                       size_t edge_count,
                                       uint64_t seed,
                                       struct HolocondExperiment **out);

/**
 * Chooses the density critical point counts are compared against.
 *
 * # Safety
 * `experiment` must be NULL or a live handle.
 */
HolocondStatus holocond_experiment_set_reference(struct HolocondExperiment *experiment,
                                                 enum HolocondReference reference);

/**
 * Worker threads for [`holocond_experiment_run`]; 0 uses the global pool.
 * Results do not depend on the thread count.
 *
 * # Safety
 * `experiment` must be NULL or a live handle.
 */
HolocondStatus holocond_experiment_set_threads(struct HolocondExperiment *experiment,
                                               size_t threads);

/**
 * Counts zeros by companion-matrix roots instead of winding numbers.
 *
 * # Safety
 * `experiment` must be NULL or a live handle.
 */
HolocondStatus holocond_experiment_use_companion_roots(struct HolocondExperiment *experiment,
                                                       bool enabled);

/**
 * Runs the experiment, replacing any previous result.
 *
 * # Safety
 * `experiment` must be NULL or a live handle.
 */
HolocondStatus holocond_experiment_run(struct HolocondExperiment *experiment);

/**
 * Number of annuli, one less than the number of edges.
 *
 * # Safety
 * `experiment` must be NULL or a live handle; returns 0 for NULL.
 */
size_t holocond_experiment_bin_count(const struct HolocondExperiment *experiment);

/**
 * Observed count per annulus, summed over trials.
 *
 * # Safety
 * `experiment` must be NULL or a live handle; `out` valid for `capacity`
 * writes; `len` NULL or valid for one write.
 */
HolocondStatus holocond_experiment_counts(const struct HolocondExperiment *experiment,
                                          uint64_t *out,
                                          size_t capacity,
                                          size_t *len);

/**
 * Predicted count per annulus (`trials` times the density's annulus mass).
 *
 * # Safety
 * As for [`holocond_experiment_counts`].
 */
HolocondStatus holocond_experiment_predicted(const struct HolocondExperiment *experiment,
                                             double *out,
                                             size_t capacity,
                                             size_t *len);

/**
 * Empirical standard error of each count.
 *
 * # Safety
 * As for [`holocond_experiment_counts`].
 */
HolocondStatus holocond_experiment_stderr(const struct HolocondExperiment *experiment,
                                          double *out,
                                          size_t capacity,
                                          size_t *len);

/**
 * Number of samples redrawn because of a degenerate leading coefficient.
 *
 * # Safety
 * `experiment` must be NULL or a live handle; `out` valid for one write.
 */
HolocondStatus holocond_experiment_resamples(const struct HolocondExperiment *experiment,
                                             uint64_t *out);

/**
 * Releases an experiment. NULL is ignored.
 *
 * # Safety
 * `experiment` must be NULL or a handle not yet freed.
 */
void holocond_experiment_free(struct HolocondExperiment *experiment);

/**
 * Samples a degree-`n` polynomial from stream `stream` of `seed`. The same
 * `(seed, stream)` gives the same polynomial as trial `stream` of an
 * experiment with that seed.
 *
 * # Safety
 * `out` must be valid for one write.
 */
HolocondStatus holocond_polynomial_sample(uint32_t n,
                                          uint64_t seed,
                                          uint64_t stream,
                                          enum HolocondConditioning conditioning,
                                          struct HolocondPolynomial **out);

/**
 * Wraps `len >= 2` coefficients `a_0..a_n` in the orthonormal SU(2) basis.
 *
 * # Safety
 * `coeffs` must be valid for `len` reads and `out` for one write.
 */
HolocondStatus holocond_polynomial_from_coefficients(const struct HolocondComplex *coeffs,
                                                     size_t len,
                                                     struct HolocondPolynomial **out);

/**
 * Degree `n` of the polynomial, or 0 for NULL.
 *
 * # Safety
 * `poly` must be NULL or a live handle.
 */
uint32_t holocond_polynomial_degree(const struct HolocondPolynomial *poly);

/**
 * Copies the coefficients `a_0..a_n`.
 *
 * # Safety
 * `poly` must be NULL or a live handle; `out` valid for `capacity` writes;
 * `len` NULL or valid for one write.
 */
HolocondStatus holocond_polynomial_coefficients(const struct HolocondPolynomial *poly,
                                                struct HolocondComplex *out,
                                                size_t capacity,
                                                size_t *len);

/**
 * All `n` zeros. Call with `capacity = 0` to query the length.
 *
 * # Safety
 * As for [`holocond_polynomial_coefficients`].
 */
HolocondStatus holocond_polynomial_zeros(const struct HolocondPolynomial *poly,
                                         struct HolocondComplex *out,
                                         size_t capacity,
                                         size_t *len);

/**
 * Chern critical points in the disk `|z| <= radius`.
 *
 * # Safety
 * As for [`holocond_polynomial_coefficients`].
 */
HolocondStatus holocond_polynomial_critical_points(const struct HolocondPolynomial *poly,
                                                   double radius,
                                                   struct HolocondComplex *out,
                                                   size_t capacity,
                                                   size_t *len);

/**
 * Releases a polynomial. NULL is ignored.
 *
 * # Safety
 * `poly` must be NULL or a handle not yet freed.
 */
void holocond_polynomial_free(struct HolocondPolynomial *poly);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOLOCOND_H */

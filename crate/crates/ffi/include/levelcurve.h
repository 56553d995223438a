#ifndef LEVELCURVE_H
#define LEVELCURVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum LcStatus {
  LC_STATUS_OK = 0,
  LC_STATUS_INVALID_GEOMETRY = 1,
  LC_STATUS_NON_CONVEX_BODY = 2,
  LC_STATUS_INVALID_PROBLEM = 3,
  LC_STATUS_NON_CONVEX_ITERATE = 4,
  LC_STATUS_NEWTON_DIVERGED = 5,
  LC_STATUS_OUT_OF_RANGE = 6,
  LC_STATUS_GEOMETRY_NOT_NESTED = 7,
  LC_STATUS_NO_RADIAL_SOLUTION = 8,
  LC_STATUS_TOO_FEW_SAMPLES = 9,
  LC_STATUS_SINGULAR_SYSTEM = 10,
  LC_STATUS_CONFIG = 11,
  LC_STATUS_IO = 12,
  /**
   * A required pointer argument was null.
   */
  LC_STATUS_NULL_POINTER = 20,
  /**
   * A caller buffer is too small; the required length was still written.
   */
  LC_STATUS_BUFFER_TOO_SMALL = 21,
  /**
   * An enum argument is out of range.
   */
  LC_STATUS_INVALID_ARGUMENT = 22,
  LC_STATUS_PANIC = 99,
} LcStatus;

typedef enum LcEquation {
  LC_EQUATION_P_LAPLACE = 0,
  LC_EQUATION_MINIMAL_SURFACE = 1,
  LC_EQUATION_HARMONIC_AXISYM3D = 2,
} LcEquation;

typedef enum LcProfileKind {
  LC_PROFILE_KIND_MAX_GRAD_OVER_K1 = 0,
  LC_PROFILE_KIND_MIN_LOG_K1 = 1,
  LC_PROFILE_KIND_GAUSS2D = 2,
} LcProfileKind;

typedef enum LcCheckKind {
  LC_CHECK_KIND_CONVEX = 0,
  LC_CHECK_KIND_CONCAVE = 1,
  LC_CHECK_KIND_AFFINE = 2,
  LC_CHECK_KIND_ENDPOINT_BOUND = 3,
} LcCheckKind;

typedef enum LcJetMode {
  LC_JET_MODE_P_LAPLACE = 0,
  LC_JET_MODE_MINIMAL = 1,
} LcJetMode;

/**
 * Chain reports of a batch of random jets.
 */
typedef struct LcJetReport LcJetReport;

/**
 * A validated ring problem.
 */
typedef struct LcProblem LcProblem;

/**
 * A converged solution.
 */
typedef struct LcSolution LcSolution;

/**
 * Outcome of one profile check.
 */
typedef struct LcCheckResult {
  double worst_value;
  double tol_used;
  /**
   * Index into the interior profile samples.
   */
  size_t location;
  /**
   * Fitted slope for affine checks, NaN otherwise.
   */
  double slope;
  bool pass;
} LcCheckResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *lc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lc_version(void);

/**
 * Planar ring from outer and inner support samples on the uniform grid
 * `θ_j = 2πj/n`. The inner samples may use a different even count.
 *
 * # Safety
 * `outer` and `inner` must point to `n_outer` and `n_inner` doubles; `out`
 * must be a valid pointer.
 */
enum LcStatus lc_problem_new_planar(uint32_t kind,
                                    double p,
                                    const double *outer,
                                    size_t n_outer,
                                    const double *inner,
                                    size_t n_inner,
                                    size_t n_t,
                                    struct LcProblem **out);

/**
 * Axisymmetric ring in ℝ³ from meridian samples on `θ_j = πj/m`,
 * `j = 0..=m` (so `m + 1` values each).
 *
 * # Safety
 * As for [`lc_problem_new_planar`].
 */
enum LcStatus lc_problem_new_axisym(uint32_t kind,
                                    double p,
                                    const double *outer,
                                    size_t n_outer,
                                    const double *inner,
                                    size_t n_inner,
                                    size_t n_t,
                                    struct LcProblem **out);

/**
 * Problem from the JSON `problem` object of a run configuration. Sample
 * paths are resolved against the working directory.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum LcStatus lc_problem_from_json(const char *json, struct LcProblem **out);

/**
 * Override the Newton settings of a problem.
 *
 * # Safety
 * `problem` must be a live handle.
 */
enum LcStatus lc_problem_set_newton(struct LcProblem *problem,
                                    double tol,
                                    size_t max_iter,
                                    double damping,
                                    bool convexity_guard);

/**
 * # Safety
 * `problem` must be null or a handle not yet freed.
 */
void lc_problem_free(struct LcProblem *problem);

/**
 * # Safety
 * `problem` must be a live handle and `out` a valid pointer.
 */
enum LcStatus lc_solve(const struct LcProblem *problem, struct LcSolution **out);

/**
 * # Safety
 * `solution` must be null or a handle not yet freed.
 */
void lc_solution_free(struct LcSolution *solution);

/**
 * Grid size, final residual and Newton iteration count.
 *
 * # Safety
 * `solution` must be a live handle; output pointers may be null.
 */
enum LcStatus lc_solution_info(const struct LcSolution *solution,
                               size_t *n_theta,
                               size_t *n_t,
                               double *residual_norm,
                               size_t *iterations);

/**
 * Copy the support values `h` into `buf`. On entry `*len` is the buffer
 * capacity; on return it is the number of values (`n_t * n_theta`).
 *
 * # Safety
 * `solution` must be a live handle, `len` valid, and `buf` writable for
 * `*len` doubles.
 */
enum LcStatus lc_solution_h(const struct LcSolution *solution, double *buf, size_t *len);

/**
 * Same as [`lc_solution_h`] for `|∇u| = -1/h_t`.
 *
 * # Safety
 * As for [`lc_solution_h`].
 */
enum LcStatus lc_solution_grad(const struct LcSolution *solution, double *buf, size_t *len);

/**
 * Interior samples of a height profile (`n_t - 2` values) plus its two
 * boundary values.
 *
 * # Safety
 * As for [`lc_solution_h`]; `f0` and `f1` may be null.
 */
enum LcStatus lc_solution_profile(const struct LcSolution *solution,
                                  uint32_t kind,
                                  double *buf,
                                  size_t *len,
                                  double *f0,
                                  double *f1);

/**
 * Run one shape check on a profile with an absolute tolerance. A negative
 * `tol` selects `|tol| * max|f|`.
 *
 * # Safety
 * `solution` must be a live handle and `out` a valid pointer.
 */
enum LcStatus lc_solution_check(const struct LcSolution *solution,
                                uint32_t kind,
                                uint32_t check,
                                double tol,
                                struct LcCheckResult *out);

/**
 * Check `count` seeded random jets. `threads = 0` uses all cores; the result
 * does not depend on the thread count.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum LcStatus lc_jets_check(uint32_t mode,
                            size_t n,
                            double p,
                            double alpha,
                            double beta,
                            size_t count,
                            uint64_t seed,
                            size_t threads,
                            struct LcJetReport **out);

/**
 * Failure count and worst identity error of a jet batch.
 *
 * # Safety
 * `report` must be a live handle; output pointers may be null.
 */
enum LcStatus lc_jet_report_summary(const struct LcJetReport *report,
                                    size_t *count,
                                    size_t *failures,
                                    double *worst_identity,
                                    double *worst_inequality);

/**
 * Report of jet `index` as a JSON string, to be released with
 * [`lc_string_free`].
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum LcStatus lc_jet_report_json(const struct LcJetReport *report, size_t index, char **out);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void lc_jet_report_free(struct LcJetReport *report);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void lc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEVELCURVE_H */

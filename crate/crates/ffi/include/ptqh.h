/* C interface to the ptqh library. All handles are opaque; every
 * function returns a PtqhStatus and reports details through
 * ptqh_last_error_message(). */

#ifndef PTQH_H
#define PTQH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * PT phase of an operator with respect to an antiunitary involution.
 */
typedef enum PtqhPhase {
  /**
   * The operator does not commute with the symmetry.
   */
  PtqhPhaseNotSymmetric = 0,
  /**
   * Real spectrum on a K-invariant eigenbasis.
   */
  PtqhPhaseUnbroken = 1,
  /**
   * Complex-conjugate eigenvalue pairs.
   */
  PtqhPhaseBroken = 2,
  /**
   * Eigenvalue and eigenvector coalescence.
   */
  PtqhPhaseExceptionalPoint = 3,
} PtqhPhase;

/**
 * Result code of every fallible call.
 */
typedef enum PtqhStatus {
  /**
   * Success.
   */
  PtqhStatusOk = 0,
  /**
   * A required pointer was null.
   */
  PtqhStatusNullPointer = 1,
  /**
   * Malformed input: bad dimension, non-finite entry, or an argument
   * outside its domain.
   */
  PtqhStatusInvalidArgument = 2,
  /**
   * Operands have incompatible dimensions.
   */
  PtqhStatusDimensionMismatch = 3,
  /**
   * The supplied operator is not an antiunitary involution (or not
   * eta-antiunitary where required).
   */
  PtqhStatusNotInvolution = 4,
  /**
   * The operation requires the unbroken phase.
   */
  PtqhStatusPhaseUnsuitable = 5,
  /**
   * The matrix is not a valid effect, density, or eta-Hermitian operand.
   */
  PtqhStatusNotEffect = 6,
  /**
   * An iteration failed to converge or a subproblem was ill-conditioned.
   */
  PtqhStatusNumericalFailure = 7,
  /**
   * An internal invariant failed; the operation was aborted safely.
   */
  PtqhStatusInternalPanic = 8,
} PtqhStatus;

/**
 * Opaque dense complex matrix.
 */
typedef struct PtqhMatrix PtqhMatrix;

/**
 * Opaque Hermitian positive-definite metric with cached square roots.
 */
typedef struct PtqhMetric PtqhMetric;

/**
 * Opaque antilinear symmetry `x -> U conj(x)`.
 */
typedef struct PtqhSymmetry PtqhSymmetry;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message into `buffer` (NUL-terminated, truncated to
 * `length` bytes) and returns the full length of the message including the
 * terminator. A zero return means no error has been recorded. `buffer` may
 * be null to query the required size.
 */
uintptr_t ptqh_last_error_message(char *buffer, uintptr_t length);

/**
 * Creates a `dim x dim` matrix from row-major real and imaginary arrays.
 * `im` may be null for a real matrix.
 */
enum PtqhStatus ptqh_matrix_new(uintptr_t dim,
                                const double *re,
                                const double *im,
                                struct PtqhMatrix **out);

/**
 * Dimension of a matrix handle; zero for null.
 */
uintptr_t ptqh_matrix_dim(const struct PtqhMatrix *matrix);

/**
 * Reads one entry of a matrix handle.
 */
enum PtqhStatus ptqh_matrix_get(const struct PtqhMatrix *matrix,
                                uintptr_t row,
                                uintptr_t col,
                                double *re,
                                double *im);

/**
 * Releases a matrix handle. Null is ignored.
 */
void ptqh_matrix_free(struct PtqhMatrix *matrix);

/**
 * Creates the antilinear symmetry `x -> U conj(x)` from its unitary part,
 * validating that it is an antiunitary involution.
 */
enum PtqhStatus ptqh_symmetry_new(const struct PtqhMatrix *u,
                                  double tol_rel,
                                  struct PtqhSymmetry **out);

/**
 * Plain complex conjugation in dimension `dim`.
 */
enum PtqhStatus ptqh_symmetry_kappa(uintptr_t dim, struct PtqhSymmetry **out);

/**
 * Releases a symmetry handle. Null is ignored.
 */
void ptqh_symmetry_free(struct PtqhSymmetry *symmetry);

/**
 * Classifies the PT phase of `hamiltonian` under `symmetry`.
 */
enum PtqhStatus ptqh_classify(const struct PtqhMatrix *hamiltonian,
                              const struct PtqhSymmetry *symmetry,
                              double tol_rel,
                              enum PtqhPhase *out_phase);

/**
 * Constructs a metric operator from an operator in the unbroken phase.
 */
enum PtqhStatus ptqh_metric_from_unbroken(const struct PtqhMatrix *hamiltonian,
                                          const struct PtqhSymmetry *symmetry,
                                          double tol_rel,
                                          struct PtqhMetric **out);

/**
 * Copies the metric matrix eta out of a metric handle.
 */
enum PtqhStatus ptqh_metric_matrix(const struct PtqhMetric *metric, struct PtqhMatrix **out);

/**
 * Smallest eigenvalue of the metric (its distance from losing positivity).
 */
enum PtqhStatus ptqh_metric_min_eigenvalue(const struct PtqhMetric *metric, double *out);

/**
 * Releases a metric handle. Null is ignored.
 */
void ptqh_metric_free(struct PtqhMetric *metric);

/**
 * Factors a complex symmetric unitary as `U = V V^T` with `V` unitary.
 */
enum PtqhStatus ptqh_takagi(const struct PtqhMatrix *u, double tol_rel, struct PtqhMatrix **out_v);

/**
 * Principal square root of a Hermitian positive-definite matrix.
 */
enum PtqhStatus ptqh_sqrt_pd(const struct PtqhMatrix *a, double tol_rel, struct PtqhMatrix **out);

/**
 * Certifies that the K-symmetric projector theory admits exactly one state,
 * refuting `trials` perturbed candidates. `out_unique` receives the
 * verdict; `out_refuted` (optional) the number of explicit refutations.
 */
enum PtqhStatus ptqh_certify_unique(const struct PtqhSymmetry *symmetry,
                                    uintptr_t trials,
                                    uint64_t seed,
                                    double tol_rel,
                                    bool *out_unique,
                                    uintptr_t *out_refuted);

/**
 * Affine dimension of the K-symmetric projector theory's state space,
 * probed with `samples` sampled effects (0 selects `64 * dim^2`).
 */
enum PtqhStatus ptqh_projector_state_space(const struct PtqhSymmetry *symmetry,
                                           uintptr_t samples,
                                           uint64_t seed,
                                           double tol_rel,
                                           uintptr_t *out_dimension,
                                           bool *out_unique);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PTQH_H */

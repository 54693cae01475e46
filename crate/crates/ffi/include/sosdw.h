#ifndef SOSDW_H
#define SOSDW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum SosdwStatus {
  SOSDW_STATUS_OK = 0,
  SOSDW_STATUS_NULL_POINTER = 1,
  SOSDW_STATUS_EMPTY_LATTICE = 2,
  SOSDW_STATUS_SINGULAR_THETA = 3,
  SOSDW_STATUS_DEGENERATE_CROSSING = 4,
  SOSDW_STATUS_COINCIDENT_SPECTRAL = 5,
  SOSDW_STATUS_COINCIDENT_INHOMOGENEITY = 6,
  SOSDW_STATUS_BAD_LENGTH = 7,
  SOSDW_STATUS_TOO_LARGE = 8,
  SOSDW_STATUS_INVALID_QUARTET = 9,
  SOSDW_STATUS_INVALID_BOUNDARY = 10,
  SOSDW_STATUS_SINGULAR_K_FACTOR = 11,
  SOSDW_STATUS_POLE_HIT = 12,
  SOSDW_STATUS_CONTOUR_INVALID = 13,
  SOSDW_STATUS_NO_CONVERGENCE = 14,
  SOSDW_STATUS_NO_POLYNOMIAL_FIT = 15,
  SOSDW_STATUS_INVALID_ARGUMENT = 16,
  SOSDW_STATUS_PANIC = 17,
} SosdwStatus;

typedef enum SosdwRoute {
  SOSDW_ROUTE_FACE = 0,
  SOSDW_ROUTE_ALGEBRA = 1,
  SOSDW_ROUTE_PERMUTATION = 2,
  SOSDW_ROUTE_RESIDUE = 3,
  SOSDW_ROUTE_QUADRATURE = 4,
} SosdwRoute;

/**
 * Opaque model handle: γ, θ and the inhomogeneities.
 */
typedef struct SosdwModel SosdwModel;

/**
 * Complex number with the layout of C99 `double _Complex`.
 */
typedef struct SosdwComplex {
  double re;
  double im;
} SosdwComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a model with `size` inhomogeneities. On success `*out` owns
 * the handle.
 */
enum SosdwStatus sosdw_model_new(struct SosdwComplex gamma,
                                 struct SosdwComplex theta,
                                 const struct SosdwComplex *mu,
                                 size_t size,
                                 struct SosdwModel **out);

/**
 * Releases a handle from [`sosdw_model_new`]. Null is ignored.
 */
void sosdw_model_free(struct SosdwModel *model);

/**
 * Lattice size L, or 0 for a null handle.
 */
size_t sosdw_model_size(const struct SosdwModel *model);

/**
 * Z at `lambda[0..len]` (len = L) by the chosen route.
 */
enum SosdwStatus sosdw_partition(const struct SosdwModel *model,
                                 enum SosdwRoute route,
                                 const struct SosdwComplex *lambda,
                                 size_t len,
                                 struct SosdwComplex *out);

/**
 * Contour quadrature with node doubling; `out_nodes` (optional) receives
 * the final node count.
 */
enum SosdwStatus sosdw_partition_quadrature(const struct SosdwModel *model,
                                            const struct SosdwComplex *lambda,
                                            size_t len,
                                            struct SosdwComplex *out,
                                            size_t *out_nodes);

/**
 * Relative residual of the functional equation at `lambda[0..len]`
 * (len = L + 2), with Z from the permutation sum.
 */
enum SosdwStatus sosdw_functional_residual(const struct SosdwModel *model,
                                           const struct SosdwComplex *lambda,
                                           size_t len,
                                           double *out);

/**
 * Leading coefficient of Z in the limit of large spectral arguments.
 */
enum SosdwStatus sosdw_asymptotic_coefficient(const struct SosdwModel *model,
                                              struct SosdwComplex *out);

/**
 * Static description of a status code.
 */
const char *sosdw_status_message(enum SosdwStatus status);

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next call into this library on the same thread.
 */
const char *sosdw_last_error(void);

const char *sosdw_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOSDW_H */

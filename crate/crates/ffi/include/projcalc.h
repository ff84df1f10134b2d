#ifndef PROJCALC_H
#define PROJCALC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PcCoderivKind {
  PC_CODERIV_KIND_SINGLETON = 0,
  PC_CODERIV_KIND_EMPTY = 1,
  PC_CODERIV_KIND_THETA_MEMBERSHIP = 2,
  PC_CODERIV_KIND_ORDER_INTERVAL = 3,
} PcCoderivKind;

typedef enum PcStatus {
  PC_STATUS_OK = 0,
  PC_STATUS_NULL_POINTER = 1,
  PC_STATUS_INVALID_ARGUMENT = 2,
  PC_STATUS_DIMENSION_MISMATCH = 3,
  PC_STATUS_UNSUPPORTED = 4,
  PC_STATUS_NO_DERIVATIVE = 5,
  PC_STATUS_NOT_FOUND = 6,
  PC_STATUS_INTERNAL = 7,
} PcStatus;

typedef enum PcVerdict {
  PC_VERDICT_NOT_APPLICABLE = 0,
  PC_VERDICT_MEMBER = 1,
  PC_VERDICT_NOT_MEMBER = 2,
  PC_VERDICT_UNDETERMINED = 3,
} PcVerdict;

/**
 * A closed convex set.
 */
typedef struct PcSet PcSet;

/**
 * A weighted ℓ_p space.
 */
typedef struct PcSpace PcSpace;

/**
 * Shape of a coderivative answer. The vectors go to the caller's buffers.
 */
typedef struct PcCoderiv {
  enum PcCoderivKind kind;
  /**
   * Set only for `ThetaMembership`.
   */
  enum PcVerdict verdict;
} PcCoderiv;

typedef struct PcOracleResult {
  bool rejected;
  bool supports_membership;
  /**
   * Largest quotient at the smallest radius.
   */
  double final_max;
  /**
   * Quotient at the witness point, NaN when not rejected.
   */
  double witness_quotient;
} PcOracleResult;

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *pc_last_error(void);

/**
 * Creates a space of dimension `n`. `weights` may be null for unit weights,
 * otherwise it must hold `n` values.
 *
 * # Safety
 * `weights` must be null or point to `n` doubles; `out` must be writable.
 */
enum PcStatus pc_space_new(size_t n, double p, const double *weights, struct PcSpace **out);

/**
 * # Safety
 * `space` must be null or a handle from [`pc_space_new`] not yet freed.
 */
void pc_space_free(struct PcSpace *space);

/**
 * Dimension of the space, 0 for a null handle.
 *
 * # Safety
 * `space` must be null or a live handle.
 */
size_t pc_space_dim(const struct PcSpace *space);

/**
 * # Safety
 * `out` must be writable.
 */
enum PcStatus pc_set_ball(double r, struct PcSet **out);

/**
 * Cylinder of radius `r` over the zero-based coordinates in `mask`.
 *
 * # Safety
 * `mask` must point to `count` indices; `out` must be writable.
 */
enum PcStatus pc_set_cylinder(double r,
                              size_t n,
                              const size_t *mask,
                              size_t count,
                              struct PcSet **out);

/**
 * Subspace of vectors supported on the zero-based coordinates in `mask`.
 *
 * # Safety
 * `mask` must point to `count` indices; `out` must be writable.
 */
enum PcStatus pc_set_subspace(size_t n, const size_t *mask, size_t count, struct PcSet **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum PcStatus pc_set_positive_cone(struct PcSet **out);

/**
 * # Safety
 * `set` must be null or a live handle.
 */
void pc_set_free(struct PcSet *set);

/**
 * # Safety
 * `x` must point to `len` doubles; `out` must be writable.
 */
enum PcStatus pc_norm(const struct PcSpace *space, const double *x, size_t len, double *out);

/**
 * # Safety
 * `x` must point to `len` doubles; `out` must be writable.
 */
enum PcStatus pc_dual_norm(const struct PcSpace *space, const double *x, size_t len, double *out);

/**
 * Normalized duality map `J(x)`.
 *
 * # Safety
 * `x` and `out` must each hold `len` doubles.
 */
enum PcStatus pc_duality_map(const struct PcSpace *space, const double *x, size_t len, double *out);

/**
 * Inverse duality map `J*(x*)`.
 *
 * # Safety
 * `xs` and `out` must each hold `len` doubles.
 */
enum PcStatus pc_duality_map_inv(const struct PcSpace *space,
                                 const double *xs,
                                 size_t len,
                                 double *out);

/**
 * Metric projection of `x` onto `set`.
 *
 * # Safety
 * `x` and `out` must each hold `len` doubles.
 */
enum PcStatus pc_project(const struct PcSpace *space,
                         const struct PcSet *set,
                         const double *x,
                         size_t len,
                         double *out);

/**
 * Fréchet derivative of the projection at `xbar` applied to `v`. Fails
 * with `NO_DERIVATIVE` on the boundary.
 *
 * # Safety
 * `xbar`, `v` and `out` must each hold `len` doubles.
 */
enum PcStatus pc_frechet_apply(const struct PcSpace *space,
                               const struct PcSet *set,
                               const double *xbar,
                               const double *v,
                               size_t len,
                               double *out);

/**
 * Closed-form coderivative at `xbar` for the query `ys`. A singleton is
 * written to `out_a`; an order interval writes its bounds to `out_a` and
 * `out_b`. Either buffer may be null to skip the copy.
 *
 * # Safety
 * `xbar` and `ys` must hold `len` doubles; non-null `out_a` and `out_b`
 * must hold `len` doubles; `out` must be writable.
 */
enum PcStatus pc_coderivative(const struct PcSpace *space,
                              const struct PcSet *set,
                              const double *xbar,
                              const double *ys,
                              size_t len,
                              struct PcCoderiv *out,
                              double *out_a,
                              double *out_b);

/**
 * Samples whether `xs` lies in the coderivative fiber over `ys` at `xbar`
 * with the default oracle configuration and the given seed. When rejected
 * and `witness` is non-null, the witness point is written there.
 *
 * # Safety
 * `xbar`, `xs` and `ys` must hold `len` doubles; non-null `witness` must
 * hold `len` doubles; `out` must be writable.
 */
enum PcStatus pc_oracle_test(const struct PcSpace *space,
                             const struct PcSet *set,
                             const double *xbar,
                             const double *xs,
                             const double *ys,
                             size_t len,
                             uint64_t seed,
                             struct PcOracleResult *out,
                             double *witness);

/**
 * Runs a verification suite described by a JSON suite configuration and
 * returns the JSON report in `out_json`, to be released with
 * [`pc_string_free`]. `out_success` is set when no case failed.
 *
 * # Safety
 * `spec_json` must be a nul-terminated string; the out pointers must be
 * writable.
 */
enum PcStatus pc_run_suite(const char *spec_json, char **out_json, bool *out_success);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void pc_string_free(char *s);

#endif  /* PROJCALC_H */

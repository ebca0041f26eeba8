#ifndef BELLSIM_H
#define BELLSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BellsimStatus {
  BELLSIM_STATUS_OK = 0,
  BELLSIM_STATUS_NULL_POINTER = 1,
  BELLSIM_STATUS_INVALID_ARGUMENT = 2,
  BELLSIM_STATUS_NOT_NORMALIZED = 3,
  BELLSIM_STATUS_UNDEFINED_ESTIMATE = 4,
  BELLSIM_STATUS_INCONSISTENT_COUNTS = 5,
  BELLSIM_STATUS_INDEX_OUT_OF_RANGE = 6,
  BELLSIM_STATUS_PANIC = 7,
} BellsimStatus;

typedef enum BellsimModel {
  BELLSIM_MODEL_LOCAL = 0,
  BELLSIM_MODEL_COLLAPSE = 1,
} BellsimModel;

/**
 * Opaque trial run with its per-trial records.
 */
typedef struct BellsimRun BellsimRun;

/**
 * Opaque two-qubit state.
 */
typedef struct BellsimState BellsimState;

/**
 * Measurement axis: polar angle in [0, pi], azimuth in radians.
 */
typedef struct BellsimAxis {
  double polar;
  double azimuth;
} BellsimAxis;

/**
 * Count table in the same layout as the JSON count file.
 */
typedef struct BellsimCounts {
  uint64_t n_trials;
  uint64_t n_a_plus;
  uint64_t n_a_minus;
  uint64_t n_b_plus;
  uint64_t n_b_minus;
  uint64_t c_pp;
  uint64_t c_pm;
  uint64_t c_mp;
  uint64_t c_mm;
} BellsimCounts;

typedef struct BellsimEstimate {
  double value;
  double std_error;
} BellsimEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *bellsim_version(void);

/**
 * Static description of a status code.
 */
const char *bellsim_status_message(enum BellsimStatus status);

/**
 * Message for the last failing call on this thread; empty after a
 * successful call. Valid until the next call on the same thread.
 */
const char *bellsim_last_error_message(void);

/**
 * Builds an axis from degrees, validating and canonicalizing it.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum BellsimStatus bellsim_axis_from_degrees(double polar_deg,
                                             double azimuth_deg,
                                             struct BellsimAxis *out);

/**
 * Creates the singlet state.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum BellsimStatus bellsim_state_singlet(struct BellsimState **out);

/**
 * Creates the product state `|sign_a z>|sign_b z>`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum BellsimStatus bellsim_state_product_z(int8_t sign_a, int8_t sign_b, struct BellsimState **out);

/**
 * Creates a state from four amplitudes in the order ++, +-, -+, --.
 * The amplitudes must be normalized to within 1e-12.
 *
 * # Safety
 * `re` and `im` must each point to four readable doubles; `out` must be
 * null or valid for writes.
 */
enum BellsimStatus bellsim_state_from_amplitudes(const double *re,
                                                 const double *im,
                                                 struct BellsimState **out);

/**
 * Releases a state. Null is ignored.
 *
 * # Safety
 * `state` must be null or a handle from a `bellsim_state_*` constructor
 * that has not been freed.
 */
void bellsim_state_free(struct BellsimState *state);

/**
 * Joint outcome probabilities in the order ++, +-, -+, --.
 *
 * # Safety
 * Pointers must be null or valid; `out` must have room for four doubles.
 */
enum BellsimStatus bellsim_joint_probabilities(const struct BellsimState *state,
                                               const struct BellsimAxis *axis_a,
                                               const struct BellsimAxis *axis_b,
                                               double *out);

/**
 * Expectation of the product of the two spin outcomes.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum BellsimStatus bellsim_joint_expectation(const struct BellsimState *state,
                                             const struct BellsimAxis *axis_a,
                                             const struct BellsimAxis *axis_b,
                                             double *out);

/**
 * `|E12 - E13| - E23` for three axes.
 *
 * # Safety
 * `axes` must point to three readable axes; other pointers null or valid.
 */
enum BellsimStatus bellsim_bell_quantity(const struct BellsimState *state,
                                         const struct BellsimAxis *axes,
                                         double *out);

/**
 * Total variation distance between the two models' joint distributions.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum BellsimStatus bellsim_model_total_variation(const struct BellsimState *state,
                                                 const struct BellsimAxis *axis_a,
                                                 const struct BellsimAxis *axis_b,
                                                 double *out);

/**
 * Runs `n_trials` seeded trials. The result matches the CLI `simulate`
 * command for the same seed, model, state and axes.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum BellsimStatus bellsim_run_new(const struct BellsimState *state,
                                   uint64_t seed,
                                   uint64_t n_trials,
                                   enum BellsimModel model,
                                   const struct BellsimAxis *axis_a,
                                   const struct BellsimAxis *axis_b,
                                   struct BellsimRun **out);

/**
 * Count table of a run.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum BellsimStatus bellsim_run_counts(const struct BellsimRun *run, struct BellsimCounts *out);

/**
 * Number of trials in a run; 0 for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle.
 */
uint64_t bellsim_run_trial_count(const struct BellsimRun *run);

/**
 * Outcome signs of trial `index`.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum BellsimStatus bellsim_run_trial(const struct BellsimRun *run,
                                     uint64_t index,
                                     int8_t *out_sign_a,
                                     int8_t *out_sign_b);

/**
 * Releases a run. Null is ignored.
 *
 * # Safety
 * `run` must be null or a handle from [`bellsim_run_new`] that has not been
 * freed.
 */
void bellsim_run_free(struct BellsimRun *run);

/**
 * `C(s_a, s_b) / sqrt(N_a(s_a) N_b(s_b))` with its standard error.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum BellsimStatus bellsim_coincidence_estimate(const struct BellsimCounts *counts,
                                                int8_t sign_a,
                                                int8_t sign_b,
                                                struct BellsimEstimate *out);

/**
 * Replica local expectation with its standard error; `out_agrees` (may be
 * null) receives 1 when it matches minus the direct correlation mean.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum BellsimStatus bellsim_replica_expectation(const struct BellsimCounts *counts,
                                               struct BellsimEstimate *out,
                                               int32_t *out_agrees);

/**
 * Fringe visibility of a signal photon with slit amplitudes `u` and `l`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum BellsimStatus bellsim_visibility(double u_re,
                                      double u_im,
                                      double l_re,
                                      double l_im,
                                      double *out);

/**
 * Upper bound on visibility for which-path information `d` in [0, 1].
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum BellsimStatus bellsim_visibility_bound(double d, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BELLSIM_H */

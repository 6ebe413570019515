#ifndef ADIAPROJ_H
#define ADIAPROJ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AdiaModelKind {
  ADIA_MODEL_KIND_DHO = 0,
  ADIA_MODEL_KIND_AHO = 1,
  ADIA_MODEL_KIND_PSM = 2,
} AdiaModelKind;

typedef enum AdiaObservableKind {
  ADIA_OBSERVABLE_KIND_NONE = 0,
  ADIA_OBSERVABLE_KIND_X = 1,
  ADIA_OBSERVABLE_KIND_X_SQUARED = 2,
  ADIA_OBSERVABLE_KIND_PROJECTOR = 3,
} AdiaObservableKind;

typedef enum AdiaSeries {
  ADIA_SERIES_TIMES = 0,
  ADIA_SERIES_ENERGIES = 1,
  ADIA_SERIES_F_VALUES = 2,
  ADIA_SERIES_NORMS = 3,
} AdiaSeries;

/**
 * Result code of every fallible call.
 */
typedef enum AdiaStatus {
  ADIA_STATUS_OK = 0,
  ADIA_STATUS_INVALID_ARGUMENT = 1,
  ADIA_STATUS_NULL_POINTER = 2,
  ADIA_STATUS_DIMENSION_MISMATCH = 3,
  ADIA_STATUS_UNSTABLE = 4,
  ADIA_STATUS_NON_FINITE = 5,
  ADIA_STATUS_NON_ADIABATIC = 6,
  ADIA_STATUS_NON_STATIONARY = 7,
  ADIA_STATUS_NUMERICAL = 8,
  ADIA_STATUS_PANIC = 9,
} AdiaStatus;

/**
 * Opaque model handle.
 */
typedef struct AdiaModel AdiaModel;

/**
 * Opaque trajectory handle.
 */
typedef struct AdiaTrace AdiaTrace;

/**
 * Switching function. `linear != 0` selects a linear ramp and ignores the
 * tanh parameters.
 */
typedef struct AdiaSchedule {
  double run_time;
  double steepness;
  double midpoint_fraction;
  int32_t linear;
} AdiaSchedule;

typedef struct AdiaEvolution {
  double dt;
  size_t sample_stride;
  bool record_amplitudes;
} AdiaEvolution;

typedef struct AdiaTraceSummary {
  size_t samples;
  size_t steps;
  double dt;
  double final_energy;
  double final_energy_variance;
  double max_norm_drift;
  bool adiabatic;
  bool norm_compliant;
} AdiaTraceSummary;

typedef struct AdiaEnergyEstimate {
  double magnitude;
  double e_c;
  double inferred_energy;
  double resolution;
  bool wrapped;
  bool low_resolution;
} AdiaEnergyEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *adia_version(void);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `cap`). Returns the length needed including the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `cap` bytes.
 */
size_t adia_last_error_message(char *buf, size_t cap);

/**
 * Defaults: tanh ramp, steepness 20, midpoint 0.5, the model's run time.
 */
struct AdiaSchedule adia_schedule_default(enum AdiaModelKind kind);

struct AdiaEvolution adia_evolution_default(enum AdiaModelKind kind);

/**
 * Creates a model. `spacing` is used by the scattering model only.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum AdiaStatus adia_model_new(enum AdiaModelKind kind,
                               uint32_t qubits,
                               double coupling,
                               double spacing,
                               double e_c,
                               struct AdiaModel **out);

/**
 * # Safety
 * `model` must be null or a handle from [`adia_model_new`] not yet freed.
 */
void adia_model_free(struct AdiaModel *model);

/**
 * Adds `alpha * O` to the switched part; `AdiaObservableKind::None` removes it.
 *
 * # Safety
 * `model` must be a live handle.
 */
enum AdiaStatus adia_model_set_observable(struct AdiaModel *model,
                                          enum AdiaObservableKind kind,
                                          uint32_t level,
                                          double alpha);

/**
 * Basis dimension `2^N`, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t adia_model_dim(const struct AdiaModel *model);

/**
 * Integrates from the basis state `|start_level>` to the end of the schedule.
 *
 * # Safety
 * All pointers must be valid; `out` receives a handle to free with
 * [`adia_trace_free`].
 */
enum AdiaStatus adia_propagate(const struct AdiaModel *model,
                               const struct AdiaSchedule *schedule,
                               const struct AdiaEvolution *evolution,
                               uint32_t start_level,
                               struct AdiaTrace **out);

/**
 * # Safety
 * `trace` must be null or a handle from [`adia_propagate`] not yet freed.
 */
void adia_trace_free(struct AdiaTrace *trace);

/**
 * Number of recorded samples, or 0 for a null handle.
 *
 * # Safety
 * `trace` must be null or a live handle.
 */
size_t adia_trace_len(const struct AdiaTrace *trace);

/**
 * # Safety
 * `trace` and `out` must be valid.
 */
enum AdiaStatus adia_trace_summary(const struct AdiaTrace *trace, struct AdiaTraceSummary *out);

/**
 * Copies one sampled series into `buf`, which must hold
 * [`adia_trace_len`] values.
 *
 * # Safety
 * `trace` must be live and `buf` valid for `cap` doubles.
 */
enum AdiaStatus adia_trace_series(const struct AdiaTrace *trace,
                                  enum AdiaSeries which,
                                  double *buf,
                                  size_t cap);

/**
 * `|a_n|^2` of the final state; `buf` must hold the model dimension.
 *
 * # Safety
 * `trace` must be live and `buf` valid for `cap` doubles.
 */
enum AdiaStatus adia_trace_final_probabilities(const struct AdiaTrace *trace,
                                               double *buf,
                                               size_t cap);

/**
 * `<H0 + H1 + alpha O>` in the final state, without the offset.
 *
 * # Safety
 * All pointers must be valid.
 */
enum AdiaStatus adia_rayleigh_energy(const struct AdiaModel *model,
                                     const struct AdiaTrace *trace,
                                     double *out);

/**
 * Phase-estimation readout of the trace's final state.
 *
 * # Safety
 * All pointers must be valid.
 */
enum AdiaStatus adia_measure_energy(const struct AdiaModel *model,
                                    const struct AdiaTrace *trace,
                                    double window,
                                    double dt,
                                    struct AdiaEnergyEstimate *out);

/**
 * Hellmann-Feynman expectation of an observable in the adiabatic
 * continuation of `|level>`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum AdiaStatus adia_hf_expectation(const struct AdiaModel *model,
                                    enum AdiaObservableKind observable,
                                    uint32_t projector_level,
                                    double alpha_step,
                                    const struct AdiaSchedule *schedule,
                                    const struct AdiaEvolution *evolution,
                                    uint32_t level,
                                    double *out);

/**
 * Lowest eigenvalue of the final Hamiltonian minus the offset, by dense
 * diagonalization.
 *
 * # Safety
 * All pointers must be valid.
 */
enum AdiaStatus adia_oracle_ground_energy(const struct AdiaModel *model, double *out);

/**
 * Pointer to a static description of `status`.
 */
const char *adia_status_name(enum AdiaStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ADIAPROJ_H */

#ifndef BEAMSHARE_H
#define BEAMSHARE_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Scheme codes in [`BeamshareSlot::scheme`].
 */
#define BEAMSHARE_SCHEME_OFF -1

#define BEAMSHARE_SCHEME_OMNI 0

#define BEAMSHARE_SCHEME_MRT 1

#define BEAMSHARE_SCHEME_ZF 2

typedef enum BeamshareStatus {
  BEAMSHARE_STATUS_OK = 0,
  BEAMSHARE_STATUS_NULL_POINTER = 1,
  BEAMSHARE_STATUS_INVALID_UTF8 = 2,
  BEAMSHARE_STATUS_CONFIG = 3,
  BEAMSHARE_STATUS_INVALID_ARGUMENT = 4,
  BEAMSHARE_STATUS_NUMERICS = 5,
  BEAMSHARE_STATUS_SIMULATION = 6,
  BEAMSHARE_STATUS_UNDEFINED = 7,
  BEAMSHARE_STATUS_PANIC = 8,
} BeamshareStatus;

/**
 * Opaque simulation handle.
 */
typedef struct BeamshareSim BeamshareSim;

/**
 * One slot's outcome. Absent quantities are NaN.
 */
typedef struct BeamshareSlot {
  uint64_t slot_index;
  int32_t scheme;
  uint32_t antennas;
  double kpi;
  bool primary_transmitted;
  double sinr_primary;
  double leakage_mw;
  uint32_t delivered_primary;
  uint32_t delivered_secondary;
} BeamshareSlot;

/**
 * Run totals so far. `jain` is NaN while undefined.
 */
typedef struct BeamshareMetrics {
  uint64_t slots;
  double primary_throughput;
  double secondary_throughput;
  double aggregate_throughput;
  double jain;
  double mean_leakage_mw;
  uint64_t primary_transmissions;
} BeamshareMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *beamshare_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *beamshare_version(void);

/**
 * Creates a simulation from TOML scenario text (may be empty for the
 * default preset) and a seed. On success `*out` owns a new handle.
 *
 * # Safety
 * `config_toml` must be a NUL-terminated string; `out` must be writable.
 */
enum BeamshareStatus beamshare_sim_new(const char *config_toml,
                                       uint64_t seed,
                                       struct BeamshareSim **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `sim` must come from [`beamshare_sim_new`] and not be used afterwards.
 */
void beamshare_sim_free(struct BeamshareSim *sim);

/**
 * Advances one slot; `out` may be NULL when the slot record is not needed.
 *
 * # Safety
 * `sim` must be a live handle; `out`, if non-null, must be writable.
 */
enum BeamshareStatus beamshare_sim_step(struct BeamshareSim *sim, struct BeamshareSlot *out);

/**
 * Advances `slots` slots.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum BeamshareStatus beamshare_sim_run(struct BeamshareSim *sim, uint64_t slots);

/**
 * Metrics over the slots run so far.
 *
 * # Safety
 * `sim` must be a live handle; `out` must be writable.
 */
enum BeamshareStatus beamshare_sim_metrics(struct BeamshareSim *sim, struct BeamshareMetrics *out);

/**
 * Expected MRT SINR at unit noise power.
 *
 * # Safety
 * `out` must be writable.
 */
enum BeamshareStatus beamshare_expected_sinr_mrt(double p_s, size_t n_t, size_t s_s, double *out);

/**
 * Expected ZF SINR at unit noise power.
 *
 * # Safety
 * `out` must be writable.
 */
enum BeamshareStatus beamshare_expected_sinr_zf(double p_s,
                                                size_t n_t,
                                                size_t s_s,
                                                size_t k_r,
                                                double *out);

/**
 * Jain's fairness index of `len` throughputs.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
enum BeamshareStatus beamshare_jain_index(const double *values, size_t len, double *out);

/**
 * Linear large-scale power gain at distance `d` meters.
 *
 * # Safety
 * `out` must be writable.
 */
enum BeamshareStatus beamshare_path_gain(double exponent,
                                         double reference_loss_db,
                                         double reference_distance_m,
                                         double d,
                                         double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BEAMSHARE_H */

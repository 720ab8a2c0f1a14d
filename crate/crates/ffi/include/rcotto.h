#ifndef RCOTTO_H
#define RCOTTO_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. The first four match the command-line exit codes.
 */
typedef enum RcOttoStatus {
  RC_OTTO_STATUS_OK = 0,
  RC_OTTO_STATUS_CONFIG_ERROR = 1,
  RC_OTTO_STATUS_NUMERICAL_ERROR = 2,
  /**
   * The result was written but the Fock truncation check failed.
   */
  RC_OTTO_STATUS_UNCONVERGED = 3,
  RC_OTTO_STATUS_NULL_POINTER = 4,
  RC_OTTO_STATUS_PANIC = 5,
} RcOttoStatus;

typedef enum RcOttoCoupling {
  RC_OTTO_COUPLING_WEAK = 0,
  RC_OTTO_COUPLING_RC_STRONG = 1,
} RcOttoCoupling;

typedef enum RcOttoStroke {
  RC_OTTO_STROKE_ADIABATIC = 0,
  RC_OTTO_STROKE_SUDDEN = 1,
} RcOttoStroke;

typedef enum RcOttoDecoupling {
  RC_OTTO_DECOUPLING_INSTANTANEOUS = 0,
  RC_OTTO_DECOUPLING_ADIABATIC = 1,
} RcOttoDecoupling;

typedef enum RcOttoMode {
  RC_OTTO_MODE_ENGINE = 0,
  RC_OTTO_MODE_REFRIGERATOR = 1,
  RC_OTTO_MODE_NEITHER = 2,
} RcOttoMode;

/**
 * Opaque configuration handle.
 */
typedef struct RcOttoConfig RcOttoConfig;

/**
 * Plain-data description of a cycle. One alpha and omega_c serve both
 * reservoirs.
 */
typedef struct RcOttoParams {
  double epsilon_h;
  double epsilon_c;
  double delta_h;
  double delta_c;
  double beta_h;
  double beta_c;
  double alpha;
  double omega_c;
  uint32_t n;
  enum RcOttoCoupling coupling_model;
  enum RcOttoStroke stroke_mode;
  enum RcOttoDecoupling decoupling_mode;
} RcOttoParams;

typedef struct RcOttoCycleResult {
  double w_out;
  double q_hot;
  double q_cold;
  double w_dec_h;
  double w_dec_c;
  double q_dec_h;
  double q_dec_c;
  /**
   * NaN when no heat enters from the hot side.
   */
  double eta;
  enum RcOttoMode mode;
  bool converged;
} RcOttoCycleResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Fills `out` with defaults: n = 30, strong coupling, adiabatic strokes,
 * instantaneous decoupling, and zero for every physical parameter.
 *
 * # Safety
 * `out` must be null or point to writable storage for one `RcOttoParams`.
 */
enum RcOttoStatus rcotto_params_default(struct RcOttoParams *out);

/**
 * Validates `params` and stores a new handle in `*out`.
 *
 * # Safety
 * `params` must be null or point to a valid `RcOttoParams`; `out` must be
 * null or point to writable storage for one pointer.
 */
enum RcOttoStatus rcotto_config_new(const struct RcOttoParams *params, struct RcOttoConfig **out);

/**
 * Parses a `key = value` config file and stores a new handle in `*out`.
 *
 * # Safety
 * `path` must be null or a NUL-terminated string; `out` must be null or
 * point to writable storage for one pointer.
 */
enum RcOttoStatus rcotto_config_from_file(const char *path, struct RcOttoConfig **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `config` must be null or a handle from this library not yet freed.
 */
void rcotto_config_free(struct RcOttoConfig *config);

/**
 * Evaluates the cycle. On `RC_OTTO_STATUS_OK` and `RC_OTTO_STATUS_UNCONVERGED`
 * the result is written to `*out`.
 *
 * # Safety
 * `config` must be null or a live handle; `out` must be null or point to
 * writable storage for one `RcOttoCycleResult`.
 */
enum RcOttoStatus rcotto_run_cycle(const struct RcOttoConfig *config,
                                   struct RcOttoCycleResult *out);

/**
 * Largest relative change of any cycle-point energy between the configured
 * truncation and five fewer Fock levels.
 *
 * # Safety
 * `config` must be null or a live handle; `out` must be null or point to a
 * writable `double`.
 */
enum RcOttoStatus rcotto_truncation_delta(const struct RcOttoConfig *config, double *out);

/**
 * Message for the last failure on this thread, or null. Valid until the
 * next call into this library from the same thread.
 */
const char *rcotto_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rcotto_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RCOTTO_H */

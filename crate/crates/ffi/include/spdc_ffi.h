#ifndef SPDC_FFI_H
#define SPDC_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpdcStatus {
  SPDC_STATUS_OK = 0,
  SPDC_STATUS_NULL_POINTER = 1,
  SPDC_STATUS_INVALID_ARGUMENT = 2,
  SPDC_STATUS_CONFIG = 3,
  SPDC_STATUS_PARSE = 4,
  SPDC_STATUS_OUT_OF_RANGE = 5,
  SPDC_STATUS_NO_PHASE_MATCHING = 6,
  SPDC_STATUS_NUMERICAL = 7,
  SPDC_STATUS_BUFFER_TOO_SMALL = 8,
  SPDC_STATUS_IO = 9,
  SPDC_STATUS_PANIC = 10,
} SpdcStatus;

/**
 * Opaque model: pump pulse and crystal.
 */
typedef struct SpdcModel SpdcModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *spdc_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *spdc_version(void);

/**
 * Model with the built-in default configuration.
 *
 * # Safety
 * `out` must be a valid pointer to write the handle to.
 */
enum SpdcStatus spdc_model_new_default(struct SpdcModel **out);

/**
 * Model from a TOML configuration string (same schema as the CLI).
 *
 * # Safety
 * `toml` must be a nul-terminated string, `out` a valid pointer.
 */
enum SpdcStatus spdc_model_from_config_str(const char *toml, struct SpdcModel **out);

/**
 * Releases a model. Null is accepted.
 *
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void spdc_model_free(struct SpdcModel *model);

/**
 * # Safety
 * `model` must be a live handle.
 */
enum SpdcStatus spdc_model_set_tau_fs(struct SpdcModel *model, double tau_fs);

/**
 * # Safety
 * `model` must be a live handle.
 */
enum SpdcStatus spdc_model_set_lambda0_nm(struct SpdcModel *model, double lambda0_nm);

/**
 * # Safety
 * `model` must be a live handle.
 */
enum SpdcStatus spdc_model_set_length_mm(struct SpdcModel *model, double length_mm);

/**
 * # Safety
 * `model` must be a live handle.
 */
enum SpdcStatus spdc_model_set_axis_angle_deg(struct SpdcModel *model, double degrees);

/**
 * # Safety
 * `model` must be a live handle, `out_degrees` a valid pointer.
 */
enum SpdcStatus spdc_model_axis_angle_deg(const struct SpdcModel *model, double *out_degrees);

/**
 * Degenerate phase-matching angle for the model's pump wavelength and
 * dispersion. Does not change the model.
 *
 * # Safety
 * `model` must be a live handle; output pointers valid.
 */
enum SpdcStatus spdc_phase_matching_angle(const struct SpdcModel *model,
                                          double *out_degrees,
                                          double *out_residual);

/**
 * Both phase mismatches (rad/µm) at the model's axis angle.
 *
 * # Safety
 * `model` must be a live handle; output pointers valid.
 */
enum SpdcStatus spdc_mismatch(const struct SpdcModel *model,
                              double lambda1_nm,
                              double lambda2_nm,
                              double *out_delta12,
                              double *out_delta21);

/**
 * Coincidence spectrum at fixed `lambda2_nm` over `start_nm..=stop_nm` in
 * steps of `step_nm`. Densities go to `out_density`; the `λ₁` abscissas
 * are those of the grid, `start_nm + i·step_nm`.
 *
 * # Safety
 * `model` must be a live handle; `out_density` must hold `capacity` values.
 */
enum SpdcStatus spdc_conditional_spectrum(const struct SpdcModel *model,
                                          double lambda2_nm,
                                          double start_nm,
                                          double stop_nm,
                                          double step_nm,
                                          bool unit_max,
                                          double *out_density,
                                          size_t capacity,
                                          size_t *out_len);

/**
 * Joint density on a square `points × points` grid over
 * `start_nm..=stop_nm`, row-major with rows indexed by `λ₁`.
 *
 * # Safety
 * `model` must be a live handle; `out_values` must hold `capacity` values.
 */
enum SpdcStatus spdc_joint_map(const struct SpdcModel *model,
                               double start_nm,
                               double stop_nm,
                               size_t points,
                               bool unit_max,
                               double *out_values,
                               size_t capacity,
                               size_t *out_len);

/**
 * Number of peaks of the unit-max spectrum at `lambda2_nm` on the grid
 * `start_nm..=stop_nm` (step `step_nm`) with prominence at least
 * `min_prominence` times the maximum.
 *
 * # Safety
 * `model` must be a live handle; `out_count` a valid pointer.
 */
enum SpdcStatus spdc_count_peaks(const struct SpdcModel *model,
                                 double lambda2_nm,
                                 double start_nm,
                                 double stop_nm,
                                 double step_nm,
                                 double min_prominence,
                                 size_t *out_count);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SPDC_FFI_H */

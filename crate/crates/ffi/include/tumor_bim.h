#ifndef TUMOR_BIM_H
#define TUMOR_BIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum TbStatus {
  TB_STATUS_OK = 0,
  TB_STATUS_NULL_POINTER = 1,
  TB_STATUS_INVALID_ARGUMENT = 2,
  // Configuration could not be read or is invalid.
  TB_STATUS_CONFIG = 4,
  // Checkpoint is corrupted, of another version, or does not match.
  TB_STATUS_CHECKPOINT = 5,
  // The numerical method failed.
  TB_STATUS_NUMERICAL = 6,
  TB_STATUS_IO = 7,
  // The output buffer is too small; nothing was written.
  TB_STATUS_BUFFER_TOO_SMALL = 8,
  TB_STATUS_PANIC = 9,
} TbStatus;

// How a run ended.
typedef enum TbRunStatus {
  TB_RUN_STATUS_COMPLETED = 0,
  TB_RUN_STATUS_NEAR_TOUCH = 2,
  TB_RUN_STATUS_SOLVER_FAILURE = 3,
  TB_RUN_STATUS_PAUSED = 10,
} TbRunStatus;

// Opaque simulation handle.
typedef struct TbSimulation TbSimulation;

// Diagnostics of the most recently recorded state.
typedef struct TbRunRow {
  uint64_t step;
  double time;
  double area;
  double r_eff;
  double delta_over_r;
  uint64_t gmres_nutrient;
  uint64_t gmres_pressure;
  double min_gap;
  double max_speed;
} TbRunRow;

// Dimensionless model parameters.
typedef struct TbParams {
  double proliferation;
  double apoptosis;
  double chi;
  double beta;
  double sigma_n;
  double ginv;
} TbParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copy the last error message of this thread into `buf` as a NUL-terminated
// string, truncating if needed. Returns the full message length in bytes
// (without the terminator); pass a null `buf` to query it.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t tb_last_error_message(char *buf, size_t len);

// Create a simulation from configuration text.
//
// # Safety
// `config_toml` must be a NUL-terminated string; `out` must be writable.
enum TbStatus tb_simulation_new(const char *config_toml, struct TbSimulation **out);

// Create a simulation from a configuration file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum TbStatus tb_simulation_load(const char *path, struct TbSimulation **out);

// Continue a simulation from a checkpoint file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum TbStatus tb_simulation_resume(const char *path, struct TbSimulation **out);

// Write a checkpoint of the current state.
//
// # Safety
// `sim` must be a live handle and `path` a NUL-terminated string.
enum TbStatus tb_simulation_save_checkpoint(const struct TbSimulation *sim, const char *path);

// Release a handle. Null is ignored.
//
// # Safety
// `sim` must be null or a handle not yet freed.
void tb_simulation_free(struct TbSimulation *sim);

// March until step `stop` or the end of the run.
//
// # Safety
// `sim` must be a live handle; `status` must be writable.
enum TbStatus tb_simulation_run_until(struct TbSimulation *sim,
                                      uint64_t stop,
                                      enum TbRunStatus *status);

// Run to the configured final time, writing any configured output files.
//
// # Safety
// `sim` must be a live handle; `status` must be writable.
enum TbStatus tb_simulation_run(struct TbSimulation *sim, enum TbRunStatus *status);

// Steps taken and current time.
//
// # Safety
// `sim` must be a live handle; `steps` and `time` must be writable.
enum TbStatus tb_simulation_progress(const struct TbSimulation *sim, uint64_t *steps, double *time);

// Number of interface markers.
//
// # Safety
// `sim` must be a live handle; `n` must be writable.
enum TbStatus tb_simulation_marker_count(const struct TbSimulation *sim, size_t *n);

// Copy the interface node positions into `x` and `y`, each of length `len`
// (at least the marker count).
//
// # Safety
// `sim` must be a live handle; `x`, `y` must point to `len` writable doubles.
enum TbStatus tb_simulation_interface(const struct TbSimulation *sim,
                                      double *x,
                                      double *y,
                                      size_t len);

// Diagnostics of the last recorded state. Fails with `InvalidArgument`
// before the first evaluation.
//
// # Safety
// `sim` must be a live handle; `row` must be writable.
enum TbStatus tb_simulation_last_row(const struct TbSimulation *sim, struct TbRunRow *row);

// Modified Bessel function `I_n(x)`, `x >= 0`.
//
// # Safety
// `out` must be writable.
enum TbStatus tb_bessel_i(uint32_t n, double x, double *out);

// Modified Bessel function `K_n(x)`, `x > 0`.
//
// # Safety
// `out` must be writable.
enum TbStatus tb_bessel_k(uint32_t n, double x, double *out);

// Growth rate `dR/dt` of a circular tumor of radius `r` around a core `r0`.
//
// # Safety
// `params` must be readable; `out` must be writable.
enum TbStatus tb_linear_radius_rate(const struct TbParams *params,
                                    double r0,
                                    double r,
                                    double *out);

// Relative growth rate of the shape factor of mode `mode`.
//
// # Safety
// `params` must be readable; `out` must be writable.
enum TbStatus tb_linear_shape_rate(const struct TbParams *params,
                                   double r0,
                                   uint32_t mode,
                                   double r,
                                   double *out);

// Apoptosis value at which the mode-`mode` shape factor is stationary.
//
// # Safety
// `params` must be readable; `out` must be writable.
enum TbStatus tb_linear_critical_apoptosis(const struct TbParams *params,
                                           double r0,
                                           uint32_t mode,
                                           double r,
                                           double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TUMOR_BIM_H */

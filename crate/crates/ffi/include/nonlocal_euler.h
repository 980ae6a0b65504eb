#ifndef NONLOCAL_EULER_H
#define NONLOCAL_EULER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NeKernelFamily {
  NE_KERNEL_FAMILY_GAUSSIAN = 0,
  NE_KERNEL_FAMILY_LAPLACE = 1,
} NeKernelFamily;

typedef enum NeRhsPath {
  NE_RHS_PATH_DIRECT = 0,
  NE_RHS_PATH_CONVOLUTION = 1,
} NeRhsPath;

/**
 * Result code of every fallible call.
 */
typedef enum NeStatus {
  NE_STATUS_OK = 0,
  NE_STATUS_NULL_POINTER = 1,
  NE_STATUS_INVALID_ARGUMENT = 2,
  NE_STATUS_ODD_GRID_SIZE = 3,
  NE_STATUS_NON_DECAYING_KERNEL = 4,
  NE_STATUS_INDEX_OUT_OF_RANGE = 5,
  NE_STATUS_BUFFER_SIZE = 6,
  NE_STATUS_NON_FINITE = 7,
  NE_STATUS_PANIC = 8,
  NE_STATUS_INTERNAL = 9,
} NeStatus;

/**
 * Opaque periodized kernel.
 */
typedef struct NeKernel NeKernel;

/**
 * One hypothesis check: pass flag and the measured quantity.
 */
typedef struct NeCheck {
  bool pass;
  double measure;
} NeCheck;

typedef struct NeAssumptions {
  struct NeCheck nonneg;
  struct NeCheck symmetric;
  struct NeCheck unit_mass;
  struct NeCheck monotone_on_half;
  struct NeCheck nonneg_fourier;
  double grid_mass_residual;
  bool overall;
} NeAssumptions;

typedef struct NeCriticalTimestep {
  double max_gap;
  int64_t max_gap_mode;
  double dt_star_sharp;
  double dt_star_conservative;
} NeCriticalTimestep;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the next call.
 */
const char *ne_last_error_message(void);

/**
 * NUL-terminated library version.
 */
const char *ne_version(void);

/**
 * Periodize a closed-form kernel with parameter `c` onto an `n_points` grid.
 * `family` is one of [`NeKernelFamily`].
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum NeStatus ne_kernel_periodize(uint32_t family,
                                  double c,
                                  size_t n_points,
                                  double tail_tol,
                                  struct NeKernel **out);

/**
 * Release a handle. NULL is ignored.
 *
 * # Safety
 * `kernel` must come from [`ne_kernel_periodize`] and not be freed twice.
 */
void ne_kernel_free(struct NeKernel *kernel);

/**
 * Grid size of the kernel, 0 for NULL.
 *
 * # Safety
 * `kernel` must be NULL or a live handle.
 */
size_t ne_kernel_n_points(const struct NeKernel *kernel);

/**
 * Copy the `N` grid samples `J(x_j)` into `out`, which holds `len` doubles.
 *
 * # Safety
 * `kernel` must be a live handle and `out` valid for `len` writes.
 */
enum NeStatus ne_kernel_samples(const struct NeKernel *kernel, double *out, size_t len);

/**
 * Spectral gap `J̃_0 − J̃_k` for `k` in `-N/2+1..=N/2`.
 *
 * # Safety
 * `kernel` must be a live handle and `out` writable.
 */
enum NeStatus ne_kernel_dft_gap(const struct NeKernel *kernel, int64_t k, double *out);

/**
 * # Safety
 * `kernel` must be a live handle and `out` writable.
 */
enum NeStatus ne_kernel_assumptions(const struct NeKernel *kernel, struct NeAssumptions *out);

/**
 * # Safety
 * `kernel` must be a live handle and `out` writable.
 */
enum NeStatus ne_critical_timestep(const struct NeKernel *kernel, struct NeCriticalTimestep *out);

/**
 * `g = 1 − dt (J̃_0 − J̃_k)`.
 *
 * # Safety
 * `kernel` must be a live handle and `out` writable.
 */
enum NeStatus ne_amplification_factor(const struct NeKernel *kernel,
                                      double dt,
                                      int64_t k,
                                      double *out);

/**
 * Advance real grid values `u[0..len]` by `n_steps` explicit Euler steps in place.
 * `path` is one of [`NeRhsPath`].
 *
 * `len` must equal the kernel grid size. Returns `NE_STATUS_NON_FINITE` and leaves the
 * last finite state in `u` if the iteration overflows.
 *
 * # Safety
 * `kernel` must be a live handle and `u` valid for `len` reads and writes.
 */
enum NeStatus ne_euler_run(const struct NeKernel *kernel,
                           double dt,
                           size_t n_steps,
                           uint32_t path,
                           double *u,
                           size_t len);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* NONLOCAL_EULER_H */

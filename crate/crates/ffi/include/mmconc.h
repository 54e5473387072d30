#ifndef MMCONC_H
#define MMCONC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes; the nonzero values match the CLI exit codes where the
// classes coincide.
typedef enum MmStatus {
  MM_STATUS_OK = 0,
  // A required pointer argument was null.
  MM_STATUS_NULL_POINTER = 1,
  // Invalid input data or parameters.
  MM_STATUS_INPUT = 2,
  // An exact oracle or generator refused a size limit.
  MM_STATUS_RESOURCE_LIMIT = 3,
  // An internal invariant failed.
  MM_STATUS_INTERNAL = 4,
  MM_STATUS_OUTPUT = 5,
  // A panic was caught at the boundary.
  MM_STATUS_PANIC = 6,
} MmStatus;

typedef enum MmMetric {
  MM_METRIC_EUCLIDEAN = 0,
  MM_METRIC_NORMALIZED_HAMMING = 1,
} MmMetric;

// Opaque handle to a metric measure space.
typedef struct MmSpace MmSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty if none. The
// pointer stays valid until the next failing call on the same thread.
const char *mm_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *mm_version(void);

// Builds a space from a row-major `n x n` distance matrix. `weights` may be
// null for the uniform measure.
//
// # Safety
// `dist` must point to `n * n` doubles, `weights` (if non-null) to `n`, and
// `out` must be writable.
enum MmStatus mm_space_from_distances(const double *dist,
                                      size_t n,
                                      const double *weights,
                                      struct MmSpace **out);

// Builds a space from `n` points of dimension `dim`, row-major.
//
// # Safety
// `coords` must point to `n * dim` doubles, `weights` (if non-null) to `n`,
// and `out` must be writable.
enum MmStatus mm_space_from_points(const double *coords,
                                   size_t n,
                                   size_t dim,
                                   const double *weights,
                                   enum MmMetric metric,
                                   struct MmSpace **out);

// Generates a reference space from a JSON spec such as
// `{"family":"hamming_cube","d":3,"seed":0}`.
//
// # Safety
// `spec_json` must be a NUL-terminated string and `out` writable.
enum MmStatus mm_space_generate(const char *spec_json, struct MmSpace **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `space` must come from an `mm_space_*` constructor and not be used after.
void mm_space_free(struct MmSpace *space);

// Number of points; 0 for a null handle.
//
// # Safety
// `space` must be null or a live handle.
size_t mm_space_len(const struct MmSpace *space);

// # Safety
// `space` must be a live handle and `out` writable.
enum MmStatus mm_space_diameter(const struct MmSpace *space, double *out);

// Lower weighted median of the pairwise-distance distribution.
//
// # Safety
// `space` must be a live handle and `out` writable.
enum MmStatus mm_space_char_size(const struct MmSpace *space, double *out);

// Exact concentration function at `eps`.
//
// # Safety
// `space` must be a live handle and `out` writable.
enum MmStatus mm_alpha_exact(const struct MmSpace *space, double eps, double *out);

// Exact separation distance at `kappa`.
//
// # Safety
// `space` must be a live handle and `out` writable.
enum MmStatus mm_sep_exact(const struct MmSpace *space, double kappa, double *out);

// Greedy lower bound on the separation distance at `kappa`.
//
// # Safety
// `space` must be a live handle and `out` writable.
enum MmStatus mm_sep_lower(const struct MmSpace *space,
                           double kappa,
                           size_t restarts,
                           uint64_t seed,
                           double *out);

// Exact separation distance of the full Hamming cube `{0,1}^d`.
//
// # Safety
// `out` must be writable.
enum MmStatus mm_sep_hamming(size_t d, double kappa, double *out);

// Distance-distribution dimension; `+inf` for zero variance.
//
// # Safety
// `space` must be a live handle and `out` writable.
enum MmStatus mm_dim_chavez(const struct MmSpace *space, bool exclude_diagonal, double *out);

// Earth mover's distance between two measures of length `n` on the space.
//
// # Safety
// `space` must be a live handle, `mu` and `nu` must point to `n` doubles,
// and `out` must be writable.
enum MmStatus mm_emd(const struct MmSpace *space,
                     const double *mu,
                     const double *nu,
                     size_t n,
                     double *out);

// The default `{ i / 2m }` grid written into `out[0..m]`.
//
// # Safety
// `out` must point to `m` writable doubles.
enum MmStatus mm_kappa_grid(size_t m, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MMCONC_H */

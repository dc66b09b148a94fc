#ifndef MPINV_H
#define MPINV_H

#include <stdbool.h>
#include <stddef.h>

typedef enum MpStatus {
  MP_STATUS_OK = 0,
  MP_STATUS_NULL_POINTER = 1,
  MP_STATUS_INVALID_ARGUMENT = 2,
  MP_STATUS_DIMENSION_MISMATCH = 3,
  MP_STATUS_NOT_SQUARE = 4,
  MP_STATUS_NON_FINITE = 5,
  MP_STATUS_NO_CONVERGENCE = 6,
  MP_STATUS_PENROSE_VIOLATION = 7,
  MP_STATUS_ZERO_CONORM = 8,
  MP_STATUS_NOT_MP_HERMITIAN = 9,
  MP_STATUS_JSON = 10,
  MP_STATUS_BUFFER_TOO_SMALL = 11,
  MP_STATUS_PANIC = 12,
} MpStatus;

// Opaque matrix handle.
typedef struct MpMatrix MpMatrix;

typedef struct MpTolerance {
  double rank_tol_factor;
  double eq_tol;
} MpTolerance;

typedef struct MpPenroseResiduals {
  double r1;
  double r2;
  double r3;
  double r4;
} MpPenroseResiduals;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Default tolerance: rank factor 1, relative equality tolerance 1e-9.
struct MpTolerance mp_tolerance_default(void);

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next library call on the same thread.
const char *mp_last_error_message(void);

// Builds a `rows x cols` matrix from `2 * rows * cols` interleaved doubles.
//
// # Safety
// `data` must point to `2 * rows * cols` readable doubles; `out` must be
// writable.
enum MpStatus mp_matrix_new(size_t rows, size_t cols, const double *data, struct MpMatrix **out);

// Releases a handle; null is ignored.
//
// # Safety
// `m` must be null or a handle returned by this library that was not freed.
void mp_matrix_free(struct MpMatrix *m);

// Row count, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
size_t mp_matrix_rows(const struct MpMatrix *m);

// Column count, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
size_t mp_matrix_cols(const struct MpMatrix *m);

// Copies the entries as interleaved `(re, im)` doubles into `buf`, which
// must hold at least `2 * rows * cols` values (`len` counts doubles).
//
// # Safety
// `m` must be a live handle and `buf` must point to `len` writable doubles.
enum MpStatus mp_matrix_copy_data(const struct MpMatrix *m, double *buf, size_t len);

// Parses `{"rows": r, "cols": c, "data": [[re, im], ...]}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum MpStatus mp_matrix_from_json(const char *json, struct MpMatrix **out);

// Serializes a matrix; free the result with `mp_string_free`.
//
// # Safety
// `m` must be a live handle; `out` must be writable.
enum MpStatus mp_matrix_to_json(const struct MpMatrix *m, char **out);

// Releases a string returned by this library; null is ignored.
//
// # Safety
// `s` must be null or a string returned by this library that was not freed.
void mp_string_free(char *s);

// Moore-Penrose inverse. `tol` may be null for the default tolerance and
// `rank` may be null when the rank is not wanted.
//
// # Safety
// `a` must be a live handle; `out` must be writable; `tol` and `rank` must be
// null or valid.
enum MpStatus mp_pinv(const struct MpMatrix *a,
                      const struct MpTolerance *tol,
                      struct MpMatrix **out,
                      size_t *rank);

// Relative residuals of the four Penrose equations for the candidate `x`.
//
// # Safety
// `a` and `x` must be live handles; `out` must be writable.
enum MpStatus mp_penrose_residuals(const struct MpMatrix *a,
                                   const struct MpMatrix *x,
                                   struct MpPenroseResiduals *out);

// Spectral norm.
//
// # Safety
// `a` must be a live handle; `out` must be writable.
enum MpStatus mp_operator_norm(const struct MpMatrix *a, double *out);

// Smallest nonzero singular value; `MP_STATUS_ZERO_CONORM` for the zero matrix.
//
// # Safety
// `a` must be a live handle; `out` must be writable; `tol` null or valid.
enum MpStatus mp_conorm(const struct MpMatrix *a, const struct MpTolerance *tol, double *out);

// # Safety
// `a` must be a live handle; `out` must be writable; `tol` null or valid.
enum MpStatus mp_numerical_rank(const struct MpMatrix *a,
                                const struct MpTolerance *tol,
                                size_t *out);

// `a† = a` (square input only).
//
// # Safety
// `a` must be a live handle; `out` must be writable; `tol` null or valid.
enum MpStatus mp_is_mp_hermitian(const struct MpMatrix *a,
                                 const struct MpTolerance *tol,
                                 bool *out);

// `a† = a*`.
//
// # Safety
// `a` must be a live handle; `out` must be writable; `tol` null or valid.
enum MpStatus mp_is_partial_isometry(const struct MpMatrix *a,
                                     const struct MpTolerance *tol,
                                     bool *out);

// Every reverse order law condition for `ab`, as the JSON condition report.
//
// # Safety
// `a` and `b` must be live handles; `out` must be writable; `tol` null or valid.
enum MpStatus mp_rol_report_json(const struct MpMatrix *a,
                                 const struct MpMatrix *b,
                                 const struct MpTolerance *tol,
                                 char **out);

// Classification report as JSON.
//
// # Safety
// `a` must be a live handle; `out` must be writable; `tol` null or valid.
enum MpStatus mp_classify_json(const struct MpMatrix *a, const struct MpTolerance *tol, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MPINV_H */

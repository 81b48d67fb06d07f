#ifndef POLYREG_H
#define POLYREG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PolyregStatus {
  POLYREG_STATUS_OK = 0,
  POLYREG_STATUS_NULL_POINTER = 1,
  POLYREG_STATUS_INVALID_ARGUMENT = 2,
  POLYREG_STATUS_LENGTH_MISMATCH = 3,
  POLYREG_STATUS_BUFFER_TOO_SMALL = 4,
  POLYREG_STATUS_NON_CONTRACTING = 5,
  POLYREG_STATUS_DEGENERATE = 6,
  POLYREG_STATUS_NOT_CYCLIC = 7,
  POLYREG_STATUS_NO_INTERIOR_INTERSECTION = 8,
  POLYREG_STATUS_OUTSIDE_DISK = 9,
  POLYREG_STATUS_PANIC = 10,
} PolyregStatus;

typedef enum PolyregJordanClass {
  POLYREG_JORDAN_CLASS_COMPLEX_ROTATION = 0,
  POLYREG_JORDAN_CLASS_REAL_DIAGONAL = 1,
  POLYREG_JORDAN_CLASS_JORDAN_BLOCK = 2,
  POLYREG_JORDAN_CLASS_MIXED = 3,
  POLYREG_JORDAN_CLASS_NON_CONTRACTING = 4,
} PolyregJordanClass;

typedef struct PolyregCirculant PolyregCirculant;

typedef struct PolyregSphericalPolygon PolyregSphericalPolygon;

// Result of an iterative regularization.
typedef struct PolyregRunInfo {
  size_t iterations;
  bool converged;
} PolyregRunInfo;

typedef struct PolyregClassification {
  bool preserves_sum;
  bool fixes_regular;
  bool attracting;
  double spectral_radius;
  enum PolyregJordanClass jordan_class;
  // Set only for `ComplexRotation`.
  bool has_rotation;
  double rotation_a;
  double rotation_phi;
} PolyregClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer is
// valid until the next call into this library on the same thread.
const char *polyreg_last_error_message(void);

// # Safety
// `coeffs` must point to `n` doubles; `out` must be writable.
enum PolyregStatus polyreg_circulant_new(const double *coeffs,
                                         size_t n,
                                         struct PolyregCirculant **out);

// First row `((k−1)/k, 1/k, 0, …)` of size `n`.
//
// # Safety
// `out` must be writable.
enum PolyregStatus polyreg_circulant_rotation_k(size_t n,
                                                uint32_t k,
                                                struct PolyregCirculant **out);

// # Safety
// `h` must come from a `polyreg_circulant_*` constructor or be null.
void polyreg_circulant_free(struct PolyregCirculant *h);

// # Safety
// `h` must be a live handle or null.
size_t polyreg_circulant_len(const struct PolyregCirculant *h);

// Writes `λ_j` for `j = 0 … n−1` into `re` and `im`.
//
// # Safety
// `h` must be live; `re` and `im` must hold `len` doubles.
enum PolyregStatus polyreg_circulant_eigenvalues(const struct PolyregCirculant *h,
                                                 double *re,
                                                 double *im,
                                                 size_t len);

// # Safety
// `h` must be live; `out` must be writable.
enum PolyregStatus polyreg_circulant_contraction(const struct PolyregCirculant *h, double *out);

// # Safety
// `h` must be live; `v` and `out` must hold `len` doubles.
enum PolyregStatus polyreg_circulant_apply(const struct PolyregCirculant *h,
                                           const double *v,
                                           double *out,
                                           size_t len);

// Limit of repeated application (projection onto the unit-eigenvalue space).
//
// # Safety
// `h` must be live; `v` and `out` must hold `len` doubles.
enum PolyregStatus polyreg_circulant_limit(const struct PolyregCirculant *h,
                                           const double *v,
                                           double *out,
                                           size_t len);

// Polygon from `count` unit vectors stored as `x, y, z` triples.
//
// # Safety
// `xyz` must hold `3·count` doubles; `out` must be writable.
enum PolyregStatus polyreg_sphere_polygon_new(const double *xyz,
                                              size_t count,
                                              struct PolyregSphericalPolygon **out);

// Fits a small circle to the points and returns the projected polygon.
//
// # Safety
// As [`polyreg_sphere_polygon_new`].
enum PolyregStatus polyreg_sphere_fit_and_project(const double *xyz,
                                                  size_t count,
                                                  struct PolyregSphericalPolygon **out);

// # Safety
// `h` must come from a `polyreg_sphere_*` constructor or be null.
void polyreg_sphere_polygon_free(struct PolyregSphericalPolygon *h);

// # Safety
// `h` must be a live handle or null.
size_t polyreg_sphere_polygon_len(const struct PolyregSphericalPolygon *h);

// # Safety
// `h` must be live; `xyz` must hold `len` doubles (at least `3·n`).
enum PolyregStatus polyreg_sphere_polygon_vertices(const struct PolyregSphericalPolygon *h,
                                                   double *xyz,
                                                   size_t len);

// Regularizes about the fixed circumcenter axis; `out` receives the final
// polygon as a new handle.
//
// # Safety
// `h` must be live; `out` and `info` must be writable.
enum PolyregStatus polyreg_sphere_regularize(const struct PolyregSphericalPolygon *h,
                                             uint32_t k,
                                             double tol,
                                             size_t max_iter,
                                             struct PolyregSphericalPolygon **out,
                                             struct PolyregRunInfo *info);

// # Safety
// `h` must be live; `out` must be writable.
enum PolyregStatus polyreg_sphere_is_regular(const struct PolyregSphericalPolygon *h,
                                             double tol,
                                             bool *out);

// Napoleon centers of a plane triangle given as `re, im` pairs.
//
// # Safety
// `xy` must hold 6 doubles and `out` room for 6.
enum PolyregStatus polyreg_napoleon_plane(const double *xy, double *out);

// Iterates the boundary-gap transform on `len` points in `[0, 1)`; the final
// points are written to `out`.
//
// # Safety
// `points` and `out` must hold `len` doubles; `info` must be writable.
enum PolyregStatus polyreg_hyperbolic_regularize(const double *points,
                                                 size_t len,
                                                 double tol,
                                                 size_t max_iter,
                                                 double *out,
                                                 struct PolyregRunInfo *info);

// Polygon vertices (`re, im` pairs, `len / 2` of them) for `len` boundary points.
//
// # Safety
// `points` must hold `len` doubles and `xy` must hold `xy_len ≥ len` doubles.
enum PolyregStatus polyreg_hyperbolic_polygon(const double *points,
                                              size_t len,
                                              double *xy,
                                              size_t xy_len);

// Classifies the `n × n` row-major matrix `entries`.
//
// # Safety
// `entries` must hold `n·n` doubles; `out` must be writable.
enum PolyregStatus polyreg_classify(const double *entries,
                                    size_t n,
                                    struct PolyregClassification *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYREG_H */

#ifndef CONVEXVAL_H
#define CONVEXVAL_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum CvStatus {
  CV_STATUS_OK = 0,
  // A required pointer argument was NULL.
  CV_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  CV_STATUS_INVALID_UTF8 = 2,
  // Malformed JSON or an unreadable value.
  CV_STATUS_PARSE = 3,
  // Well-formed but unacceptable input (wrong class, dimension, parameter).
  CV_STATUS_INPUT = 4,
  // The operation is outside the supported domain.
  CV_STATUS_DOMAIN = 5,
  // A verification suite ran and recorded a failing law; the report is
  // still written.
  CV_STATUS_CHECK_FAILED = 6,
  // A Rust panic was caught at the boundary.
  CV_STATUS_PANIC = 7,
} CvStatus;

// Opaque function or polytope.
typedef struct CvInput CvInput;

// Opaque transform handle.
typedef struct CvTransform CvTransform;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer is
// valid until the next failing call on the same thread.
const char *cv_last_error(void);

// Library version as a static string.
const char *cv_version(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must be NULL or a pointer returned by this library and not yet freed.
void cv_string_free(char *s);

// Parses a polytope, class-S, class-F or log-concave function from JSON.
//
// # Safety
// `json` must be NULL or a nul-terminated string; `out` must be NULL or
// writable.
enum CvStatus cv_input_from_json(const char *json, struct CvInput **out);

// Serializes an input; the string is released with [`cv_string_free`].
//
// # Safety
// `input` must be NULL or a live handle; `out` must be NULL or writable.
enum CvStatus cv_input_to_json(const struct CvInput *input, char **out);

// Ambient dimension of an input, or 0 for NULL.
//
// # Safety
// `input` must be NULL or a live handle.
size_t cv_input_dim(const struct CvInput *input);

// # Safety
// `input` must be NULL or a handle not yet freed.
void cv_input_free(struct CvInput *input);

// Legendre transform: S to F, F to S.
//
// # Safety
// `input` must be NULL or a live handle; `out` must be NULL or writable.
enum CvStatus cv_legendre(const struct CvInput *input, struct CvInput **out);

// Polar of a log-concave function.
//
// # Safety
// `input` must be NULL or a live handle; `out` must be NULL or writable.
enum CvStatus cv_polar(const struct CvInput *input, struct CvInput **out);

// Infimal convolution of two class-S functions.
//
// # Safety
// `a`, `b` must be NULL or live handles; `out` must be NULL or writable.
enum CvStatus cv_infconv(const struct CvInput *a, const struct CvInput *b, struct CvInput **out);

// Laplace transform of a polytope (indicator) or of `e^{-u}`, evaluated at
// each point of `points_json`. Writes a JSON array of
// `{"x", "value", "err_bound", "exact"}` objects. `precision_bits` of 0
// selects the default.
//
// # Safety
// `input` must be NULL or a live handle; `points_json` NULL or
// nul-terminated; `out` NULL or writable.
enum CvStatus cv_laplace(const struct CvInput *input,
                         const char *points_json,
                         uint32_t precision_bits,
                         char **out);

// Parses `{"transform": id, "params": {...}, "dualized": bool}`.
//
// # Safety
// `json` must be NULL or nul-terminated; `out` NULL or writable.
enum CvStatus cv_transform_from_json(const char *json, struct CvTransform **out);

// # Safety
// `h` must be NULL or a live handle; `out` NULL or writable.
enum CvStatus cv_transform_to_json(const struct CvTransform *h, char **out);

// The dual transform, as a new handle.
//
// # Safety
// `h` must be NULL or a live handle; `out` NULL or writable.
enum CvStatus cv_transform_dualize(const struct CvTransform *h, struct CvTransform **out);

// Evaluates a transform of `input` at each point; output as in
// [`cv_laplace`].
//
// # Safety
// Pointers must be NULL or valid as for [`cv_laplace`].
enum CvStatus cv_transform_eval(const struct CvTransform *h,
                                const struct CvInput *input,
                                const char *points_json,
                                uint32_t precision_bits,
                                char **out);

// # Safety
// `h` must be NULL or a handle not yet freed.
void cv_transform_free(struct CvTransform *h);

// Runs a verification suite and writes its report JSON to `out`.
// `count` of 0 keeps the suite's default fixture count. Returns
// [`CvStatus::CheckFailed`] (with the report written) when a law fails.
//
// # Safety
// `suite` must be NULL or nul-terminated; `out` NULL or writable.
enum CvStatus cv_verify(const char *suite, uint32_t dim, uint64_t seed, size_t count, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CONVEXVAL_H */

#ifndef POLARIS_H
#define POLARIS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by all functions.
 */
typedef enum {
  POLARIS_STATUS_OK = 0,
  POLARIS_STATUS_INVALID_ARGUMENT = 1,
  POLARIS_STATUS_NULL_POINTER = 2,
  /**
   * A verifier ran to completion and rejected its input.
   */
  POLARIS_STATUS_REJECTED = 3,
  POLARIS_STATUS_UNSUPPORTED = 4,
  POLARIS_STATUS_INTERNAL = 5,
} PolarisStatus;

/**
 * Form selector for [`polaris_space_new`].
 */
typedef enum {
  POLARIS_KIND_SYMPLECTIC = 0,
  POLARIS_KIND_HYPERBOLIC = 1,
  POLARIS_KIND_PARABOLIC = 2,
} PolarisKind;

/**
 * A standard apartment together with the space it lives in.
 */
typedef struct PolarisApartment PolarisApartment;

/**
 * A finite classical polar space.
 */
typedef struct PolarisSpace PolarisSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds the polar space of the given kind, rank `n` and prime `p`.
 *
 * # Safety
 * `out_space` must be a valid pointer to writable storage for one handle.
 */
PolarisStatus polaris_space_new(PolarisKind kind, size_t n, uint32_t p, PolarisSpace **out_space);

/**
 * # Safety
 * `space` must be null or a handle from [`polaris_space_new`] not yet freed.
 */
void polaris_space_free(PolarisSpace *space);

/**
 * # Safety
 * `space` must be a live handle and `out_rank` writable.
 */
PolarisStatus polaris_space_rank(const PolarisSpace *space, size_t *out_rank);

/**
 * Dimension of the underlying vector space.
 *
 * # Safety
 * `space` must be a live handle and `out_dim` writable.
 */
PolarisStatus polaris_space_ambient_dim(const PolarisSpace *space, size_t *out_dim);

/**
 * # Safety
 * `space` must be a live handle and `out_count` writable.
 */
PolarisStatus polaris_space_point_count(const PolarisSpace *space, size_t *out_count);

/**
 * Number of singular subspaces of projective dimension `k`.
 *
 * # Safety
 * `space` must be a live handle and `out_count` writable.
 */
PolarisStatus polaris_space_count_singular(const PolarisSpace *space, size_t k, size_t *out_count);

/**
 * Whether points `a` and `b` (registry ids, `0..point_count`) are
 * collinear. Equal ids are an invalid argument.
 *
 * # Safety
 * `space` must be a live handle and `out_collinear` writable.
 */
PolarisStatus polaris_space_collinear(const PolarisSpace *space,
                                      size_t a,
                                      size_t b,
                                      bool *out_collinear);

/**
 * The apartment of the standard frame at level `k`.
 *
 * # Safety
 * `space` must be a live handle and `out_apartment` writable.
 */
PolarisStatus polaris_apartment_new(const PolarisSpace *space,
                                    size_t k,
                                    PolarisApartment **out_apartment);

/**
 * # Safety
 * `apartment` must be null or a handle from [`polaris_apartment_new`].
 */
void polaris_apartment_free(PolarisApartment *apartment);

/**
 * # Safety
 * `apartment` must be a live handle and `out_len` writable.
 */
PolarisStatus polaris_apartment_len(const PolarisApartment *apartment, size_t *out_len);

/**
 * The apartment as a JSON subspace-set document, the same shape the
 * command line writes and [`polaris_verify_json`] reads.
 *
 * # Safety
 * `apartment` must be a live handle and `out_json` writable. The string
 * must be released with [`polaris_string_free`].
 */
PolarisStatus polaris_apartment_to_json(const PolarisApartment *apartment, char **out_json);

/**
 * Runs a theorem verifier on a JSON subspace-set document. `theorem` is a
 * name such as `"thm4.4"`.
 *
 * Returns `Ok` and a certificate document on acceptance, `Rejected` with
 * the failing clause in [`polaris_last_error`] otherwise.
 *
 * # Safety
 * `input` and `theorem` must be NUL-terminated strings; `out_certificate`
 * must be writable. The certificate must be released with
 * [`polaris_string_free`].
 */
PolarisStatus polaris_verify_json(const char *input, const char *theorem, char **out_certificate);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void polaris_string_free(char *s);

/**
 * Library version as a static string.
 */
const char *polaris_version(void);

/**
 * The message for the last failed call on this thread, or null. The
 * pointer stays valid until the next call into the library on this thread.
 */
const char *polaris_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLARIS_H */

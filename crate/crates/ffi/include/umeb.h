#ifndef UMEB_H
#define UMEB_H

/* Generated by cbindgen from crates/ffi. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum UmebStatus {
  UMEB_STATUS_OK = 0,
  UMEB_STATUS_NULL_POINTER = 1,
  UMEB_STATUS_INVALID_ARGUMENT = 2,
  UMEB_STATUS_IO = 3,
  UMEB_STATUS_PARSE = 4,
  UMEB_STATUS_SCHEMA = 5,
  UMEB_STATUS_DIMENSION_MISMATCH = 6,
  UMEB_STATUS_NOT_SQUARE = 7,
  UMEB_STATUS_RANK_DEFICIENT = 8,
  UMEB_STATUS_NOT_UNITARY = 9,
  UMEB_STATUS_NUMERICAL = 10,
  UMEB_STATUS_MALFORMED_PROVENANCE = 11,
  UMEB_STATUS_PANIC = 12,
} UmebStatus;

typedef enum UmebSearchVerdict {
  UMEB_SEARCH_VERDICT_EXTENSION_FOUND = 0,
  UMEB_SEARCH_VERDICT_NO_EXTENSION_FOUND = 1,
} UmebSearchVerdict;

typedef enum UmebCertificate {
  UMEB_CERTIFICATE_CERTIFIED_CONDITIONAL_ON_BASE = 0,
  UMEB_CERTIFICATE_NOT_APPLICABLE = 1,
  UMEB_CERTIFICATE_FAILED = 2,
} UmebCertificate;

typedef enum UmebDistinction {
  UMEB_DISTINCTION_DISTINGUISHED = 0,
  UMEB_DISTINCTION_NOT_DISTINGUISHED = 1,
} UmebDistinction;

/**
 * Opaque matrix set.
 */
typedef struct UmebSet UmebSet;

typedef struct UmebVerification {
  size_t dim;
  size_t element_count;
  double max_unitarity_residual;
  double max_gram_offdiag;
  double max_gram_diag_error;
  bool condition_i_ok;
  bool passed;
} UmebVerification;

typedef struct UmebSearchSummary {
  enum UmebSearchVerdict verdict;
  double best_nuclear_norm;
  double gap;
  size_t complement_dim;
  size_t best_restart;
} UmebSearchSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *umeb_last_error(void);

/**
 * All d² Weyl operators of dimension `d`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum UmebStatus umeb_weyl_family(size_t d, struct UmebSet **out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum UmebStatus umeb_bravyi_smolin_3(struct UmebSet **out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum UmebStatus umeb_umeb_6(struct UmebSet **out);

/**
 * Lift `base` from dimension d to qd.
 *
 * # Safety
 * `base` must be a live handle and `out` valid for writes.
 */
enum UmebStatus umeb_lift(const struct UmebSet *base, size_t q, struct UmebSet **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` valid for writes.
 */
enum UmebStatus umeb_load(const char *path, struct UmebSet **out);

/**
 * # Safety
 * `set` must be a live handle and `path` a NUL-terminated string.
 */
enum UmebStatus umeb_save(const struct UmebSet *set, const char *path);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `set` must be NULL or a handle not yet freed.
 */
void umeb_set_free(struct UmebSet *set);

/**
 * Matrix dimension d, or 0 for NULL.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
size_t umeb_set_dim(const struct UmebSet *set);

/**
 * Number of elements, or 0 for NULL.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
size_t umeb_set_len(const struct UmebSet *set);

/**
 * Copies element `index` into `re` and `im` (row-major, `len` = d² each).
 *
 * # Safety
 * `set` must be a live handle and `re`, `im` valid for `len` writes.
 */
enum UmebStatus umeb_set_element(const struct UmebSet *set,
                                 size_t index,
                                 double *re,
                                 double *im,
                                 size_t len);

/**
 * Unitarity, Gram orthogonality and element count with default
 * tolerances.
 *
 * # Safety
 * `set` must be a live handle and `out` valid for writes.
 */
enum UmebStatus umeb_verify(const struct UmebSet *set, struct UmebVerification *out);

/**
 * Seeded nuclear-norm search for an extension.
 *
 * # Safety
 * `set` must be a live handle and `out` valid for writes.
 */
enum UmebStatus umeb_search(const struct UmebSet *set,
                            size_t restarts,
                            size_t iters,
                            uint64_t seed,
                            double extension_tol,
                            struct UmebSearchSummary *out);

/**
 * Structural certificate for lifted sets.
 *
 * # Safety
 * `set` must be a live handle and `out` valid for writes.
 */
enum UmebStatus umeb_certify(const struct UmebSet *set, enum UmebCertificate *out);

/**
 * Compares spectral signatures with orders searched up to `bound`.
 *
 * # Safety
 * `a`, `b` must be live handles and `out` valid for writes.
 */
enum UmebStatus umeb_compare(const struct UmebSet *a,
                             const struct UmebSet *b,
                             uint64_t bound,
                             enum UmebDistinction *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UMEB_H */

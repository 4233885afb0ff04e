#ifndef OD_H
#define OD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OdStatus {
  OD_STATUS_OK = 0,
  OD_STATUS_NULL_POINTER = 1,
  OD_STATUS_INVALID_UTF8 = 2,
  OD_STATUS_PARSE = 3,
  OD_STATUS_ARITY = 4,
  OD_STATUS_NOT_REGULAR = 5,
  OD_STATUS_ILL_FORMED = 6,
  OD_STATUS_DOMAIN = 7,
  OD_STATUS_FLAVOR_MISMATCH = 8,
  OD_STATUS_PANIC = 9,
} OdStatus;

typedef enum OdFlavor {
  OD_FLAVOR_M = 0,
  OD_FLAVOR_P3 = 1,
  OD_FLAVOR_P4 = 2,
} OdFlavor;

/*
 Opaque term handle.
 */
typedef struct OdTerm OdTerm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread; empty after success.
 The pointer stays valid until the next call on the same thread.
 */
const char *od_last_error(void);

/*
 Parses `text` as a term of `flavor` and stores a new handle in `*out`.
 Parsed terms are syntactically valid but may break a stage proviso; see
 `od_term_violations`.

 # Safety
 `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum OdStatus od_term_parse(const char *text, enum OdFlavor flavor, struct OdTerm **out);

/*
 Releases a handle. Null is ignored.

 # Safety
 `t` must come from this library and not be used afterwards.
 */
void od_term_free(struct OdTerm *t);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void od_string_free(char *s);

/*
 Canonical text of `t` in `*out`.

 # Safety
 `t` must be a live handle and `out` a valid pointer.
 */
enum OdStatus od_term_render(const struct OdTerm *t, char **out);

/*
 Normal form of `t` as a new handle.

 # Safety
 `t` must be a live handle and `out` a valid pointer.
 */
enum OdStatus od_term_normalize(const struct OdTerm *t, struct OdTerm **out);

/*
 Stores -1, 0 or 1 in `*out` as `a` is below, equal to or above `b`.

 # Safety
 `a`, `b` must be live handles and `out` a valid pointer.
 */
enum OdStatus od_term_compare(const struct OdTerm *a, const struct OdTerm *b, int *out);

/*
 Number of well-formedness violations of `t`; zero means well formed.

 # Safety
 `t` must be a live handle and `out` a valid pointer.
 */
enum OdStatus od_term_violations(const struct OdTerm *t, size_t *out);

/*
 The K-set of `alpha` with respect to the regular term `sigma`, one
 rendered member per line, in `*out`.

 # Safety
 `sigma`, `alpha` must be live handles and `out` a valid pointer.
 */
enum OdStatus od_kset(const struct OdTerm *sigma, const struct OdTerm *alpha, char **out);

/*
 Applies the substitution `pi := target` to `xi`; the image is a new
 handle in `*out`.

 # Safety
 `target`, `xi` must be live handles and `out` a valid pointer.
 */
enum OdStatus od_subst_apply(const struct OdTerm *target,
                             const struct OdTerm *xi,
                             struct OdTerm **out);

/*
 Library version, a static string.
 */
const char *od_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OD_H */

#ifndef NAMECAT_H
#define NAMECAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by all fallible functions.
 */
typedef enum {
  NAMECAT_STATUS_OK = 0,
  NAMECAT_STATUS_NULL_ARGUMENT = 1,
  NAMECAT_STATUS_INVALID_UTF8 = 2,
  NAMECAT_STATUS_IO = 3,
  NAMECAT_STATUS_PARSE = 4,
  NAMECAT_STATUS_EMPTY_QUERY = 5,
  NAMECAT_STATUS_INVALID_INPUT = 6,
  NAMECAT_STATUS_PANIC = 7,
} NamecatStatus;

/**
 * A loaded model directory plus the normalization used for queries.
 */
typedef struct NamecatModels NamecatModels;

/**
 * A single rank profile.
 */
typedef struct NamecatProfile NamecatProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. The pointer stays
 * valid until the next namecat call on the same thread.
 */
const char *namecat_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void namecat_string_free(char *s);

/**
 * Loads every `*.prof` file in `dir`. `aliases_path` may be null.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be writable.
 */
NamecatStatus namecat_models_load(const char *dir,
                                  const char *aliases_path,
                                  bool fold_diacritics,
                                  NamecatModels **out);

/**
 * # Safety
 * `models` must be null or a live handle from [`namecat_models_load`].
 */
void namecat_models_free(NamecatModels *models);

/**
 * Number of loaded profiles; 0 for null.
 *
 * # Safety
 * `models` must be null or a live handle.
 */
size_t namecat_models_count(const NamecatModels *models);

/**
 * Classifies `text`. Writes the best canonical label (free with
 * [`namecat_string_free`]) and its distance; `out_ties` may be null.
 *
 * # Safety
 * `models` must be a live handle, `text` NUL-terminated, and the
 * non-null out-pointers writable.
 */
NamecatStatus namecat_classify(const NamecatModels *models,
                               const char *text,
                               char **out_label,
                               uint64_t *out_distance,
                               size_t *out_ties);

/**
 * Normalizes `text` with the default fold table.
 *
 * # Safety
 * `text` must be NUL-terminated and `out` writable.
 */
NamecatStatus namecat_normalize(const char *text, bool fold_diacritics, char **out);

/**
 * Balanced F-score of precision and recall; 0 when both are 0.
 */
double namecat_fscore(double precision, double recall);

/**
 * Loads one profile file.
 *
 * # Safety
 * `path` must be NUL-terminated and `out` writable.
 */
NamecatStatus namecat_profile_load(const char *path, NamecatProfile **out);

/**
 * # Safety
 * `profile` must be null or a live handle from [`namecat_profile_load`].
 */
void namecat_profile_free(NamecatProfile *profile);

/**
 * Number of ranked entries; 0 for null.
 *
 * # Safety
 * `profile` must be null or a live handle.
 */
size_t namecat_profile_len(const NamecatProfile *profile);

/**
 * Out-of-place distance of `doc` against the category profile `cat`.
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
NamecatStatus namecat_out_of_place(const NamecatProfile *doc,
                                   const NamecatProfile *cat,
                                   uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NAMECAT_H */

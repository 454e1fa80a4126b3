/* C interface to the policorpus analysis primitives. */

#ifndef POLICORPUS_H
#define POLICORPUS_H

/* Generated by cbindgen from the policorpus-capi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every ABI call.
 */
typedef enum PcStatus {
  PC_OK = 0,
  /*
   A required pointer argument was null.
   */
  PC_NULL_ARGUMENT = 1,
  /*
   An input string was not valid UTF-8.
   */
  PC_INVALID_UTF8 = 2,
  /*
   The operation itself reported an error.
   */
  PC_MODEL_ERROR = 3,
  /*
   The library caught an internal panic instead of unwinding into C.
   */
  PC_PANIC = 4,
} PcStatus;

/*
 Growable document collection for near-duplicate analysis.
 */
typedef struct PcDedupIndex PcDedupIndex;

/*
 Language detector over trained profiles.
 */
typedef struct PcLanguageId PcLanguageId;

/*
 Readability scores for one text, mirroring the library's four
 formulas. `smog_short_sample` flags texts under thirty sentences,
 where the SMOG estimate is known to be rough.
 */
typedef struct PcReadability {
  double fres;
  double fkg;
  double smog;
  double cli;
  bool smog_short_sample;
} PcReadability;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Releases a string returned by this library. Null is a no-op.

 # Safety
 `s` must have come from this library and not have been freed before.
 */
void pc_string_free(char *s);

/*
 Scores `text` with all four readability formulas.

 # Safety
 `text` must be a valid NUL-terminated string and `out` a valid
 pointer.
 */
enum PcStatus pc_readability_score(const char *text, struct PcReadability *out);

/*
 64-bit similarity fingerprint of `text` over `shingle_k`-word
 shingles. `shingle_k` of zero falls back to the default of 3.

 # Safety
 `text` must be a valid NUL-terminated string and `out` a valid
 pointer.
 */
enum PcStatus pc_simhash64(const char *text, uint32_t shingle_k, uint64_t *out);

/*
 Hamming distance between two fingerprints. Total, so no status.
 */
uint32_t pc_hamming64(uint64_t a, uint64_t b);

/*
 Whether the crawl URL filter would select `url`.

 # Safety
 `url` must be a valid NUL-terminated string and `out` a valid
 pointer.
 */
enum PcStatus pc_url_selected(const char *url, bool *out);

/*
 Creates a detector over the bundled language profiles.

 # Safety
 `out` must be a valid pointer.
 */
enum PcStatus pc_language_id_new(struct PcLanguageId **out);

/*
 # Safety
 `handle` must come from [`pc_language_id_new`] and not already be
 freed. Null is a no-op.
 */
void pc_language_id_free(struct PcLanguageId *handle);

/*
 Detects the language of `text`. `language_out` receives an owned
 string (release with [`pc_string_free`]); `confidence_out` receives
 the posterior of the winning language and may be null when the caller
 does not care.

 # Safety
 `handle` must be a live detector; `text` a valid NUL-terminated
 string; `language_out` a valid pointer.
 */
enum PcStatus pc_language_id_detect(const struct PcLanguageId *handle,
                                    const char *text,
                                    char **language_out,
                                    double *confidence_out);

/*
 Creates an empty near-duplicate index.

 # Safety
 `out` must be a valid pointer.
 */
enum PcStatus pc_dedup_index_new(struct PcDedupIndex **out);

/*
 # Safety
 `handle` must come from [`pc_dedup_index_new`] and not already be
 freed. Null is a no-op.
 */
void pc_dedup_index_free(struct PcDedupIndex *handle);

/*
 Adds one document. Near-duplicate comparison only ever happens inside
 a domain, so the caller picks the grouping key.

 # Safety
 `handle` must be a live index; `id`, `domain` and `text` valid
 NUL-terminated strings.
 */
enum PcStatus pc_dedup_index_add(struct PcDedupIndex *handle,
                                 const char *id,
                                 const char *domain,
                                 const char *text);

/*
 Runs near-duplicate detection at `threshold_bits` and returns a JSON
 report through `json_out` (release with [`pc_string_free`]). The
 report object has `kept` and `dropped` id arrays plus a `pairs` array
 of `{id_a, id_b, domain, hamming, jaccard}` objects.

 # Safety
 `handle` must be a live index and `json_out` a valid pointer.
 */
enum PcStatus pc_dedup_index_report(const struct PcDedupIndex *handle,
                                    uint32_t threshold_bits,
                                    char **json_out);

/*
 Extracts RAKE keyphrases from `text` and returns at most `top_k` of
 them (zero means all), highest score first, as a JSON array of
 `{phrase, score}` objects through `json_out` (release with
 [`pc_string_free`]).

 # Safety
 `text` must be a valid NUL-terminated string and `json_out` a valid
 pointer.
 */
enum PcStatus pc_rake_keyphrases(const char *text, size_t top_k, char **json_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLICORPUS_H */

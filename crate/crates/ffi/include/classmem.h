#ifndef CLASSMEM_H
#define CLASSMEM_H

#include <stdbool.h>
#include <stddef.h>

// Result of every fallible call.
typedef enum ClmStatus {
  CLM_STATUS_OK = 0,
  // A required pointer argument was null.
  CLM_STATUS_NULL_ARGUMENT = 1,
  // Input text was not valid UTF-8.
  CLM_STATUS_INVALID_UTF8 = 2,
  // The text did not parse or failed a structural check.
  CLM_STATUS_PARSE = 3,
  // The operation does not apply to this model, or needs a bound.
  CLM_STATUS_INCOMPATIBLE = 4,
  // A panic was caught at the boundary.
  CLM_STATUS_INTERNAL = 5,
} ClmStatus;

// Emptiness answer.
typedef enum ClmVerdict {
  CLM_VERDICT_EMPTY = 0,
  CLM_VERDICT_NON_EMPTY = 1,
  // Bounded search found nothing; longer runs were not explored.
  CLM_VERDICT_UNKNOWN = 2,
} ClmVerdict;

// Opaque parsed automaton, net or system.
typedef struct ClmModel ClmModel;

// Opaque parsed data word.
typedef struct ClmWord ClmWord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread. Valid until the next call
// on the same thread; never null.
const char *clm_last_error(void);

// Parses a model file. On success `*out` owns a new handle.
//
// # Safety
// `src` must be a NUL-terminated string and `out` a valid pointer.
enum ClmStatus clm_model_parse(const char *src, struct ClmModel **out);

// # Safety
// `m` must come from [`clm_model_parse`] and not be used afterwards. Null is ignored.
void clm_model_free(struct ClmModel *m);

// The model tag (`cma`, `ndcma`, ...) as a static string.
//
// # Safety
// `m` must be a live handle or null.
const char *clm_model_tag(const struct ClmModel *m);

// Canonical text of the model. Release with [`clm_string_free`].
//
// # Safety
// `m` must be a live handle or null.
char *clm_model_print(const struct ClmModel *m);

// # Safety
// `s` must come from this library and not be used afterwards. Null is ignored.
void clm_string_free(char *s);

// Parses a data word file.
//
// # Safety
// `src` must be a NUL-terminated string and `out` a valid pointer.
enum ClmStatus clm_word_parse(const char *src, struct ClmWord **out);

// # Safety
// `w` must come from [`clm_word_parse`] and not be used afterwards. Null is ignored.
void clm_word_free(struct ClmWord *w);

// Membership of a data word.
//
// # Safety
// `m` and `w` must be live handles and `out` a valid pointer.
enum ClmStatus clm_run(const struct ClmModel *m, const struct ClmWord *w, bool *out);

// Emptiness of the model's language; for a VAS, non-coverability of its
// targets. `bound` is 0 for exact procedures only; a positive bound also
// allows a bounded search on strong machines, which can answer
// [`ClmVerdict::Unknown`].
//
// # Safety
// `m` must be a live handle and `out` a valid pointer.
enum ClmStatus clm_empty(const struct ClmModel *m, size_t bound, enum ClmVerdict *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CLASSMEM_H */

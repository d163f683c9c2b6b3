#ifndef AUTSTRUCT_H
#define AUTSTRUCT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define AUTSTRUCT_OK 0

#define AUTSTRUCT_ERR_NULL -1

#define AUTSTRUCT_ERR_UTF8 -2

// Malformed JSON or formula text.
#define AUTSTRUCT_ERR_PARSE -3

// The input is well formed but not acceptable (bad automaton, unknown
// relation, wrong fragment, unbounded degree, ...).
#define AUTSTRUCT_ERR_INVALID -4

#define AUTSTRUCT_ERR_RESOURCE -5

#define AUTSTRUCT_ERR_IO -6

#define AUTSTRUCT_ERR_PANIC -7

#define AUTSTRUCT_ENGINE_CLASSIC 0

#define AUTSTRUCT_ENGINE_LOCAL 1

#define AUTSTRUCT_ENGINE_SIGMA1 2

#define AUTSTRUCT_ENGINE_SIGMA2 3

// An immutable presentation.
typedef struct AutstructPresentation AutstructPresentation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *autstruct_version(void);

// Message of the last failed call on this thread, or null. Valid until
// the next call on the same thread.
const char *autstruct_last_error(void);

// Parses a presentation document. Free the handle with
// `autstruct_presentation_free`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
int32_t autstruct_presentation_from_json(const char *json, struct AutstructPresentation **out);

// Looks up a builtin presentation such as `"nat-succ"`.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
int32_t autstruct_presentation_builtin(const char *name, struct AutstructPresentation **out);

// # Safety
// `p` must come from this library and not be freed twice; null is ignored.
void autstruct_presentation_free(struct AutstructPresentation *p);

// Serializes a presentation. Free the string with `autstruct_string_free`.
//
// # Safety
// `p` must be a live handle and `out` a valid pointer.
int32_t autstruct_presentation_to_json(const struct AutstructPresentation *p, char **out);

// # Safety
// `s` must come from this library; null is ignored.
void autstruct_string_free(char *s);

// Runs the mandatory structural checks; `*passed` is 1 or 0. A `budget`
// of 0 selects the default.
//
// # Safety
// `p` must be a live handle and `passed` a valid pointer.
int32_t autstruct_validate(const struct AutstructPresentation *p, uint64_t budget, int32_t *passed);

// Maximum Gaifman degree; `*degree` is -1 when it exceeds `cap`.
//
// # Safety
// `p` must be a live handle and `degree` a valid pointer.
int32_t autstruct_max_degree(const struct AutstructPresentation *p,
                             uint64_t cap,
                             uint64_t budget,
                             int64_t *degree);

// Decides a sentence with one of the `AUTSTRUCT_ENGINE_*` engines;
// `*verdict` is 1 for true and 0 for false.
//
// # Safety
// `p` must be a live handle, `formula` a NUL-terminated string and
// `verdict` a valid pointer.
int32_t autstruct_decide(const struct AutstructPresentation *p,
                         const char *formula,
                         int32_t engine,
                         uint64_t budget,
                         int32_t *verdict);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AUTSTRUCT_H */

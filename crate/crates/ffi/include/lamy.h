#ifndef LAMY_H
#define LAMY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LamyStatus {
  LAMY_STATUS_OK = 0,
  /**
   * The automaton rejects, or the derivation is invalid.
   */
  LAMY_STATUS_REJECTED = 1,
  LAMY_STATUS_NULL_ARGUMENT = 2,
  LAMY_STATUS_INVALID_UTF8 = 3,
  LAMY_STATUS_PARSE_ERROR = 4,
  LAMY_STATUS_LATTICE_TOO_LARGE = 5,
  LAMY_STATUS_UNKNOWN_STATE = 6,
  LAMY_STATUS_INTERNAL = 7,
} LamyStatus;

/**
 * An automaton over the signature of the term it was parsed against.
 */
typedef struct LamyAutomaton LamyAutomaton;

/**
 * A parsed term together with its signature.
 */
typedef struct LamyTerm LamyTerm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread. Valid until the next call
 * into the library from the same thread.
 */
const char *lamy_last_error(void);

/**
 * Releases a string returned by the library.
 *
 * # Safety
 * `s` must be null or a string obtained from this library, freed once.
 */
void lamy_string_free(char *s);

/**
 * Parses a term file (`const` declarations followed by a closed term).
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum LamyStatus lamy_term_parse(const char *src, struct LamyTerm **out);

/**
 * # Safety
 * `t` must be null or a handle from [`lamy_term_parse`], freed once.
 */
void lamy_term_free(struct LamyTerm *t);

/**
 * Parses an automaton over the signature of `term`.
 *
 * # Safety
 * `term` must be a live term handle, `src` a NUL-terminated string and
 * `out` writable.
 */
enum LamyStatus lamy_automaton_parse(const struct LamyTerm *term,
                                     const char *src,
                                     struct LamyAutomaton **out);

/**
 * # Safety
 * `a` must be null or a handle from [`lamy_automaton_parse`], freed once.
 */
void lamy_automaton_free(struct LamyAutomaton *a);

/**
 * Number of states; state `i` is bit `i` of the masks below.
 *
 * # Safety
 * `a` must be a live automaton handle.
 */
size_t lamy_automaton_state_count(const struct LamyAutomaton *a);

/**
 * Index of the state called `name`.
 *
 * # Safety
 * `a` must be a live automaton handle, `name` a NUL-terminated string and
 * `out` writable.
 */
enum LamyStatus lamy_automaton_state_index(const struct LamyAutomaton *a,
                                           const char *name,
                                           size_t *out);

/**
 * Bit mask of the states from which the automaton accepts the Böhm tree
 * of the term. `cap` bounds enumerated lattices (0 for the default).
 *
 * # Safety
 * Handles must be live; `mask` must be writable.
 */
enum LamyStatus lamy_accepting_states(const struct LamyTerm *term,
                                      const struct LamyAutomaton *a,
                                      size_t cap,
                                      uint64_t *mask);

/**
 * Decides acceptance from state `state` and returns a checked
 * certificate: a derivation file of `⊢ M ≥ {q}` with status `Ok`, or of
 * `⊢ M ≱ {q}` with status `Rejected`. `certificate` may be null.
 *
 * # Safety
 * Handles must be live; `certificate` must be null or writable.
 */
enum LamyStatus lamy_check_state(const struct LamyTerm *term,
                                 const struct LamyAutomaton *a,
                                 size_t state,
                                 size_t cap,
                                 char **certificate);

/**
 * Checks a derivation file against an automaton given as text. Returns
 * `Ok` for a valid derivation of a closed term, `Rejected` with the
 * violation in [`lamy_last_error`] otherwise.
 *
 * # Safety
 * Both arguments must be NUL-terminated strings.
 */
enum LamyStatus lamy_verify(const char *derivation, const char *automaton);

/**
 * Böhm-tree prefix of the term as text: a space-separated word for
 * chains, `a(b, c)` tree notation otherwise.
 *
 * # Safety
 * `term` must be a live handle and `out` writable.
 */
enum LamyStatus lamy_bohm_prefix(const struct LamyTerm *term,
                                 size_t depth,
                                 size_t fuel,
                                 char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LAMY_H */

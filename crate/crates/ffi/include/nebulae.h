#ifndef NEBULAE_H
#define NEBULAE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NebulaeOrderingKind {
  NEBULAE_ORDERING_KIND_NEBULA = 0,
  NEBULAE_ORDERING_KIND_LEFT = 1,
  NEBULAE_ORDERING_KIND_RIGHT = 2,
  NEBULAE_ORDERING_KIND_CENTRAL = 3,
  NEBULAE_ORDERING_KIND_GALAXY = 4,
} NebulaeOrderingKind;

typedef enum NebulaeStatus {
  NEBULAE_STATUS_OK = 0,
  NEBULAE_STATUS_NULL_POINTER = 1,
  NEBULAE_STATUS_INVALID_INPUT = 2,
  NEBULAE_STATUS_PARSE = 3,
  NEBULAE_STATUS_BUDGET_EXCEEDED = 4,
  NEBULAE_STATUS_INVARIANT = 5,
  NEBULAE_STATUS_PANIC = 6,
} NebulaeStatus;

// Opaque tournament handle.
typedef struct NebulaeTournament NebulaeTournament;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or null. The
// pointer stays valid until the next failing call on the same thread.
const char *nebulae_last_error(void);

// Parses a tournament file (`tournament matrix n` or `tournament backward n`).
//
// # Safety
// `text` must be a valid NUL-terminated string and `out` a valid pointer.
enum NebulaeStatus nebulae_tournament_parse(const char *text, struct NebulaeTournament **out);

// Builds a tournament from an `n * n` row-major matrix where entry
// `u * n + v` is 1 when `u` beats `v`.
//
// # Safety
// `matrix` must point to `n * n` readable bytes and `out` must be valid.
enum NebulaeStatus nebulae_tournament_from_matrix(size_t n,
                                                  const uint8_t *matrix,
                                                  struct NebulaeTournament **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `t` must be null or a handle returned by this library and not yet freed.
void nebulae_tournament_free(struct NebulaeTournament *t);

// Number of vertices, or 0 for a null handle.
//
// # Safety
// `t` must be null or a live handle.
size_t nebulae_tournament_order(const struct NebulaeTournament *t);

// # Safety
// `t` must be a live handle and `out` a valid pointer.
enum NebulaeStatus nebulae_tournament_beats(const struct NebulaeTournament *t,
                                            size_t u,
                                            size_t v,
                                            bool *out);

// Reverses every edge into a new handle.
//
// # Safety
// `t` must be a live handle and `out` a valid pointer.
enum NebulaeStatus nebulae_tournament_complement(const struct NebulaeTournament *t,
                                                 struct NebulaeTournament **out);

// Matrix-format text of a tournament; release with [`nebulae_string_free`].
//
// # Safety
// `t` must be a live handle and `out` a valid pointer.
enum NebulaeStatus nebulae_tournament_to_text(const struct NebulaeTournament *t, char **out);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void nebulae_string_free(char *s);

// Size of a largest transitive subtournament (exact, within budget).
//
// # Safety
// `t` must be a live handle and `out` a valid pointer.
enum NebulaeStatus nebulae_transitive_number(const struct NebulaeTournament *t, size_t *out);

// # Safety
// `t` must be a live handle and `out` a valid pointer.
enum NebulaeStatus nebulae_is_prime(const struct NebulaeTournament *t, bool *out);

// Searches for an ordering of the given kind among tournaments of at most
// `max_n` vertices (0 uses the configured budget). When one exists, `found`
// is set and the ordering is written to `ordering`, which must hold
// `order(t)` entries; `ordering` may be null if the ordering is not wanted.
//
// # Safety
// `t` must be a live handle, `found` valid, and `ordering` null or
// writable for `order(t)` entries.
enum NebulaeStatus nebulae_find_ordering(const struct NebulaeTournament *t,
                                         enum NebulaeOrderingKind kind,
                                         size_t max_n,
                                         bool *found,
                                         size_t *ordering);

// Looks for a copy of `pattern` in `host`. When one exists, `found` is set
// and the image of pattern vertex `i` is written to `map[i]`, which must
// hold `order(pattern)` entries or be null.
//
// # Safety
// Both handles must be live, `found` valid, and `map` null or writable for
// `order(pattern)` entries.
enum NebulaeStatus nebulae_contains(const struct NebulaeTournament *host,
                                    const struct NebulaeTournament *pattern,
                                    bool *found,
                                    size_t *map);

// Runs the example checklist of `nebulae verify-paper-examples`; `passed`
// is set when every check holds.
//
// # Safety
// `passed` must be a valid pointer.
enum NebulaeStatus nebulae_verify_examples(bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEBULAE_H */

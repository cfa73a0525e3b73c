#ifndef MUB6_H
#define MUB6_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Zero is success.
typedef enum Mub6Status {
  MUB6_STATUS_OK = 0,
  MUB6_STATUS_NULL_POINTER = 1,
  MUB6_STATUS_INVALID_ARGUMENT = 2,
  MUB6_STATUS_PARAMETER_RANGE = 3,
  MUB6_STATUS_NOT_MUTUALLY_UNBIASED = 4,
  MUB6_STATUS_NOT_HADAMARD = 5,
  MUB6_STATUS_INVALID_MOVE = 6,
  MUB6_STATUS_PARSE = 7,
  MUB6_STATUS_IO = 8,
  MUB6_STATUS_BUFFER_TOO_SMALL = 9,
  MUB6_STATUS_PANIC = 10,
} Mub6Status;

// Family selector values for [`mub6_pair_new`] and [`mub6_reduce`].
typedef enum Mub6Family {
  MUB6_FAMILY_P0 = 0,
  MUB6_FAMILY_P1 = 1,
  MUB6_FAMILY_P2 = 2,
  MUB6_FAMILY_P3 = 3,
} Mub6Family;

// Member selector values for [`mub6_pair_member`].
typedef enum Mub6Member {
  MUB6_MEMBER_FIRST = 0,
  MUB6_MEMBER_SECOND = 1,
} Mub6Member;

// Opaque pair of mutually unbiased bases.
typedef struct Mub6Pair Mub6Pair;

// Opaque result of an extension search.
typedef struct Mub6Search Mub6Search;

// Angles in radians. Fields a family does not use are ignored.
typedef struct Mub6Params {
  double xi;
  double eta;
  double zeta;
  double chi;
  double sigma;
  double tau;
} Mub6Params;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *mub6_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void mub6_string_free(char *s);

// Builds a family member. `family` is a [`Mub6Family`] value.
//
// # Safety
// `params` may be null for P0 and P2; `out` must be writable.
enum Mub6Status mub6_pair_new(uint32_t family,
                              const struct Mub6Params *params,
                              struct Mub6Pair **out);

// Parses a pair JSON document and checks unbiasedness.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum Mub6Status mub6_pair_from_json(const char *json, struct Mub6Pair **out);

// # Safety
// `pair` must be null or a live handle.
void mub6_pair_free(struct Mub6Pair *pair);

// Dimension of the pair, or 0 for a null handle.
//
// # Safety
// `pair` must be null or a live handle.
size_t mub6_pair_dim(const struct Mub6Pair *pair);

// # Safety
// `pair` must be a live handle and `out` writable.
enum Mub6Status mub6_pair_to_json(const struct Mub6Pair *pair, char **out);

// Copies one member, row-major, as interleaved `re, im` doubles
// (`2 d^2` values).
//
// # Safety
// `pair` must be a live handle; `out` must hold `len` doubles.
enum Mub6Status mub6_pair_member(const struct Mub6Pair *pair,
                                 uint32_t member,
                                 double *out,
                                 size_t len);

// Largest deviation of `|<a|b>|^2` from `1/d`; `is_mu` is set against the
// default tolerance.
//
// # Safety
// `pair` must be a live handle; outputs must be writable.
enum Mub6Status mub6_pair_verify(const struct Mub6Pair *pair, double *worst_deviation, bool *is_mu);

// Standard form `{I, H}` of a family member. `script_json` may be null;
// otherwise it receives the reduction script.
//
// # Safety
// `params` as for [`mub6_pair_new`]; `out` writable; `script_json` null or
// writable.
enum Mub6Status mub6_reduce(uint32_t family,
                            const struct Mub6Params *params,
                            struct Mub6Pair **out,
                            char **script_json);

// Haagerup fingerprint of a `dim x dim` Hadamard matrix given as
// interleaved `re, im` doubles, as JSON.
//
// # Safety
// `entries` must hold `2 dim^2` doubles; `out` writable.
enum Mub6Status mub6_fingerprint_json(const double *entries, size_t dim, char **out);

// Searches for vectors unbiased to both members and for a third basis.
//
// # Safety
// `pair` must be a live handle; `out` writable.
enum Mub6Status mub6_search(const struct Mub6Pair *pair,
                            size_t restarts,
                            uint64_t seed,
                            struct Mub6Search **out);

// # Safety
// `search` must be null or a live handle.
void mub6_search_free(struct Mub6Search *search);

// Number of distinct vectors found, or 0 for a null handle.
//
// # Safety
// `search` must be null or a live handle.
size_t mub6_search_count(const struct Mub6Search *search);

// Size of the largest set of mutually orthogonal vectors found.
//
// # Safety
// `search` must be null or a live handle.
size_t mub6_search_max_clique(const struct Mub6Search *search);

// Whether a full extension basis was found.
//
// # Safety
// `search` must be null or a live handle.
bool mub6_search_has_basis(const struct Mub6Search *search);

// Copies vector `index` as interleaved `re, im` doubles (`2 d` values).
//
// # Safety
// `search` must be a live handle; `out` must hold `len` doubles.
enum Mub6Status mub6_search_vector(const struct Mub6Search *search,
                                   size_t index,
                                   double *out,
                                   size_t len);

// Full search result as JSON.
//
// # Safety
// `search` must be a live handle; `out` writable.
enum Mub6Status mub6_search_to_json(const struct Mub6Search *search, char **out);

// Library version, static string.
const char *mub6_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MUB6_H */

#ifndef BENIGN_GWP_H
#define BENIGN_GWP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every `bgwp_*` call.
 */
typedef enum BgwpStatus {
  BGWP_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  BGWP_STATUS_NULL_POINTER = 1,
  /*
   A string argument was not valid UTF-8.
   */
  BGWP_STATUS_INVALID_UTF8 = 2,
  /*
   Malformed or invalid spec, word, query or graph.
   */
  BGWP_STATUS_INVALID_INPUT = 3,
  /*
   A bug tripwire fired inside the library.
   */
  BGWP_STATUS_INTERNAL = 4,
  /*
   The library panicked; the handle may not be reused.
   */
  BGWP_STATUS_PANIC = 5,
} BgwpStatus;

/*
 Validated graph of groups.
 */
typedef struct BgwpGraph BgwpGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Parses and validates a JSON spec. On success `*out` owns a new handle.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum BgwpStatus bgwp_graph_from_json(const char *json, struct BgwpGraph **out);

/*
 Releases a handle; null is ignored.

 # Safety
 `g` must come from [`bgwp_graph_from_json`] and not be used afterwards.
 */
void bgwp_graph_free(struct BgwpGraph *g);

/*
 Decides whether `element` lies in the subgroup generated by
 `subgroup[0..subgroup_len]`; writes 1 (member) or 0 to `*out_member`.

 # Safety
 Pointers must be valid; `subgroup` must hold `subgroup_len` strings.
 */
enum BgwpStatus bgwp_decide(const struct BgwpGraph *g,
                            const char *const *subgroup,
                            size_t subgroup_len,
                            const char *element,
                            int32_t *out_member);

/*
 Word problem: writes 1 to `*out_trivial` iff `word` is the identity.

 # Safety
 Pointers must be valid.
 */
enum BgwpStatus bgwp_is_trivial(const struct BgwpGraph *g, const char *word, int32_t *out_trivial);

/*
 Brute-force search up to `depth` factors. `*out_report` receives
 `WITNESS "..."` or `NOT-FOUND-UP-TO(depth)`.

 # Safety
 Pointers must be valid; `subgroup` must hold `subgroup_len` strings.
 */
enum BgwpStatus bgwp_brute_member(const struct BgwpGraph *g,
                                  const char *const *subgroup,
                                  size_t subgroup_len,
                                  const char *element,
                                  size_t depth,
                                  char **out_report);

/*
 Compiles a chordal defining graph (JSON) into a spec (JSON) with its
 translation table.

 # Safety
 Pointers must be valid.
 */
enum BgwpStatus bgwp_compile_raag(const char *graph_json, char **out_spec_json);

/*
 Releases a string returned by this library; null is ignored.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void bgwp_string_free(char *s);

/*
 Message of the last failed call on this thread ("" after a success).
 Valid until the next `bgwp_*` call on the same thread.
 */
const char *bgwp_last_error(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* BENIGN_GWP_H */

#ifndef PA_SEED_H
#define PA_SEED_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum PaStatus {
  PA_STATUS_OK = 0,
  PA_STATUS_NULL_POINTER = 1,
  PA_STATUS_INVALID_ARGUMENT = 2,
  PA_STATUS_CAP_EXCEEDED = 3,
  PA_STATUS_PRECONDITION = 4,
  PA_STATUS_PARSE = 5,
  PA_STATUS_PANIC = 6,
} PaStatus;

/*
 Opaque decorated pattern tree.
 */
typedef struct PaDecoratedTree PaDecoratedTree;

/*
 Opaque unrooted tree.
 */
typedef struct PaTree PaTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failure on this thread; empty if none. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *pa_last_error(void);

/*
 # Safety
 `s` must come from this library and not have been freed.
 */
void pa_string_free(char *s);

/*
 Builds a tree on `n` vertices from `n - 1` edges stored as consecutive
 pairs in `edges`.

 # Safety
 `edges` must point to `2 * (n - 1)` values; `out` must be writable.
 */
enum PaStatus pa_tree_from_edges(uintptr_t n, const uintptr_t *edges, struct PaTree **out);

/*
 Parses the plain-text tree format.

 # Safety
 `text` must be a NUL-terminated string; `out` must be writable.
 */
enum PaStatus pa_tree_parse(const char *text, struct PaTree **out);

/*
 # Safety
 `tree` must be null or a live handle from this library.
 */
void pa_tree_free(struct PaTree *tree);

/*
 # Safety
 `tree` must be a live handle; `out` must be writable.
 */
enum PaStatus pa_tree_vertex_count(const struct PaTree *tree, uintptr_t *out);

/*
 Writes the tree's text form; release it with [`pa_string_free`].

 # Safety
 `tree` must be a live handle; `out` must be writable.
 */
enum PaStatus pa_tree_to_text(const struct PaTree *tree, char **out);

/*
 Grows an α-PA tree with `α = alpha_num / alpha_den` from `seed` to
 `n` vertices.

 # Safety
 `seed` must be a live handle; `out` must be writable.
 */
enum PaStatus pa_grow_abstract(const struct PaTree *seed,
                               uint64_t alpha_num,
                               uint64_t alpha_den,
                               uintptr_t n,
                               uint64_t rng_seed,
                               struct PaTree **out);

/*
 Decorates a copy of `tree` with `ell[0..len]`.

 # Safety
 `tree` must be a live handle, `ell` must point to `len` values and `out`
 must be writable.
 */
enum PaStatus pa_decorated_new(const struct PaTree *tree,
                               const uint32_t *ell,
                               uintptr_t len,
                               struct PaDecoratedTree **out);

/*
 # Safety
 `tau` must be null or a live handle from this library.
 */
void pa_decorated_free(struct PaDecoratedTree *tau);

/*
 `F_τ(tree)` as a decimal string.

 # Safety
 Handles must be live; `out` must be writable.
 */
enum PaStatus pa_count_f(const struct PaDecoratedTree *tau, const struct PaTree *tree, char **out);

/*
 Exact `E[F_τ(T_n)]` grown from `seed`, as a reduced fraction of decimal
 strings.

 # Safety
 Handles must be live; `out_num` and `out_den` must be writable.
 */
enum PaStatus pa_exact_expectation(const struct PaDecoratedTree *tau,
                                   const struct PaTree *seed,
                                   uint64_t alpha_num,
                                   uint64_t alpha_den,
                                   uintptr_t n,
                                   char **out_num,
                                   char **out_den);

/*
 Total-variation lower bound from two means and second moments.

 # Safety
 `out` must be writable.
 */
enum PaStatus pa_tv_lower_bound(double mean1, double mean2, double m2_1, double m2_2, double *out);

/*
 Whether `tau` is blind for two equal-size seeds.

 # Safety
 Handles must be live; `out` must be writable.
 */
enum PaStatus pa_is_blind(const struct PaTree *tau,
                          const struct PaTree *seed1,
                          const struct PaTree *seed2,
                          bool *out);

/*
 Runs the distinguishing pipeline and returns its JSON report.

 # Safety
 Handles must be live, `n_list` must point to `n_len` values and `out`
 must be writable.
 */
enum PaStatus pa_distinguish_json(const struct PaTree *seed1,
                                  const struct PaTree *seed2,
                                  uint64_t alpha_num,
                                  uint64_t alpha_den,
                                  const uintptr_t *n_list,
                                  uintptr_t n_len,
                                  uintptr_t replicates,
                                  uint64_t rng_seed,
                                  char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PA_SEED_H */

#ifndef PATHRULE_H
#define PATHRULE_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PathruleStatus {
  PATHRULE_STATUS_OK = 0,
  PATHRULE_STATUS_NULL_ARGUMENT = 1,
  PATHRULE_STATUS_INVALID_UTF8 = 2,
  PATHRULE_STATUS_IO = 3,
  PATHRULE_STATUS_PARSE = 4,
  PATHRULE_STATUS_UNKNOWN_NAME = 5,
  PATHRULE_STATUS_INVALID_ARGUMENT = 6,
  PATHRULE_STATUS_BUFFER_TOO_SMALL = 7,
  PATHRULE_STATUS_INTERNAL = 8,
} PathruleStatus;

typedef enum PathrulePathWeight {
  PATHRULE_PATH_WEIGHT_MARKOV = 0,
  PATHRULE_PATH_WEIGHT_LENGTH = 1,
  PATHRULE_PATH_WEIGHT_CONSTANT = 2,
} PathrulePathWeight;

typedef enum PathruleAggregation {
  PATHRULE_AGGREGATION_SUM = 0,
  PATHRULE_AGGREGATION_MAX = 1,
} PathruleAggregation;

/**
 * Loaded splits with their indexes.
 */
typedef struct PathruleGraph PathruleGraph;

/**
 * Rules grouped by head relation.
 */
typedef struct PathruleRuleBook PathruleRuleBook;

/**
 * Mining parameters. A count of 0 means unlimited.
 */
typedef struct PathruleMinerOptions {
  size_t max_len;
  size_t alpha;
  size_t beta;
  size_t answer_cap;
  uint64_t seed;
  enum PathrulePathWeight path_weight;
} PathruleMinerOptions;

typedef struct PathruleMetrics {
  double mrr;
  double hits1;
  double hits3;
  double hits10;
  size_t queries;
} PathruleMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *pathrule_version(void);

/**
 * Message of the last failed call on this thread. Returns the message
 * length; copies it when `buf` holds at least length + 1 bytes.
 *
 * # Safety
 * `buf` must be null or valid for `cap` bytes.
 */
size_t pathrule_last_error(char *buf, size_t cap);

/**
 * Loads tab-separated `subject relation object` files. `valid` and `test`
 * may be null.
 *
 * # Safety
 * Path arguments must be null or NUL-terminated strings; `out` must be
 * valid for writes.
 */
enum PathruleStatus pathrule_graph_load(const char *train,
                                        const char *valid,
                                        const char *test,
                                        struct PathruleGraph **out_graph);

/**
 * # Safety
 * `graph` must be null or a handle from `pathrule_graph_load` not yet freed.
 */
void pathrule_graph_free(struct PathruleGraph *graph);

/**
 * Entity, base relation and training fact counts (facts exclude inverses).
 *
 * # Safety
 * `graph` must be a live handle; output pointers may be null.
 */
enum PathruleStatus pathrule_graph_counts(const struct PathruleGraph *graph,
                                          size_t *entities,
                                          size_t *relations,
                                          size_t *train_facts);

/**
 * # Safety
 * `graph` must be a live handle, `name` a NUL-terminated string and `id`
 * valid for writes.
 */
enum PathruleStatus pathrule_entity_id(const struct PathruleGraph *graph,
                                       const char *name,
                                       uint32_t *id);

/**
 * Copies the name of entity `id` into `buf`. See [`pathrule_last_error`]
 * for the buffer convention; `needed` may be null.
 *
 * # Safety
 * `graph` must be a live handle and `buf` valid for `cap` bytes.
 */
enum PathruleStatus pathrule_entity_name(const struct PathruleGraph *graph,
                                         uint32_t id,
                                         char *buf,
                                         size_t cap,
                                         size_t *needed);

/**
 * Default mining parameters.
 */
struct PathruleMinerOptions pathrule_miner_options_default(void);

/**
 * Mines rules from the training split. `options` may be null for defaults.
 *
 * # Safety
 * `graph` must be a live handle, `options` null or valid, `out_book`
 * valid for writes.
 */
enum PathruleStatus pathrule_mine(const struct PathruleGraph *graph,
                                  const struct PathruleMinerOptions *options,
                                  struct PathruleRuleBook **out_book);

/**
 * Reads a rule TSV file against the graph's vocabulary.
 *
 * # Safety
 * `graph` must be a live handle, `path` a NUL-terminated string and
 * `out_book` valid for writes.
 */
enum PathruleStatus pathrule_rulebook_load(const struct PathruleGraph *graph,
                                           const char *path,
                                           struct PathruleRuleBook **out_book);

/**
 * Writes the rules as TSV.
 *
 * # Safety
 * Handles must be live and `path` a NUL-terminated string.
 */
enum PathruleStatus pathrule_rulebook_save(const struct PathruleGraph *graph,
                                           const struct PathruleRuleBook *book,
                                           const char *path);

/**
 * # Safety
 * `book` must be a live handle and `len` valid for writes.
 */
enum PathruleStatus pathrule_rulebook_len(const struct PathruleRuleBook *book, size_t *len);

/**
 * # Safety
 * `book` must be null or a live handle.
 */
void pathrule_rulebook_free(struct PathruleRuleBook *book);

/**
 * Ranks answers of `(subject, relation, ?)` with the top `k` rules per head
 * (0 = all). Writes up to `cap` entity ids and scores, best first, and the
 * number written to `written`. `relation` may name an inverse as `INV_r`.
 *
 * # Safety
 * Handles must be live, `relation` a NUL-terminated string, `entities` and
 * `scores` valid for `cap` elements, `written` valid for writes.
 */
enum PathruleStatus pathrule_predict(const struct PathruleGraph *graph,
                                     const struct PathruleRuleBook *book,
                                     uint32_t subject,
                                     const char *relation,
                                     size_t k,
                                     enum PathruleAggregation mode,
                                     uint32_t *entities,
                                     double *scores,
                                     size_t cap,
                                     size_t *written);

/**
 * Filtered MRR and Hits@{1,3,10} over the graph's test split.
 *
 * # Safety
 * Handles must be live and `metrics` valid for writes.
 */
enum PathruleStatus pathrule_evaluate(const struct PathruleGraph *graph,
                                      const struct PathruleRuleBook *book,
                                      size_t k,
                                      enum PathruleAggregation mode,
                                      struct PathruleMetrics *metrics);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PATHRULE_H */

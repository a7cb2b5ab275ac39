#ifndef GTF_H
#define GTF_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GtfStatus {
  GTF_STATUS_OK = 0,
  GTF_STATUS_NULL_ARGUMENT = 1,
  GTF_STATUS_INVALID_UTF8 = 2,
  GTF_STATUS_IO = 3,
  GTF_STATUS_INVALID_GRAPH = 4,
  GTF_STATUS_KEYWORD_NOT_FOUND = 5,
  GTF_STATUS_TOO_FEW_KEYWORDS = 6,
  GTF_STATUS_QUEUE_CAP_EXCEEDED = 7,
  GTF_STATUS_OUT_OF_RANGE = 8,
  GTF_STATUS_INTERNAL = 9,
} GtfStatus;

typedef enum GtfEngine {
  GTF_ENGINE_GTF = 0,
  GTF_ENGINE_NAIVE = 1,
} GtfEngine;

/**
 * A loaded, keyword-augmented graph.
 */
typedef struct GtfGraph GtfGraph;

/**
 * Answers of one query, in emission order.
 */
typedef struct GtfResult GtfResult;

typedef struct GtfQueryOptions {
  enum GtfEngine engine;
  /**
   * 0 means all answers.
   */
  size_t top_k;
  size_t queue_cap;
  bool essential;
} GtfQueryOptions;

typedef struct GtfRunStats {
  uint64_t pops;
  uint64_t inserts;
  uint64_t freezes;
  uint64_t unfreezes;
  uint64_t constructed_paths;
  uint64_t discarded_cyclic;
  uint64_t answers_emitted;
  uint64_t kroots_discovered;
  uint64_t wall_time_ns;
} GtfRunStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the last failed call on this thread, or null. Valid
 * until the next failing call on the same thread.
 */
const char *gtf_last_error(void);

/**
 * Parses a graph document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GtfStatus gtf_graph_from_json(const char *json, struct GtfGraph **out);

/**
 * Loads a graph document from a file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GtfStatus gtf_graph_load(const char *path, struct GtfGraph **out);

/**
 * # Safety
 * `graph` must come from this library and not be used afterwards.
 */
void gtf_graph_free(struct GtfGraph *graph);

/**
 * Node count including keyword nodes; 0 for a null graph.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t gtf_graph_node_count(const struct GtfGraph *graph);

struct GtfQueryOptions gtf_default_options(void);

/**
 * Runs a query given as comma-separated keywords. `options` may be null
 * for the defaults.
 *
 * # Safety
 * `graph` must be a live handle, `keywords` a NUL-terminated string and
 * `out` a valid pointer.
 */
enum GtfStatus gtf_query(const struct GtfGraph *graph,
                         const char *keywords,
                         const struct GtfQueryOptions *options,
                         struct GtfResult **out);

/**
 * Number of answers; 0 for a null result.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
size_t gtf_result_len(const struct GtfResult *result);

/**
 * Height and total weight of answer `index`, in thousandths.
 *
 * # Safety
 * `result` must be a live handle; the out pointers may be null.
 */
enum GtfStatus gtf_result_weights(const struct GtfResult *result,
                                  size_t index,
                                  uint64_t *height_milli,
                                  uint64_t *weight_milli);

/**
 * Root label of answer `index`. The string lives as long as `result`.
 *
 * # Safety
 * `result` must be a live handle and `out` a valid pointer.
 */
enum GtfStatus gtf_result_root(const struct GtfResult *result, size_t index, const char **out);

/**
 * Answer `index` as a JSON line. The string lives as long as `result`.
 *
 * # Safety
 * `result` must be a live handle and `out` a valid pointer.
 */
enum GtfStatus gtf_result_json(const struct GtfResult *result, size_t index, const char **out);

/**
 * # Safety
 * `result` must be a live handle and `out` a valid pointer.
 */
enum GtfStatus gtf_result_stats(const struct GtfResult *result, struct GtfRunStats *out);

/**
 * # Safety
 * `result` must come from this library and not be used afterwards.
 */
void gtf_result_free(struct GtfResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GTF_H */

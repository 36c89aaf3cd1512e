#ifndef GNNCOST_H
#define GNNCOST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum GncStatus {
  GNC_STATUS_OK = 0,
  GNC_STATUS_NULL_POINTER = 1,
  GNC_STATUS_INVALID_UTF8 = 2,
  GNC_STATUS_PARSE = 3,
  GNC_STATUS_EMPTY_GRAPH = 4,
  GNC_STATUS_INVALID_ARGUMENT = 5,
  GNC_STATUS_IO = 6,
  GNC_STATUS_MISSING_FILE = 7,
  GNC_STATUS_FORMAT = 8,
  GNC_STATUS_VERSION = 9,
  GNC_STATUS_INTERNAL = 10,
} GncStatus;

typedef enum GncModelKind {
  GNC_MODEL_KIND_GCN = 0,
  GNC_MODEL_KIND_GIN = 1,
  GNC_MODEL_KIND_GAT = 2,
  GNC_MODEL_KIND_SAGE = 3,
} GncModelKind;

typedef enum GncRepresentation {
  GNC_REPRESENTATION_SPARSE = 0,
  GNC_REPRESENTATION_EDGE_LIST = 1,
} GncRepresentation;

/**
 * Opaque graph handle.
 */
typedef struct GncGraph GncGraph;

/**
 * Opaque fitted-model handle.
 */
typedef struct GncModel GncModel;

/**
 * Graph metrics as plain values. `clustering_exact` records how
 * `mean_clustering` was obtained.
 */
typedef struct GncMetrics {
  uint64_t node_count;
  uint64_t edge_count;
  double density;
  uint64_t max_degree;
  uint64_t min_degree;
  double mean_degree;
  double mean_clustering;
  bool clustering_exact;
} GncMetrics;

/**
 * Message for the last failed call on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *gnc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gnc_version(void);

/**
 * Parses edge-list text (one `u v` pair per line).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GncStatus gnc_graph_parse(const char *text, struct GncGraph **out);

/**
 * Reads and parses an edge-list file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GncStatus gnc_graph_load(const char *path, struct GncGraph **out);

/**
 * # Safety
 * `graph` must come from `gnc_graph_parse`/`gnc_graph_load` or be null.
 */
void gnc_graph_free(struct GncGraph *graph);

/**
 * Node count, or 0 for a null handle.
 *
 * # Safety
 * `graph` must be a live handle or null.
 */
size_t gnc_graph_node_count(const struct GncGraph *graph);

/**
 * Edge count, or 0 for a null handle.
 *
 * # Safety
 * `graph` must be a live handle or null.
 */
size_t gnc_graph_edge_count(const struct GncGraph *graph);

/**
 * Computes graph metrics. With `exact` false, clustering is estimated from
 * `trials` sampled wedges seeded by `seed`.
 *
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
enum GncStatus gnc_graph_metrics(const struct GncGraph *graph,
                                 bool exact,
                                 size_t trials,
                                 uint64_t seed,
                                 struct GncMetrics *out);

/**
 * Loads a fitted model from its JSON file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GncStatus gnc_model_load(const char *path, struct GncModel **out);

/**
 * Builds a fitted model from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GncStatus gnc_model_from_json(const char *json, struct GncModel **out);

/**
 * # Safety
 * `model` must come from `gnc_model_load`/`gnc_model_from_json` or be null.
 */
void gnc_model_free(struct GncModel *model);

/**
 * Model kind and representation the model was fitted for.
 *
 * # Safety
 * `model` must be a live handle; `kind` and `repr` valid pointers.
 */
enum GncStatus gnc_model_design(const struct GncModel *model,
                                enum GncModelKind *kind,
                                enum GncRepresentation *repr);

/**
 * Predicted per-epoch time in milliseconds, never negative.
 *
 * # Safety
 * `model` must be a live handle; `metrics` and `out_ms` valid pointers.
 */
enum GncStatus gnc_model_predict(const struct GncModel *model,
                                 const struct GncMetrics *metrics,
                                 double *out_ms);

/**
 * Faster representation for the given predictions; a tie picks sparse.
 */
enum GncRepresentation gnc_choose_repr(double pred_sparse_ms, double pred_edge_list_ms);

#endif  /* GNNCOST_H */

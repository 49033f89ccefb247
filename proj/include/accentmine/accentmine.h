// Copyright 2026 The accentmine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the accentmine library.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an am_status; on
 * failure am_last_error() describes the problem for the calling thread.
 * Strings returned through char** out-parameters are released with
 * am_string_free. Configs and summaries are passed as JSON text.
 */
#ifndef ACCENTMINE_H_
#define ACCENTMINE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ACCENTMINE_BUILDING)
#    define AM_API __declspec(dllexport)
#  else
#    define AM_API __declspec(dllimport)
#  endif
#else
#  define AM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status values double as process exit codes in the CLI. */
typedef enum am_status {
  AM_OK = 0,
  AM_ERR_INTERNAL = 1,
  AM_ERR_VALIDATION = 2,
  AM_ERR_IO = 3,
  AM_ERR_DATA = 4
} am_status;

typedef struct am_corpus am_corpus;
typedef struct am_model am_model;
typedef struct am_clustering am_clustering;
typedef struct am_centroids am_centroids;

AM_API const char* am_version(void);
AM_API const char* am_last_error(void);
AM_API void am_string_free(char* str);

/* Corpus ------------------------------------------------------------------ */

/* synth_json: {"dim", "frames_per_utt", "seed", "groups": [{"label",
 * "count", "mean" | omitted with "mean_spacing", "stdev"}]} */
AM_API am_status am_corpus_synthesize(const char* synth_json, am_corpus** out);
AM_API am_status am_corpus_load(const char* manifest_path, am_corpus** out);
AM_API am_status am_corpus_save(const am_corpus* corpus, const char* manifest_path);
AM_API size_t am_corpus_size(const am_corpus* corpus);
/* {"records": n, "groups": {label: count}, "unlabeled": n} */
AM_API am_status am_corpus_summary(const am_corpus* corpus, char** json_out);
AM_API void am_corpus_free(am_corpus* corpus);

/* Training ---------------------------------------------------------------- */

AM_API am_status am_train(const am_corpus* corpus, const char* train_json, am_model** model_out,
                          char** report_json_out);
AM_API am_status am_model_save(const am_model* model, const char* params_path);
AM_API am_status am_model_load(const char* params_path, am_model** out);
AM_API void am_model_free(am_model* model);

/* Evaluation -------------------------------------------------------------- */

/* Writes the report JSON and confusion CSV; report_json_out may be NULL. */
AM_API am_status am_evaluate(const am_model* model, const am_corpus* corpus,
                             const char* report_json_path, const char* confusion_csv_path,
                             char** report_json_out);

/* Clustering -------------------------------------------------------------- */

/* cluster_json: {"k", "alpha", "batch_size", "epochs", "seed"} */
AM_API am_status am_cluster_run(const am_model* encoder, const am_corpus* corpus,
                                const char* cluster_json, am_clustering** out);
AM_API am_status am_clustering_save(const am_clustering* clustering, const char* centroids_path,
                                    const char* assignments_path);
AM_API am_status am_clustering_summary(const am_clustering* clustering, char** json_out);
AM_API void am_clustering_free(am_clustering* clustering);

AM_API am_status am_centroids_load(const char* centroids_path, am_centroids** out);
AM_API void am_centroids_free(am_centroids* centroids);

/* Mining ------------------------------------------------------------------ */

/* plan_json: {"source": "label:<g>" | "cluster:<i>" | "random",
 * "target_size", "seed", "exclude_group"?}. label sources need `model`,
 * cluster sources need `model` and `centroids`; random needs neither.
 * anchor may be NULL when anchor_count is 0. */
AM_API am_status am_mine(const am_corpus* corpus, const char* plan_json, const am_model* model,
                         const am_centroids* centroids, const am_corpus* anchor,
                         size_t anchor_count, am_corpus** mined_out, char** summary_json_out);

/* Downsamples `count` corpora to the smallest size; outs receives `count`
 * new handles. */
AM_API am_status am_size_match(const am_corpus* const* inputs, size_t count, uint64_t seed,
                               am_corpus** outs);

/* Projection -------------------------------------------------------------- */

/* CSV utt_id,x,y,group; embeddings_path (optional) receives the raw
 * embeddings in the binary embedding format. */
AM_API am_status am_project(const am_model* encoder, const am_corpus* corpus,
                            const char* csv_path, const char* embeddings_path);

#ifdef __cplusplus
}
#endif

#endif /* ACCENTMINE_H_ */

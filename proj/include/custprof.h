/*
 * C API for the customer profiling toolkit.
 *
 * Every function returning int yields one of the CUSTPROF_* codes below;
 * custprof_last_error() describes the most recent failure on the calling
 * thread. Handles are opaque and owned by the caller until passed to the
 * matching *_free function.
 */
#ifndef CUSTPROF_H
#define CUSTPROF_H

#include <stddef.h>
#include <stdint.h>

#if defined(CUSTPROF_BUILD_SHARED) && defined(__GNUC__)
#define CUSTPROF_API __attribute__((visibility("default")))
#else
#define CUSTPROF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define CUSTPROF_OK 0
#define CUSTPROF_ERR_INTERNAL 1
#define CUSTPROF_ERR_CONFIG 2
#define CUSTPROF_ERR_DATA 3
#define CUSTPROF_ERR_NUMERIC 4

typedef struct custprof_dataset custprof_dataset;
typedef struct custprof_matrix custprof_matrix;
typedef struct custprof_kmeans custprof_kmeans;
typedef struct custprof_model custprof_model;

CUSTPROF_API const char* custprof_version(void);

/* Message for the last failing call on this thread; empty string if none. */
CUSTPROF_API const char* custprof_last_error(void);

/* Frees strings returned through char** out parameters. */
CUSTPROF_API void custprof_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Pipeline: command is one of clean|rfm|cluster|train|evaluate|profile.
 * config_json is the full pipeline config document. out_dir may be NULL
 * (config / CUSTPROF_OUT decide); seed_override applies when has_seed is
 * nonzero. Returns an exit-code-compatible status. */
CUSTPROF_API int custprof_run(const char* command, const char* config_json, const char* out_dir,
                 uint64_t seed_override, int has_seed, int verbose);

/* ------------------------------------------------------------------ */
/* Datasets. schema_preset: table2|table3|merged. */
CUSTPROF_API int custprof_dataset_load(const char* path, const char* schema_preset, char delimiter,
                          custprof_dataset** out);
CUSTPROF_API void custprof_dataset_free(custprof_dataset* ds);
CUSTPROF_API int64_t custprof_dataset_rows(const custprof_dataset* ds);
CUSTPROF_API int64_t custprof_dataset_cols(const custprof_dataset* ds);
CUSTPROF_API int custprof_dataset_write_csv(const custprof_dataset* ds, const char* path);

/* ------------------------------------------------------------------ */
/* Dense row-major matrices. */
CUSTPROF_API int custprof_matrix_create(int64_t rows, int64_t cols, const double* values,
                           custprof_matrix** out);
CUSTPROF_API void custprof_matrix_free(custprof_matrix* m);
CUSTPROF_API int64_t custprof_matrix_rows(const custprof_matrix* m);
CUSTPROF_API int64_t custprof_matrix_cols(const custprof_matrix* m);

/* ------------------------------------------------------------------ */
/* K-means. measure: euclidean|l1_distortion|cosine_distance|pearson_distance. */
CUSTPROF_API int custprof_kmeans_fit(const custprof_matrix* m, int64_t k, const char* measure, uint64_t seed,
                        int64_t max_iter, double tol, custprof_kmeans** out);
CUSTPROF_API void custprof_kmeans_free(custprof_kmeans* model);
CUSTPROF_API double custprof_kmeans_wcss(const custprof_kmeans* model);
CUSTPROF_API int64_t custprof_kmeans_iterations(const custprof_kmeans* model);
/* centroids_out must hold k * cols doubles. */
CUSTPROF_API int custprof_kmeans_centroids(const custprof_kmeans* model, double* centroids_out);
/* labels_out must hold one int per matrix row. */
CUSTPROF_API int custprof_kmeans_assign(const custprof_kmeans* model, const custprof_matrix* m,
                           int* labels_out);

/* ------------------------------------------------------------------ */
/* Classifiers. spec_json matches the model objects of the pipeline config,
 * e.g. {"family":"gbt","n_trees":100,"depth":3}. labels are 0/1 ints, one
 * per matrix row. */
CUSTPROF_API int custprof_model_fit(const char* spec_json, const custprof_matrix* train, const int* labels,
                       custprof_model** out);
CUSTPROF_API void custprof_model_free(custprof_model* model);
/* probabilities_out must hold one double per matrix row. */
CUSTPROF_API int custprof_model_predict(const custprof_model* model, const custprof_matrix* m,
                           double* probabilities_out);
CUSTPROF_API int custprof_model_to_json(const custprof_model* model, char** json_out);
CUSTPROF_API int custprof_model_from_json(const char* json, custprof_model** out);

/* ------------------------------------------------------------------ */
/* Metrics. */
CUSTPROF_API double custprof_mcc(int64_t tp, int64_t fp, int64_t tn, int64_t fn);

#ifdef __cplusplus
}
#endif

#endif /* CUSTPROF_H */

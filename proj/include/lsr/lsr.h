#ifndef LSR_H
#define LSR_H

/* C interface to the sparse retrieval library. Every function returns an
 * lsr_status; on failure lsr_last_error() describes the error for the calling
 * thread. Handles are opaque and owned by the caller once created. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LSR_API __declspec(dllexport)
#else
#define LSR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lsr_status {
    LSR_OK = 0,
    LSR_INVALID_ARGUMENT = 1,
    LSR_IO = 2,
    LSR_FORMAT = 3,
    LSR_UNSUPPORTED = 4,
    LSR_INTERNAL = 5
} lsr_status;

typedef struct lsr_dataset lsr_dataset;
typedef struct lsr_seismic lsr_seismic;
typedef struct lsr_hnsw lsr_hnsw;

typedef struct lsr_result {
    uint32_t doc;
    float score;
} lsr_result;

/* Message for the last failed call on this thread; "" after success. */
LSR_API const char* lsr_last_error(void);
LSR_API const char* lsr_version(void);

/* ---- datasets ---- */

typedef struct lsr_synth_params {
    uint64_t n;
    uint64_t dim;
    double doc_nnz;
    double query_nnz;
    uint64_t n_queries;
    uint64_t seed;
    double zipf_exponent;
    uint32_t topics;
    double topic_share;
    double value_mu;
    double value_sigma;
} lsr_synth_params;

LSR_API void lsr_synth_params_default(lsr_synth_params* p);
LSR_API lsr_status lsr_synth(const lsr_synth_params* p, lsr_dataset** docs, lsr_dataset** queries);

/* Arrays are copied. offsets has n_rows + 1 entries. */
LSR_API lsr_status lsr_dataset_create(const uint64_t* offsets, uint64_t n_rows, const uint32_t* ids,
                                      const float* values, uint64_t dim, lsr_dataset** out);
LSR_API lsr_status lsr_dataset_read(const char* path, lsr_dataset** out);
LSR_API lsr_status lsr_dataset_write(const lsr_dataset* d, const char* path);
LSR_API void lsr_dataset_free(lsr_dataset* d);
LSR_API uint64_t lsr_dataset_rows(const lsr_dataset* d);
LSR_API uint64_t lsr_dataset_dim(const lsr_dataset* d);
LSR_API uint64_t lsr_dataset_nnz(const lsr_dataset* d);
/* Footprint used as the index-size budget yardstick. */
LSR_API uint64_t lsr_dataset_storage_bytes(const lsr_dataset* d);

/* Exact top-k of every query, written as a ground-truth file. */
LSR_API lsr_status lsr_ground_truth(const lsr_dataset* docs, const lsr_dataset* queries, uint32_t k,
                                    unsigned workers, const char* path);

/* ---- seismic ---- */

typedef struct lsr_seismic_params {
    uint32_t lambda;
    uint32_t beta;
    double alpha;
    uint64_t seed;
    int l2_energy; /* 0 = L1 mass, 1 = squared L2 mass */
} lsr_seismic_params;

LSR_API void lsr_seismic_params_default(lsr_seismic_params* p);
LSR_API lsr_status lsr_seismic_build(const lsr_dataset* d, const lsr_seismic_params* p, unsigned workers,
                                     lsr_seismic** out);
/* exact != 0 uses brute force; otherwise the graph is built by querying `index`
 * with every document (cut, heap_factor). */
LSR_API lsr_status lsr_seismic_build_knn(lsr_seismic* index, uint32_t kappa, int exact, uint32_t cut,
                                         double heap_factor, unsigned workers);
LSR_API lsr_status lsr_seismic_search(const lsr_seismic* index, const uint32_t* ids, const float* values,
                                      size_t nnz, uint32_t k, uint32_t cut, double heap_factor, int use_knn,
                                      lsr_result* out, size_t* n_out);
LSR_API lsr_status lsr_seismic_save(const lsr_seismic* index, const char* path);
LSR_API lsr_status lsr_seismic_load(const char* path, lsr_seismic** out);
LSR_API uint64_t lsr_seismic_size_bytes(const lsr_seismic* index);
LSR_API uint64_t lsr_seismic_knn_bytes(const lsr_seismic* index);
LSR_API void lsr_seismic_free(lsr_seismic* index);

/* ---- hnsw ---- */

LSR_API lsr_status lsr_hnsw_build(const lsr_dataset* d, uint32_t m, uint32_t ef_construction, uint64_t seed,
                                  lsr_hnsw** out);
LSR_API lsr_status lsr_hnsw_search(const lsr_hnsw* index, const uint32_t* ids, const float* values, size_t nnz,
                                   uint32_t k, uint32_t ef_search, double qprune, lsr_result* out, size_t* n_out);
LSR_API lsr_status lsr_hnsw_save(const lsr_hnsw* index, const char* path);
LSR_API lsr_status lsr_hnsw_load(const char* path, lsr_hnsw** out);
LSR_API uint64_t lsr_hnsw_size_bytes(const lsr_hnsw* index);
LSR_API void lsr_hnsw_free(lsr_hnsw* index);

/* ---- evaluation protocol ---- */

/* Runs the sweep described by a JSON config file. Optional overrides are
 * applied when non-NULL / non-zero. n_rows receives the number of results. */
typedef struct lsr_run_overrides {
    const char* dataset;
    const char* queries;
    const char* ground_truth;
    const char* algorithm;
    const char* output;
    double budget;    /* 0 keeps the config value */
    uint32_t k;       /* 0 keeps the config value */
    uint64_t seed;
    int has_seed;
    int workers;      /* -1 keeps the config value */
} lsr_run_overrides;

LSR_API void lsr_run_overrides_default(lsr_run_overrides* o);
/* config_path may be NULL when o->algorithm is set: the default grid is used. */
LSR_API lsr_status lsr_run(const char* config_path, const lsr_run_overrides* o, size_t* n_rows,
                           size_t* n_budget_violations);

/* Reads a results CSV, keeps rows within budget * dataset_bytes, and writes
 * the per-algorithm Pareto frontier (frontier_path) and best latency at the
 * default accuracy cutoffs (best_time_path). Either path may be NULL. */
LSR_API lsr_status lsr_pareto(const char* results_path, uint64_t dataset_bytes, double budget,
                              const char* frontier_path, const char* best_time_path);

/* Joins two best-time CSVs into a scaling CSV (large / small latency). */
LSR_API lsr_status lsr_scaling(const char* large_best_time, const char* small_best_time, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif

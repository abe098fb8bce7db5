#pragma once

// On-disk formats: CSR datasets, ground truth, and the run configuration.
//
// CSR file (little-endian, no padding):
//   u64 n_rows, u64 n_cols, u64 nnz,
//   u64 indptr[n_rows + 1], u32 indices[nnz], f32 values[nnz]
//
// Ground-truth file (little-endian, no padding):
//   u32 n_queries, u32 k,
//   u32 ids[n_queries * k]     (row-major, best first)
//   f32 scores[n_queries * k]

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lsr/sparse.hpp"

namespace lsr {

Dataset read_csr(const std::filesystem::path& path);
void write_csr(const Dataset& dataset, const std::filesystem::path& path);

struct GroundTruth {
    std::uint32_t n_queries = 0;
    std::uint32_t k = 0;
    std::vector<DocId> ids;    // n_queries * k, row-major
    std::vector<float> scores; // n_queries * k

    std::span<const DocId> ids_of(std::size_t q) const { return std::span(ids).subspan(q * k, k); }
    std::span<const float> scores_of(std::size_t q) const { return std::span(scores).subspan(q * k, k); }

    /// Throws unless k >= 1, sizes agree, scores are non-increasing and ids
    /// are distinct within every query.
    void validate() const;

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

/// Reads and validates. If `expected_k` is set, a different k is rejected.
GroundTruth read_ground_truth(const std::filesystem::path& path, std::optional<std::uint32_t> expected_k = {});
void write_ground_truth(const GroundTruth& gt, const std::filesystem::path& path);

struct SeismicGridConfig {
    std::vector<std::uint32_t> lambda;
    // Multiplies every lambda before building. Lambda is an absolute posting
    // count, so collections much smaller than the reference need it scaled.
    double lambda_scale = 1.0;
    double beta_ratio = 0.1;
    double alpha = 0.4;
    // kNN graph sizes to evaluate; 0 stands for "no graph".
    std::vector<std::uint32_t> knn;
    std::string knn_mode = "approx";
    std::uint32_t knn_lambda = 60000;
    std::uint32_t knn_cut = 20;
    double knn_heap_factor = 0.6;
    std::vector<std::uint32_t> cut;
    std::vector<double> heap_factor;
};

struct HnswGridConfig {
    std::vector<std::uint32_t> m;
    std::uint32_t ef_construction = 500;
    std::vector<std::uint32_t> ef_search;
    double qprune = 0.0;
};

struct RunConfig {
    std::string dataset;
    std::string queries;
    std::string ground_truth;
    std::string algorithm;  // "seismic" or "hnsw"
    std::uint64_t seed = 42;
    SeismicGridConfig seismic;
    HnswGridConfig hnsw;
    double budget = 1.5;
    std::uint32_t k = 10;
    std::string output;
    std::string dataset_tag = "desk";
    unsigned workers = 0;   // 0 = all hardware threads
    bool off_grid = false;  // permits values outside the default grids

    /// Config populated with the default grids for `algorithm`.
    static RunConfig defaults(const std::string& algorithm);

    /// Rejects unknown keys and, unless off_grid is set, values outside the
    /// default grids.
    static RunConfig parse(const std::string& json_text);
    static RunConfig load(const std::filesystem::path& path);

    void validate() const;
    std::string to_json() const;
};

}  // namespace lsr

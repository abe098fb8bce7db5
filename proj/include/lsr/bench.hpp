#pragma once

// Evaluation protocol: synthetic collections, grid sweeps, index-size budget
// filtering, Pareto frontiers, best latency at accuracy cutoffs, and
// latency scaling ratios between two collections.
//
// Results CSV header (fixed, version 1):
//   algorithm,build_params,query_params,k,accuracy,mean_latency_us,index_bytes,build_seconds,dataset_tag
// Best-time CSV header:
//   algorithm,cutoff,found,build_params,query_params,accuracy,mean_latency_us,index_bytes
// Scaling CSV header:
//   algorithm,cutoff,large_latency_us,small_latency_us,ratio
// Absent values are written as empty fields.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lsr/io.hpp"
#include "lsr/sparse.hpp"

namespace lsr {

struct SynthParams {
    std::uint64_t n = 10000;
    std::uint64_t dim = 30000;
    double doc_nnz = 127.0;
    double query_nnz = 44.0;
    std::uint64_t n_queries = 200;
    std::uint64_t seed = 7;
    double zipf_exponent = 1.0;  // component popularity
    std::uint32_t topics = 64;
    double topic_share = 0.6;    // fraction of draws from the topic's own ranking
    double value_mu = -0.5;      // log-normal value distribution
    double value_sigma = 1.5;
};

/// Non-negative documents and queries with Zipf-distributed component
/// popularity, log-normal values and Poisson nnz per vector. Values are
/// rounded to half precision so index storage is lossless.
std::pair<Dataset, Dataset> synth_dataset(const SynthParams& p);

struct ResultRow {
    std::string algorithm;
    std::string build_params;
    std::string query_params;
    std::uint32_t k = 10;
    double accuracy = 0.0;
    double mean_latency_us = 0.0;
    std::uint64_t index_bytes = 0;
    double build_seconds = 0.0;
    std::string dataset_tag;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

extern const char* const kResultsHeader;
extern const char* const kBestTimeHeader;
extern const char* const kScalingHeader;

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

/// Rows with index_bytes <= multiplier * dataset_bytes.
std::vector<ResultRow> budget_filter(const std::vector<ResultRow>& rows, std::uint64_t dataset_bytes,
                                     double multiplier);

/// Rows not dominated in the (accuracy up, latency down) plane, sorted by
/// latency. b dominates a when it is at least as accurate and strictly
/// faster, or strictly more accurate and no slower.
std::vector<ResultRow> pareto_frontier(const std::vector<ResultRow>& rows);

struct BestTime {
    std::string algorithm;
    int cutoff = 0;
    std::optional<ResultRow> row;
};

/// For each cutoff c, the fastest row with accuracy >= c / 100. Latency ties
/// go to the earlier row.
std::vector<BestTime> best_time_at_accuracy(const std::vector<ResultRow>& rows, const std::vector<int>& cutoffs);

void write_best_time_csv(const std::vector<BestTime>& best, const std::filesystem::path& path);
std::vector<BestTime> read_best_time_csv(const std::filesystem::path& path);

struct ScalingRatio {
    std::string algorithm;
    int cutoff = 0;
    std::optional<double> large_us;
    std::optional<double> small_us;
    std::optional<double> ratio;
};

/// Pairs cutoffs by (algorithm, cutoff); ratio = large / small latency.
std::vector<ScalingRatio> scaling_ratios(const std::vector<BestTime>& large, const std::vector<BestTime>& small);
void write_scaling_csv(const std::vector<ScalingRatio>& ratios, const std::filesystem::path& path);
std::vector<ScalingRatio> read_scaling_csv(const std::filesystem::path& path);

/// Splits rows by algorithm, keeping first-appearance order.
std::vector<std::pair<std::string, std::vector<ResultRow>>> group_by_algorithm(const std::vector<ResultRow>& rows);

struct BudgetTables {
    std::vector<ResultRow> frontier;  // per-algorithm frontiers, concatenated
    std::vector<BestTime> best;       // per-algorithm best times, concatenated
};

/// Splits rows by algorithm, keeps those within budget * dataset_bytes and
/// computes each algorithm's frontier and best times. An algorithm with no
/// row inside the budget still gets one absent best-time row per cutoff.
BudgetTables budget_tables(const std::vector<ResultRow>& rows, std::uint64_t dataset_bytes, double budget,
                           const std::vector<int>& cutoffs);

/// Formats a double the way the CSV writer does.
std::string format_number(double v, int precision);

struct RunOutputs {
    std::vector<ResultRow> rows;
    std::vector<std::string> budget_violations;
};

/// Executes a configured sweep on already-loaded data. Builds use
/// `config.workers`; every query is timed on the calling thread after one
/// untimed warm-up pass over the query set. Writes the results CSV, a
/// per-query latency dump (<output>.latency.csv) and the budget log
/// (<output>.budget.log) when config.output is non-empty.
RunOutputs run(const RunConfig& config, const Dataset& dataset, const Dataset& queries, const GroundTruth& gt);

/// Loads the files named in the config, then runs.
RunOutputs run(const RunConfig& config);

}  // namespace lsr

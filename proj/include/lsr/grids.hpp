#pragma once

// Default hyperparameter grids of the evaluation protocol.

#include <cstdint>
#include <vector>

namespace lsr::grids {

inline std::vector<std::uint32_t> seismic_lambda() { return {30000, 40000, 50000, 60000, 70000, 80000, 90000}; }
inline constexpr double seismic_alpha = 0.4;
inline constexpr double seismic_beta_ratio = 0.1;  // blocks per list = lambda / 10
inline std::vector<std::uint32_t> seismic_knn() { return {10, 20}; }

// The approximate kNN graph is computed with its own Seismic index.
inline constexpr std::uint32_t knn_lambda = 60000;
inline constexpr std::uint32_t knn_cut = 20;
inline constexpr double knn_heap_factor = 0.6;

inline std::vector<std::uint32_t> seismic_cut() { return {2, 4, 6, 8, 10, 12, 14}; }
inline std::vector<double> seismic_heap_factor() { return {0.6, 0.7, 0.8, 0.9, 1.0}; }

inline std::vector<std::uint32_t> hnsw_m() { return {16, 32, 64}; }
inline constexpr std::uint32_t hnsw_ef_construction = 500;

inline std::vector<std::uint32_t> hnsw_ef_search() {
    std::vector<std::uint32_t> out;
    for (std::uint32_t e = 10; e <= 50; e += 5) out.push_back(e);
    for (std::uint32_t e = 60; e <= 100; e += 10) out.push_back(e);
    for (std::uint32_t e = 200; e <= 1500; e += 100) out.push_back(e);
    return out;
}

inline std::vector<int> accuracy_cutoffs() { return {90, 91, 92, 93, 94, 95, 96, 97, 98}; }
inline std::vector<double> budgets() { return {1.5, 2.0}; }

inline constexpr std::uint32_t default_k = 10;

}  // namespace lsr::grids

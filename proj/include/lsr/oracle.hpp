#pragma once

// Exact brute-force top-k maximum inner product search.

#include <vector>

#include "lsr/io.hpp"
#include "lsr/sparse.hpp"

namespace lsr {

/// The k documents with the largest dot(query, doc), best first, ties broken
/// by smaller doc id. Rejects k == 0 and k > n.
std::vector<ScoredDoc> exact_topk(const Dataset& dataset, SparseView query, std::size_t k);

/// Runs exact_topk for every query. Parallel over queries only; the output
/// does not depend on `workers` (0 = all hardware threads).
GroundTruth exact_topk_batch(const Dataset& dataset, const Dataset& queries, std::size_t k, unsigned workers = 1);

}  // namespace lsr

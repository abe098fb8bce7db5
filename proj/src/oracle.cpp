#include "lsr/oracle.hpp"

#include <string>

#include "lsr/parallel.hpp"

namespace lsr {

namespace {

std::vector<ScoredDoc> topk_with(const Dataset& dataset, DenseQuery& scratch, SparseView query, std::size_t k) {
    scratch.load(query);
    TopKHeap heap(k);
    for (std::size_t d = 0; d < dataset.size(); ++d)
        heap.push({static_cast<DocId>(d), scratch.score(dataset[d])});
    scratch.clear();
    return heap.sorted();
}

void check_k(const Dataset& dataset, std::size_t k) {
    require(k >= 1, "exact_topk: k must be at least 1");
    require(k <= dataset.size(), "exact_topk: k=" + std::to_string(k) + " exceeds collection size " +
                                     std::to_string(dataset.size()));
}

}  // namespace

std::vector<ScoredDoc> exact_topk(const Dataset& dataset, SparseView query, std::size_t k) {
    check_k(dataset, k);
    DenseQuery scratch(dataset.dim());
    return topk_with(dataset, scratch, query, k);
}

GroundTruth exact_topk_batch(const Dataset& dataset, const Dataset& queries, std::size_t k, unsigned workers) {
    require(k >= 1, "exact_topk: k must be at least 1");
    GroundTruth gt;
    gt.n_queries = static_cast<std::uint32_t>(queries.size());
    gt.k = static_cast<std::uint32_t>(k);
    if (queries.empty()) return gt;
    check_k(dataset, k);
    gt.ids.resize(queries.size() * k);
    gt.scores.resize(queries.size() * k);
    std::vector<DenseQuery> scratch(effective_workers(queries.size(), workers), DenseQuery(dataset.dim()));
    parallel_for(queries.size(), workers, [&](std::size_t q, unsigned w) {
        const auto res = topk_with(dataset, scratch[w], queries[q], k);
        for (std::size_t i = 0; i < k; ++i) {
            gt.ids[q * k + i] = res[i].doc;
            gt.scores[q * k + i] = res[i].score;
        }
    });
    return gt;
}

}  // namespace lsr

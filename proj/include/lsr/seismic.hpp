#pragma once

// Blocked inverted index with summary-based block skipping.
//
// Every inverted list keeps only its `lambda` highest-valued postings. The
// survivors are clustered into at most `beta` blocks of similar documents,
// and each block carries a summary vector: the coordinate-wise maximum of
// its members, pruned to the smallest set of top coordinates holding an
// `alpha` fraction of the mass. Query processing walks the lists of the
// `cut` largest query components. A block is scored exactly (through the
// forward index) only while the heap is under-full or while
// heap_factor * dot(query, summary) beats the current k-th score. An
// optional kNN graph widens the final candidate set before a last exact
// rescoring pass.
//
// Serialized layout (little-endian):
//   header   : magic "LSRSEIS\0", u32 version, u32 flags (bit0 kNN present,
//              bit1 32-bit component ids), u32 lambda, u32 beta, f64 alpha,
//              u64 seed, u32 energy, u32 reserved, u64 n, u64 dim, u64 nnz,
//              u64 blocks, u64 postings, u64 summary entries
//   forward  : u64 offsets[n + 1], comp ids[nnz], f16 values[nnz]
//   lists    : u32 list_offsets[dim + 1] (into blocks),
//              u32 block_offsets[blocks + 1] (into postings), u32 docs[postings]
//   summaries: u32 summary_offsets[blocks + 1], comp ids[entries], f16 values[entries]
//   knn      : KnnGraph section (only when bit0 is set)
// Component ids are u16 unless dim exceeds 65536.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "lsr/knn_graph.hpp"
#include "lsr/sparse.hpp"

namespace lsr {

enum class SummaryEnergy : std::uint32_t { L1 = 0, L2 = 1 };

struct SeismicParams {
    std::uint32_t lambda = 60000;
    std::uint32_t beta = 6000;
    double alpha = 0.4;
    std::uint64_t seed = 42;
    SummaryEnergy energy = SummaryEnergy::L1;

    friend bool operator==(const SeismicParams&, const SeismicParams&) = default;
};

struct SeismicQuery {
    std::size_t k = 10;
    std::uint32_t cut = 10;
    double heap_factor = 0.9;
    bool use_knn = false;
};

/// Optional instrumentation for one search call.
struct SearchTrace {
    std::vector<std::uint32_t> lists;     // components traversed, in order
    std::vector<std::uint32_t> blocks;    // global ids of evaluated blocks
    std::vector<DocId> scored_docs;       // docs scored exactly (first visit)
};

struct SeismicSize {
    std::uint64_t forward = 0;
    std::uint64_t postings = 0;
    std::uint64_t summaries = 0;
    std::uint64_t knn = 0;
    std::uint64_t total() const noexcept { return forward + postings + summaries + knn; }
};

/// Coordinate-wise maximum over `members`, then pruned to alpha of its mass
/// (largest values first, ties to the smaller component). alpha >= 1 keeps
/// every coordinate.
SparseVector build_summary(const Dataset& forward, std::span<const DocId> members, double alpha,
                           SummaryEnergy energy = SummaryEnergy::L1);

/// Partitions `docs` into at most `beta` non-empty blocks by a seeded
/// k-means with dot-product similarity: beta centroids sampled from the
/// members, three assignment/update rounds, empty clusters dropped. When
/// beta >= |docs| every doc gets its own block.
std::vector<std::vector<DocId>> cluster_list(const Dataset& forward, std::span<const DocId> docs,
                                             std::uint32_t beta, std::uint64_t seed);

class SeismicIndex {
public:
    /// Requires a non-empty, non-negative dataset. Values are stored at half
    /// precision. Lists are built in parallel over components.
    static SeismicIndex build(const Dataset& dataset, const SeismicParams& params, unsigned workers = 1);

    /// Top-k by the blocked traversal, optionally followed by kNN expansion
    /// when `q.use_knn` is set.
    std::vector<ScoredDoc> search(SparseView query, const SeismicQuery& q, SearchTrace* trace = nullptr) const;

    /// Scores every member of S and of its neighbors exactly and keeps the
    /// top k. Throws when no kNN graph is attached.
    std::vector<ScoredDoc> expand_and_rescore(std::span<const ScoredDoc> results, SparseView query,
                                              std::size_t k) const;

    void attach_knn(KnnGraph graph);
    void detach_knn() noexcept { knn_.reset(); }
    const std::optional<KnnGraph>& knn() const noexcept { return knn_; }

    SeismicSize size_bytes() const noexcept;

    void save(const std::filesystem::path& path) const;
    std::vector<std::uint8_t> serialize() const;
    static SeismicIndex load(const std::filesystem::path& path);
    static SeismicIndex deserialize(std::vector<std::uint8_t> bytes);
    static std::uint64_t file_header_bytes() noexcept;

    const Dataset& forward() const noexcept { return forward_; }
    const SeismicParams& params() const noexcept { return params_; }
    std::size_t size() const noexcept { return forward_.size(); }
    std::uint64_t dim() const noexcept { return forward_.dim(); }

    // Read access to the block structure.
    std::size_t num_blocks() const noexcept { return block_offsets_.size() - 1; }
    std::size_t num_postings() const noexcept { return postings_.size(); }
    /// Global block ids [first, last) of a component's list.
    std::pair<std::uint32_t, std::uint32_t> list_blocks(ComponentId c) const noexcept;
    std::span<const DocId> block_docs(std::uint32_t block) const noexcept;
    SparseView block_summary(std::uint32_t block) const noexcept;

    friend bool operator==(const SeismicIndex&, const SeismicIndex&) = default;

private:
    SeismicIndex() = default;

    Dataset forward_;
    SeismicParams params_;
    std::vector<std::uint32_t> list_offsets_{0};
    std::vector<std::uint32_t> block_offsets_{0};
    std::vector<DocId> postings_;
    std::vector<std::uint32_t> summary_offsets_{0};
    std::vector<ComponentId> summary_ids_;
    std::vector<float> summary_values_;
    std::optional<KnnGraph> knn_;
};

enum class KnnMode { Exact, Approx };

/// Settings of the Seismic index used to answer one query per document when
/// building the graph approximately.
struct KnnBuildParams {
    SeismicParams index{};
    std::uint32_t cut = 20;
    double heap_factor = 0.6;
};

/// kappa neighbors per document by inner product, self excluded. Exact mode
/// uses the brute-force oracle; approximate mode issues every document as a
/// query against a Seismic index built with `params.index`. Short lists are
/// padded (see implementation notes in the source).
KnnGraph build_knn_graph(const Dataset& dataset, std::uint32_t kappa, KnnMode mode, const KnnBuildParams& params,
                         unsigned workers = 1);

/// Same as build_knn_graph(Approx) but reuses an existing index.
KnnGraph build_knn_graph(const SeismicIndex& index, std::uint32_t kappa, std::uint32_t cut, double heap_factor,
                         unsigned workers = 1);

}  // namespace lsr

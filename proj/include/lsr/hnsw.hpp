#pragma once

// Hierarchical navigable small-world graph over sparse vectors, maximizing
// inner product.
//
// Serialized layout (little-endian):
//   header : magic "LSRHNSW\0", u32 version, u32 flags (bit0 32-bit component
//            ids), u32 M, u32 ef_construction, u64 seed, u64 n, u64 dim,
//            u64 nnz, u32 entry point, u32 max level
//   levels : u8 level[n]
//   links  : for every node, for every layer 0..level: u32 degree, u32 ids[degree]
//   forward: u64 offsets[n + 1], comp ids[nnz], f16 values[nnz]

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lsr/sparse.hpp"

namespace lsr {

struct HnswParams {
    std::uint32_t m = 32;
    std::uint32_t ef_construction = 500;
    std::uint64_t seed = 42;

    friend bool operator==(const HnswParams&, const HnswParams&) = default;
};

struct HnswSize {
    std::uint64_t links = 0;
    std::uint64_t levels = 0;
    std::uint64_t forward = 0;
    std::uint64_t total() const noexcept { return links + levels + forward; }
};

class HnswIndex {
public:
    /// Inserts documents in dataset order on one thread. Values are stored at
    /// half precision.
    static HnswIndex build(const Dataset& dataset, const HnswParams& params);

    /// Greedy descent, then a beam of width ef_search at layer 0 driven by the
    /// query with its smallest `qprune` fraction of entries dropped. The beam
    /// is rescored with the full query before the top k are returned.
    std::vector<ScoredDoc> search(SparseView query, std::size_t k, std::size_t ef_search, double qprune = 0.0) const;

    std::size_t size() const noexcept { return forward_.size(); }
    const HnswParams& params() const noexcept { return params_; }
    const Dataset& forward() const noexcept { return forward_; }
    DocId entry_point() const noexcept { return entry_; }
    int max_level() const noexcept { return max_level_; }
    int level(DocId d) const noexcept { return levels_[d]; }
    std::span<const DocId> neighbors(DocId d, int layer) const noexcept;

    /// Layer-0 cap is 2M, upper layers M.
    std::size_t max_degree(int layer) const noexcept { return layer == 0 ? 2 * params_.m : params_.m; }

    HnswSize size_bytes() const noexcept;
    static std::uint64_t file_header_bytes() noexcept;

    std::vector<std::uint8_t> serialize() const;
    void save(const std::filesystem::path& path) const;
    static HnswIndex deserialize(std::vector<std::uint8_t> bytes);
    static HnswIndex load(const std::filesystem::path& path);

    friend bool operator==(const HnswIndex&, const HnswIndex&) = default;

private:
    HnswIndex() = default;
    class Builder;

    Dataset forward_;
    HnswParams params_;
    DocId entry_ = 0;
    int max_level_ = 0;
    std::vector<std::uint8_t> levels_;
    // links_[d][layer] for layer in [0, level(d)].
    std::vector<std::vector<std::vector<DocId>>> links_;
};

}  // namespace lsr

#pragma once

// Sparse vectors, the forward-index dataset, and top-k accumulation.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "lsr/error.hpp"

namespace lsr {

using ComponentId = std::uint32_t;
using DocId = std::uint32_t;

/// Non-owning view over sorted (component, value) pairs stored as two
/// parallel arrays.
struct SparseView {
    std::span<const ComponentId> ids;
    std::span<const float> values;

    std::size_t size() const noexcept { return ids.size(); }
    bool empty() const noexcept { return ids.empty(); }
};

/// Owning sparse vector. Component ids are strictly increasing and every
/// value is finite; both are checked on construction.
class SparseVector {
public:
    SparseVector() = default;
    SparseVector(std::vector<ComponentId> ids, std::vector<float> values);

    /// Builds from unsorted pairs. Duplicate components are rejected.
    static SparseVector from_pairs(std::vector<std::pair<ComponentId, float>> pairs);

    SparseView view() const noexcept { return {ids_, values_}; }
    operator SparseView() const noexcept { return view(); }

    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }
    const std::vector<ComponentId>& ids() const noexcept { return ids_; }
    const std::vector<float>& values() const noexcept { return values_; }

    friend bool operator==(const SparseVector&, const SparseVector&) = default;

private:
    std::vector<ComponentId> ids_;
    std::vector<float> values_;
};

/// Validates the SparseVector invariants on a raw view.
void validate(SparseView v);

/// Collection of sparse vectors in CSR layout. Immutable once built, so a
/// const Dataset can be shared across threads.
class Dataset {
public:
    Dataset() : offsets_{0} {}

    /// Takes ownership of CSR arrays and validates them. `dim` must exceed
    /// every component id.
    Dataset(std::vector<std::uint64_t> offsets, std::vector<ComponentId> ids,
            std::vector<float> values, std::uint64_t dim);

    static Dataset from_vectors(std::span<const SparseVector> vectors, std::uint64_t dim = 0);

    std::size_t size() const noexcept { return offsets_.size() - 1; }
    bool empty() const noexcept { return size() == 0; }
    std::uint64_t dim() const noexcept { return dim_; }
    bool nonneg() const noexcept { return nonneg_; }
    std::uint64_t nnz() const noexcept { return ids_.size(); }

    SparseView operator[](std::size_t i) const noexcept {
        const auto b = offsets_[i];
        const auto e = offsets_[i + 1];
        return {std::span(ids_).subspan(b, e - b), std::span(values_).subspan(b, e - b)};
    }

    SparseVector vector(std::size_t i) const;

    const std::vector<std::uint64_t>& offsets() const noexcept { return offsets_; }
    const std::vector<ComponentId>& ids() const noexcept { return ids_; }
    const std::vector<float>& values() const noexcept { return values_; }

    /// Copy with every value rounded to half precision.
    Dataset quantized() const;

    /// Footprint with 16-bit values and component ids plus 64-bit offsets.
    /// This is the yardstick for index-size budgets.
    std::uint64_t storage_bytes() const noexcept;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<std::uint64_t> offsets_;
    std::vector<ComponentId> ids_;
    std::vector<float> values_;
    std::uint64_t dim_ = 0;
    bool nonneg_ = true;
};

/// Inner product by merging sorted ids. Accumulates in double so the result
/// does not depend on which side drives the iteration.
float dot(SparseView a, SparseView b) noexcept;

/// Dense scatter of one query. `score` walks a document's entries in
/// component order and produces exactly the same value as `dot`.
class DenseQuery {
public:
    explicit DenseQuery(std::uint64_t dim = 0) : dense_(dim, 0.0f) {}

    void load(SparseView q);
    void clear() noexcept;
    float score(SparseView doc) const noexcept;
    std::uint64_t dim() const noexcept { return dense_.size(); }

private:
    std::vector<float> dense_;
    std::vector<ComponentId> touched_;
};

struct ScoredDoc {
    DocId doc = 0;
    float score = 0.0f;

    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Global ranking rule: higher score first, then smaller doc id.
constexpr bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) noexcept {
    return a.score > b.score || (a.score == b.score && a.doc < b.doc);
}

/// Bounded top-k accumulator. Holds at most k distinct documents; a repeated
/// doc keeps its best score.
class TopKHeap {
public:
    explicit TopKHeap(std::size_t k);

    /// Returns true when the candidate entered (or improved) the heap.
    bool push(ScoredDoc c);

    std::size_t capacity() const noexcept { return k_; }
    std::size_t size() const noexcept { return heap_.size(); }
    bool full() const noexcept { return heap_.size() == k_; }

    /// k-th best score, or -inf while under-full.
    float threshold() const noexcept {
        return full() ? heap_.front().score : -std::numeric_limits<float>::infinity();
    }

    /// Entries sorted by the global ranking rule.
    std::vector<ScoredDoc> sorted() const;
    void clear() noexcept { heap_.clear(); }

private:
    std::size_t k_;
    // Max-heap on "ranks after", so front() is the current worst entry.
    std::vector<ScoredDoc> heap_;
};

/// |returned ∩ exact| / k. `exact` must hold exactly k ids and `returned`
/// at most k.
double accuracy_at_k(std::span<const DocId> returned, std::span<const DocId> exact, std::size_t k);

std::vector<DocId> ids_of(std::span<const ScoredDoc> docs);

}  // namespace lsr

#include "lsr/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "lsr/half.hpp"

namespace lsr {

void validate(SparseView v) {
    require(v.ids.size() == v.values.size(), "sparse vector: ids/values length mismatch");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0 && v.ids[i] <= v.ids[i - 1])
            fail(ErrorCode::InvalidArgument,
                 "sparse vector: component ids not strictly increasing at position " + std::to_string(i));
        if (!std::isfinite(v.values[i]))
            fail(ErrorCode::InvalidArgument, "sparse vector: non-finite value at position " + std::to_string(i));
    }
}

SparseVector::SparseVector(std::vector<ComponentId> ids, std::vector<float> values)
    : ids_(std::move(ids)), values_(std::move(values)) {
    validate(view());
}

SparseVector SparseVector::from_pairs(std::vector<std::pair<ComponentId, float>> pairs) {
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<ComponentId> ids;
    std::vector<float> values;
    ids.reserve(pairs.size());
    values.reserve(pairs.size());
    for (const auto& [c, v] : pairs) {
        ids.push_back(c);
        values.push_back(v);
    }
    return SparseVector(std::move(ids), std::move(values));
}

Dataset::Dataset(std::vector<std::uint64_t> offsets, std::vector<ComponentId> ids, std::vector<float> values,
                 std::uint64_t dim)
    : offsets_(std::move(offsets)), ids_(std::move(ids)), values_(std::move(values)), dim_(dim) {
    require(!offsets_.empty() && offsets_.front() == 0, "dataset: offsets must start at 0");
    require(offsets_.back() == ids_.size(), "dataset: last offset must equal nnz");
    require(ids_.size() == values_.size(), "dataset: ids/values length mismatch");
    for (std::size_t i = 1; i < offsets_.size(); ++i)
        require(offsets_[i] >= offsets_[i - 1], "dataset: offsets must be non-decreasing");
    for (std::size_t i = 0; i < size(); ++i) {
        const SparseView v = (*this)[i];
        validate(v);
        if (!v.empty())
            require(v.ids.back() < dim_, "dataset: component id " + std::to_string(v.ids.back()) +
                                             " out of range for dim " + std::to_string(dim_));
    }
    nonneg_ = std::all_of(values_.begin(), values_.end(), [](float x) { return x >= 0.0f; });
}

Dataset Dataset::from_vectors(std::span<const SparseVector> vectors, std::uint64_t dim) {
    std::vector<std::uint64_t> offsets{0};
    std::vector<ComponentId> ids;
    std::vector<float> values;
    std::uint64_t max_dim = 0;
    for (const auto& v : vectors) {
        ids.insert(ids.end(), v.ids().begin(), v.ids().end());
        values.insert(values.end(), v.values().begin(), v.values().end());
        offsets.push_back(ids.size());
        if (!v.empty()) max_dim = std::max<std::uint64_t>(max_dim, v.ids().back() + 1ULL);
    }
    return Dataset(std::move(offsets), std::move(ids), std::move(values), std::max(dim, max_dim));
}

SparseVector Dataset::vector(std::size_t i) const {
    const SparseView v = (*this)[i];
    return SparseVector({v.ids.begin(), v.ids.end()}, {v.values.begin(), v.values.end()});
}

Dataset Dataset::quantized() const {
    Dataset out = *this;
    for (auto& v : out.values_) v = round_to_half(v);
    out.nonneg_ = std::all_of(out.values_.begin(), out.values_.end(), [](float x) { return x >= 0.0f; });
    return out;
}

std::uint64_t Dataset::storage_bytes() const noexcept {
    const std::uint64_t id_bytes = dim_ <= 65536 ? 2 : 4;
    return nnz() * (id_bytes + 2) + offsets_.size() * sizeof(std::uint64_t);
}

float dot(SparseView a, SparseView b) noexcept {
    double acc = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a.ids[i] < b.ids[j]) {
            ++i;
        } else if (a.ids[i] > b.ids[j]) {
            ++j;
        } else {
            acc += static_cast<double>(a.values[i]) * static_cast<double>(b.values[j]);
            ++i;
            ++j;
        }
    }
    return static_cast<float>(acc);
}

void DenseQuery::load(SparseView q) {
    clear();
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q.ids[i] >= dense_.size()) continue;  // no document can hold this component
        dense_[q.ids[i]] = q.values[i];
        touched_.push_back(q.ids[i]);
    }
}

void DenseQuery::clear() noexcept {
    for (auto c : touched_) dense_[c] = 0.0f;
    touched_.clear();
}

float DenseQuery::score(SparseView doc) const noexcept {
    // Zero products contribute exactly 0.0, so summing over every document
    // entry in component order matches the merge in dot() bit for bit.
    double acc = 0.0;
    for (std::size_t i = 0; i < doc.size(); ++i)
        acc += static_cast<double>(dense_[doc.ids[i]]) * static_cast<double>(doc.values[i]);
    return static_cast<float>(acc);
}

TopKHeap::TopKHeap(std::size_t k) : k_(k) {
    require(k >= 1, "top-k heap: capacity must be at least 1");
    heap_.reserve(k);
}

bool TopKHeap::push(ScoredDoc c) {
    require(std::isfinite(c.score), "top-k heap: score must be finite");
    // If c does not beat the worst entry, any existing entry for the same doc
    // already ranks at least as well as c.
    if (full() && !ranks_before(c, heap_.front())) return false;

    auto it = std::find_if(heap_.begin(), heap_.end(), [&](const ScoredDoc& e) { return e.doc == c.doc; });
    if (it != heap_.end()) {
        if (c.score <= it->score) return false;
        it->score = c.score;
        std::make_heap(heap_.begin(), heap_.end(), ranks_before);
        return true;
    }
    if (full()) {
        std::pop_heap(heap_.begin(), heap_.end(), ranks_before);
        heap_.back() = c;
    } else {
        heap_.push_back(c);
    }
    std::push_heap(heap_.begin(), heap_.end(), ranks_before);
    return true;
}

std::vector<ScoredDoc> TopKHeap::sorted() const {
    std::vector<ScoredDoc> out = heap_;
    std::sort(out.begin(), out.end(), ranks_before);
    return out;
}

double accuracy_at_k(std::span<const DocId> returned, std::span<const DocId> exact, std::size_t k) {
    require(k >= 1, "accuracy_at_k: k must be at least 1");
    require(exact.size() == k, "accuracy_at_k: exact set has " + std::to_string(exact.size()) +
                                   " ids, expected k=" + std::to_string(k));
    require(returned.size() <= k, "accuracy_at_k: returned set larger than k");
    const std::unordered_set<DocId> truth(exact.begin(), exact.end());
    std::unordered_set<DocId> seen;
    std::size_t hits = 0;
    for (auto id : returned)
        if (truth.count(id) && seen.insert(id).second) ++hits;
    return static_cast<double>(hits) / static_cast<double>(k);
}

std::vector<DocId> ids_of(std::span<const ScoredDoc> docs) {
    std::vector<DocId> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(d.doc);
    return out;
}

}  // namespace lsr

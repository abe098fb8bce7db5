#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lsr/binio.hpp"
#include "lsr/bitpack.hpp"
#include "lsr/sparse.hpp"

namespace lsr {

/// Exactly kappa neighbor ids per document, each stored in
/// floor(log2(n - 1)) + 1 bits. Neighbor lists are kept best first.
class KnnGraph {
public:
    /// Serialized section header: u64 n, u32 kappa, u32 bits per id.
    static constexpr std::uint64_t header_bytes = 16;

    KnnGraph() = default;

    /// `neighbors` is row-major n * kappa. Rejects kappa == 0, kappa >= n,
    /// self loops, repeated neighbors and ids >= n.
    KnnGraph(std::uint64_t n, std::uint32_t kappa, std::span<const DocId> neighbors);

    static unsigned bits_per_id(std::uint64_t n) noexcept;

    std::uint64_t size() const noexcept { return n_; }
    std::uint32_t kappa() const noexcept { return kappa_; }
    unsigned width() const noexcept { return ids_.width(); }

    std::vector<DocId> neighbors(DocId u) const;
    DocId neighbor(DocId u, std::uint32_t j) const noexcept { return ids_.get(std::uint64_t{u} * kappa_ + j); }

    /// ceil(width * n * kappa / 8).
    std::uint64_t payload_bytes() const noexcept { return ids_.payload_bytes(); }

    void write(binio::Writer& w) const;
    static KnnGraph read(binio::Reader& r);

    friend bool operator==(const KnnGraph&, const KnnGraph&) = default;

private:
    std::uint64_t n_ = 0;
    std::uint32_t kappa_ = 0;
    PackedArray ids_;
};

}  // namespace lsr

#include "lsr/knn_graph.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace lsr {

unsigned KnnGraph::bits_per_id(std::uint64_t n) noexcept {
    // floor(log2(n - 1)) + 1 == bit_width(n - 1) for n >= 2.
    return n < 2 ? 1u : static_cast<unsigned>(std::bit_width(n - 1));
}

KnnGraph::KnnGraph(std::uint64_t n, std::uint32_t kappa, std::span<const DocId> neighbors)
    : n_(n), kappa_(kappa) {
    require(kappa >= 1, "knn graph: kappa must be at least 1");
    require(kappa < n, "knn graph: kappa=" + std::to_string(kappa) + " must be smaller than n=" + std::to_string(n));
    require(neighbors.size() == n * kappa, "knn graph: expected n * kappa neighbor ids");
    ids_ = PackedArray(n * kappa, bits_per_id(n));
    std::vector<DocId> row;
    for (std::uint64_t u = 0; u < n; ++u) {
        row.assign(neighbors.begin() + u * kappa, neighbors.begin() + (u + 1) * kappa);
        for (std::uint32_t j = 0; j < kappa; ++j) {
            require(row[j] < n, "knn graph: neighbor id out of range for doc " + std::to_string(u));
            require(row[j] != u, "knn graph: self loop at doc " + std::to_string(u));
            ids_.set(u * kappa + j, row[j]);
        }
        std::sort(row.begin(), row.end());
        require(std::adjacent_find(row.begin(), row.end()) == row.end(),
                "knn graph: repeated neighbor for doc " + std::to_string(u));
    }
}

std::vector<DocId> KnnGraph::neighbors(DocId u) const {
    std::vector<DocId> out(kappa_);
    for (std::uint32_t j = 0; j < kappa_; ++j) out[j] = neighbor(u, j);
    return out;
}

void KnnGraph::write(binio::Writer& w) const {
    w.put<std::uint64_t>(n_);
    w.put<std::uint32_t>(kappa_);
    w.put<std::uint32_t>(ids_.width());
    w.put_span<std::uint8_t>(ids_.payload());
}

KnnGraph KnnGraph::read(binio::Reader& r) {
    const std::size_t at = r.offset();
    KnnGraph g;
    g.n_ = r.get<std::uint64_t>("knn n");
    g.kappa_ = r.get<std::uint32_t>("knn kappa");
    const auto width = r.get<std::uint32_t>("knn width");
    if (g.kappa_ == 0 || g.kappa_ >= g.n_) r.format_error("knn graph: invalid kappa", at);
    if (width != bits_per_id(g.n_)) r.format_error("knn graph: width does not match n", at + 12);
    const std::uint64_t count = g.n_ * g.kappa_;
    const auto bytes = r.get_vector<std::uint8_t>((count * width + 7) / 8, "knn payload");
    g.ids_ = PackedArray::from_payload(count, width, bytes);
    return g;
}

}  // namespace lsr

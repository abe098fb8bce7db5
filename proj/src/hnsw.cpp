#include "lsr/hnsw.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <random>
#include <string>

#include "lsr/binio.hpp"
#include "lsr/half.hpp"

namespace lsr {

namespace {

constexpr std::array<char, 8> kMagic{'L', 'S', 'R', 'H', 'N', 'S', 'W', '\0'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagWideIds = 1u;
constexpr int kMaxLevel = 255;

// Orders so that the top of a priority_queue is the *best* element.
struct BestOnTop {
    bool operator()(const ScoredDoc& a, const ScoredDoc& b) const noexcept { return ranks_before(b, a); }
};
// Top is the *worst* element.
struct WorstOnTop {
    bool operator()(const ScoredDoc& a, const ScoredDoc& b) const noexcept { return ranks_before(a, b); }
};

class Visited {
public:
    void reset(std::size_t n) {
        if (stamp_.size() < n) stamp_.resize(n, 0);
        if (++epoch_ == 0) {
            std::fill(stamp_.begin(), stamp_.end(), 0);
            epoch_ = 1;
        }
    }
    bool insert(DocId d) {
        if (stamp_[d] == epoch_) return false;
        stamp_[d] = epoch_;
        return true;
    }

private:
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
};

using Links = std::vector<std::vector<std::vector<DocId>>>;

/// Beam search over one layer. `score(d)` returns similarity to the base
/// vector. Returns up to ef results sorted best first.
template <typename Score>
std::vector<ScoredDoc> search_layer(const Links& links, std::span<const ScoredDoc> entries, std::size_t ef, int layer,
                                    Visited& visited, std::size_t n, Score&& score) {
    visited.reset(n);
    std::priority_queue<ScoredDoc, std::vector<ScoredDoc>, BestOnTop> candidates;
    std::priority_queue<ScoredDoc, std::vector<ScoredDoc>, WorstOnTop> results;
    for (const auto& e : entries) {
        if (!visited.insert(e.doc)) continue;
        candidates.push(e);
        results.push(e);
        if (results.size() > ef) results.pop();
    }
    while (!candidates.empty()) {
        const ScoredDoc c = candidates.top();
        if (results.size() >= ef && ranks_before(results.top(), c)) break;
        candidates.pop();
        for (DocId nb : links[c.doc][layer]) {
            if (!visited.insert(nb)) continue;
            const ScoredDoc s{nb, score(nb)};
            if (results.size() < ef || ranks_before(s, results.top())) {
                candidates.push(s);
                results.push(s);
                if (results.size() > ef) results.pop();
            }
        }
    }
    std::vector<ScoredDoc> out(results.size());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = results.top();
        results.pop();
    }
    return out;
}

/// Greedy walk on one layer toward higher similarity.
template <typename Score>
ScoredDoc greedy(const Links& links, ScoredDoc cur, int layer, Score&& score) {
    for (bool moved = true; moved;) {
        moved = false;
        for (DocId nb : links[cur.doc][layer]) {
            const ScoredDoc s{nb, score(nb)};
            if (ranks_before(s, cur)) {
                cur = s;
                moved = true;
            }
        }
    }
    return cur;
}

}  // namespace

class HnswIndex::Builder {
public:
    explicit Builder(HnswIndex& g) : g_(g), base_(g.forward_.dim()), probe_(g.forward_.dim()) {}

    void insert(DocId q) {
        const int level = g_.levels_[q];
        g_.links_[q].assign(level + 1, {});
        if (q == 0) {
            g_.entry_ = 0;
            g_.max_level_ = level;
            return;
        }
        base_.load(g_.forward_[q]);
        auto score = [&](DocId d) { return base_.score(g_.forward_[d]); };

        ScoredDoc cur{g_.entry_, score(g_.entry_)};
        for (int l = g_.max_level_; l > level; --l) cur = greedy(g_.links_, cur, l, score);

        std::vector<ScoredDoc> entries{cur};
        for (int l = std::min(level, g_.max_level_); l >= 0; --l) {
            auto found = search_layer(g_.links_, entries, g_.params_.ef_construction, l, visited_, g_.size(), score);
            auto selected = select_neighbors(found, g_.params_.m);
            auto& mine = g_.links_[q][l];
            for (const auto& s : selected) mine.push_back(s.doc);
            for (const auto& s : selected) connect(s.doc, q, s.score, l);
            entries = std::move(found);
        }
        base_.clear();
        if (level > g_.max_level_) {
            g_.max_level_ = level;
            g_.entry_ = q;
        }
    }

private:
    /// Diversity heuristic: walk candidates best first and keep one only if it
    /// is more similar to the base than to every neighbor kept so far.
    std::vector<ScoredDoc> select_neighbors(std::span<const ScoredDoc> sorted_candidates, std::size_t m) {
        std::vector<ScoredDoc> kept;
        if (sorted_candidates.size() <= m) return {sorted_candidates.begin(), sorted_candidates.end()};
        for (const auto& c : sorted_candidates) {
            if (kept.size() >= m) break;
            probe_.load(g_.forward_[c.doc]);
            bool good = true;
            for (const auto& r : kept) {
                if (probe_.score(g_.forward_[r.doc]) > c.score) {
                    good = false;
                    break;
                }
            }
            probe_.clear();
            if (good) kept.push_back(c);
        }
        return kept;
    }

    /// Adds `q` to the layer-l list of `e`, shrinking with the heuristic when
    /// the cap is exceeded.
    void connect(DocId e, DocId q, float sim, int l) {
        auto& list = g_.links_[e][l];
        const std::size_t cap = g_.max_degree(l);
        if (list.size() < cap) {
            list.push_back(q);
            return;
        }
        DenseQuery& around = shrink_;
        if (around.dim() != g_.forward_.dim()) around = DenseQuery(g_.forward_.dim());
        around.load(g_.forward_[e]);
        std::vector<ScoredDoc> cands;
        cands.reserve(list.size() + 1);
        cands.push_back({q, sim});
        for (DocId d : list) cands.push_back({d, around.score(g_.forward_[d])});
        around.clear();
        std::sort(cands.begin(), cands.end(), ranks_before);
        const auto kept = select_neighbors(cands, cap);
        list.clear();
        for (const auto& k : kept) list.push_back(k.doc);
    }

    HnswIndex& g_;
    DenseQuery base_;
    DenseQuery probe_;
    DenseQuery shrink_;
    Visited visited_;
};

HnswIndex HnswIndex::build(const Dataset& dataset, const HnswParams& params) {
    require(!dataset.empty(), "hnsw build: dataset is empty");
    require(params.m >= 2, "hnsw build: M must be at least 2");
    require(params.ef_construction >= 1, "hnsw build: ef_construction must be at least 1");
    require(dataset.size() <= UINT32_MAX, "hnsw build: too many documents");

    HnswIndex g;
    g.params_ = params;
    g.forward_ = dataset.quantized();
    const std::size_t n = g.forward_.size();
    g.levels_.resize(n);
    g.links_.resize(n);

    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double ml = 1.0 / std::log(static_cast<double>(params.m));
    for (auto& level : g.levels_) {
        const double u = 1.0 - unit(rng);  // (0, 1]
        level = static_cast<std::uint8_t>(std::min(kMaxLevel, static_cast<int>(std::floor(-std::log(u) * ml))));
    }

    Builder builder(g);
    for (std::size_t d = 0; d < n; ++d) builder.insert(static_cast<DocId>(d));
    return g;
}

std::span<const DocId> HnswIndex::neighbors(DocId d, int layer) const noexcept {
    if (layer > levels_[d]) return {};
    return links_[d][layer];
}

std::vector<ScoredDoc> HnswIndex::search(SparseView query, std::size_t k, std::size_t ef_search, double qprune) const {
    require(k >= 1, "hnsw search: k must be at least 1");
    require(ef_search >= k, "hnsw search: ef_search=" + std::to_string(ef_search) + " is smaller than k=" +
                                std::to_string(k));
    require(qprune >= 0.0 && qprune <= 1.0, "hnsw search: qprune must be in [0, 1]");

    thread_local DenseQuery dense;
    thread_local Visited visited;
    if (dense.dim() != forward_.dim()) dense = DenseQuery(forward_.dim());

    const std::size_t drop = query.empty() ? 0
                             : std::min(query.size() - 1,
                                        static_cast<std::size_t>(std::floor(qprune * static_cast<double>(query.size()))));
    SparseVector pruned;
    if (drop > 0) {
        std::vector<std::size_t> order(query.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        // Smallest values go first; on equal values the larger component goes.
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return query.values[a] < query.values[b] || (query.values[a] == query.values[b] && query.ids[a] > query.ids[b]);
        });
        std::vector<std::pair<ComponentId, float>> kept;
        for (std::size_t i = drop; i < order.size(); ++i) kept.emplace_back(query.ids[order[i]], query.values[order[i]]);
        pruned = SparseVector::from_pairs(std::move(kept));
    }

    dense.load(drop > 0 ? pruned.view() : query);
    auto score = [&](DocId d) { return dense.score(forward_[d]); };
    ScoredDoc cur{entry_, score(entry_)};
    for (int l = max_level_; l > 0; --l) cur = greedy(links_, cur, l, score);
    const std::array<ScoredDoc, 1> entries{cur};
    auto beam = search_layer(links_, entries, ef_search, 0, visited, size(), score);

    if (drop > 0) {
        dense.load(query);
        for (auto& b : beam) b.score = dense.score(forward_[b.doc]);
        std::sort(beam.begin(), beam.end(), ranks_before);
    }
    dense.clear();
    if (beam.size() > k) beam.resize(k);
    return beam;
}

HnswSize HnswIndex::size_bytes() const noexcept {
    HnswSize s;
    for (const auto& node : links_)
        for (const auto& layer : node) s.links += 4 * (1 + layer.size());
    s.levels = levels_.size();
    s.forward = forward_.storage_bytes();
    return s;
}

std::uint64_t HnswIndex::file_header_bytes() noexcept { return 8 + 4 * 4 + 8 * 4 + 4 * 2; }

std::vector<std::uint8_t> HnswIndex::serialize() const {
    const bool wide = forward_.dim() > 65536;
    binio::Writer w;
    w.put_bytes(kMagic.data(), kMagic.size());
    w.put<std::uint32_t>(kVersion);
    w.put<std::uint32_t>(wide ? kFlagWideIds : 0u);
    w.put<std::uint32_t>(params_.m);
    w.put<std::uint32_t>(params_.ef_construction);
    w.put<std::uint64_t>(params_.seed);
    w.put<std::uint64_t>(size());
    w.put<std::uint64_t>(forward_.dim());
    w.put<std::uint64_t>(forward_.nnz());
    w.put<std::uint32_t>(entry_);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(max_level_));
    w.put_span<std::uint8_t>(levels_);
    for (const auto& node : links_) {
        for (const auto& layer : node) {
            w.put<std::uint32_t>(static_cast<std::uint32_t>(layer.size()));
            w.put_span<DocId>(layer);
        }
    }
    w.put_span<std::uint64_t>(forward_.offsets());
    if (wide) {
        w.put_span<ComponentId>(forward_.ids());
    } else {
        std::vector<std::uint16_t> narrow(forward_.ids().begin(), forward_.ids().end());
        w.put_span<std::uint16_t>(narrow);
    }
    std::vector<std::uint16_t> halves(forward_.nnz());
    std::transform(forward_.values().begin(), forward_.values().end(), halves.begin(), to_half_bits);
    w.put_span<std::uint16_t>(halves);
    return w.bytes();
}

void HnswIndex::save(const std::filesystem::path& path) const {
    binio::Writer w;
    const auto bytes = serialize();
    w.put_bytes(bytes.data(), bytes.size());
    w.save(path);
}

HnswIndex HnswIndex::load(const std::filesystem::path& path) {
    auto r = binio::Reader::load(path);
    return deserialize(r.get_vector<std::uint8_t>(r.remaining(), "index"));
}

HnswIndex HnswIndex::deserialize(std::vector<std::uint8_t> bytes) {
    binio::Reader r(std::move(bytes));
    std::array<char, 8> magic{};
    for (auto& ch : magic) ch = r.get<char>("magic");
    if (magic != kMagic) r.format_error("not an HNSW index file (bad magic)", 0);
    const auto version = r.get<std::uint32_t>("version");
    if (version != kVersion) r.format_error("unsupported HNSW index version " + std::to_string(version), 8);
    const bool wide = r.get<std::uint32_t>("flags") & kFlagWideIds;

    HnswIndex g;
    g.params_.m = r.get<std::uint32_t>("M");
    g.params_.ef_construction = r.get<std::uint32_t>("ef_construction");
    g.params_.seed = r.get<std::uint64_t>("seed");
    const auto n = r.get<std::uint64_t>("n");
    const auto dim = r.get<std::uint64_t>("dim");
    const auto nnz = r.get<std::uint64_t>("nnz");
    g.entry_ = r.get<std::uint32_t>("entry point");
    g.max_level_ = static_cast<int>(r.get<std::uint32_t>("max level"));
    if (wide != (dim > 65536)) r.format_error("component id width flag does not match dim", 12);
    if (n == 0 || g.entry_ >= n) r.format_error("entry point out of range", r.offset() - 8);

    g.levels_ = r.get_vector<std::uint8_t>(n, "levels");
    g.links_.resize(n);
    for (std::uint64_t d = 0; d < n; ++d) {
        g.links_[d].resize(g.levels_[d] + 1);
        for (auto& layer : g.links_[d]) {
            const auto deg = r.get<std::uint32_t>("degree");
            layer = r.get_vector<DocId>(deg, "links");
            for (DocId x : layer)
                if (x >= n) r.format_error("link target out of range", r.offset());
        }
    }
    auto offsets = r.get_vector<std::uint64_t>(n + 1, "forward offsets");
    std::vector<ComponentId> ids;
    if (wide) {
        ids = r.get_vector<ComponentId>(nnz, "forward ids");
    } else {
        const auto narrow = r.get_vector<std::uint16_t>(nnz, "forward ids");
        ids.assign(narrow.begin(), narrow.end());
    }
    const auto halves = r.get_vector<std::uint16_t>(nnz, "forward values");
    std::vector<float> values(nnz);
    std::transform(halves.begin(), halves.end(), values.begin(), from_half_bits);
    if (!r.at_end()) r.format_error("trailing bytes after index", r.offset());
    try {
        g.forward_ = Dataset(std::move(offsets), std::move(ids), std::move(values), dim);
    } catch (const Error& e) {
        r.format_error(std::string("invalid forward index: ") + e.what(), r.offset());
    }
    return g;
}

}  // namespace lsr

#include "lsr/seismic.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <numeric>
#include <random>
#include <string>

#include "lsr/binio.hpp"
#include "lsr/half.hpp"
#include "lsr/oracle.hpp"
#include "lsr/parallel.hpp"

namespace lsr {

namespace {

constexpr std::array<char, 8> kMagic{'L', 'S', 'R', 'S', 'E', 'I', 'S', '\0'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagKnn = 1u;
constexpr std::uint32_t kFlagWideIds = 2u;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Dense float scratch indexed by component with a list of touched slots, so
/// clearing costs O(touched).
class DenseAccumulator {
public:
    void reset(std::uint64_t dim) {
        if (values_.size() != dim) {
            values_.assign(dim, 0.0f);
            seen_.assign(dim, 0);
            touched_.clear();
        }
    }
    void max_in(ComponentId c, float v) {
        if (!seen_[c]) {
            seen_[c] = 1;
            touched_.push_back(c);
            values_[c] = v;
        } else if (v > values_[c]) {
            values_[c] = v;
        }
    }
    void add(ComponentId c, float v) {
        if (!seen_[c]) {
            seen_[c] = 1;
            touched_.push_back(c);
            values_[c] = v;
        } else {
            values_[c] += v;
        }
    }
    /// Touched (component, value) pairs, sorted by component unless
    /// `sorted` is false; clears.
    std::vector<std::pair<ComponentId, float>> drain(bool sorted = true) {
        if (sorted) std::sort(touched_.begin(), touched_.end());
        std::vector<std::pair<ComponentId, float>> out;
        out.reserve(touched_.size());
        for (auto c : touched_) {
            out.emplace_back(c, values_[c]);
            values_[c] = 0.0f;
            seen_[c] = 0;
        }
        touched_.clear();
        return out;
    }

private:
    std::vector<float> values_;
    std::vector<std::uint8_t> seen_;
    std::vector<ComponentId> touched_;
};

thread_local DenseAccumulator tl_accumulator;

struct Centroid {
    std::vector<ComponentId> ids;
    std::vector<float> values;
};

/// Inverted view over the current centroids: component -> (centroid, value).
class CentroidIndex {
public:
    void rebuild(const std::vector<Centroid>& centroids, std::uint64_t dim) {
        if (start_.size() != dim) {
            start_.assign(dim, 0);
            fill_.assign(dim, 0);
            count_.assign(dim, 0);
        }
        for (auto c : used_) count_[c] = 0;
        used_.clear();
        std::size_t total = 0;
        for (const auto& cen : centroids) {
            total += cen.ids.size();
            for (auto c : cen.ids)
                if (count_[c]++ == 0) used_.push_back(c);
        }
        std::uint32_t at = 0;
        for (auto c : used_) {
            start_[c] = at;
            fill_[c] = at;
            at += count_[c];
        }
        entries_.resize(total);
        // Fill in centroid order so each component's run is sorted by centroid.
        for (std::uint32_t j = 0; j < centroids.size(); ++j)
            for (std::size_t i = 0; i < centroids[j].ids.size(); ++i)
                entries_[fill_[centroids[j].ids[i]]++] = {j, centroids[j].values[i]};
    }

    /// Index of the centroid with the largest dot product (ties to the
    /// smaller index).
    std::uint32_t best(SparseView doc, std::vector<double>& scores) const {
        std::fill(scores.begin(), scores.end(), 0.0);
        for (std::size_t i = 0; i < doc.size(); ++i) {
            const auto c = doc.ids[i];
            const auto len = count_[c];
            if (len == 0) continue;
            const double v = doc.values[i];
            for (std::uint32_t t = start_[c]; t < start_[c] + len; ++t) scores[entries_[t].first] += v * entries_[t].second;
        }
        return static_cast<std::uint32_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
    }

private:
    std::vector<std::uint32_t> start_;
    std::vector<std::uint32_t> fill_;
    std::vector<std::uint32_t> count_;
    std::vector<ComponentId> used_;
    std::vector<std::pair<std::uint32_t, float>> entries_;
};

thread_local CentroidIndex tl_centroids;

/// Per-thread query scratch.
struct SearchScratch {
    DenseQuery dense;
    std::vector<std::uint32_t> stamp;
    std::uint32_t epoch = 0;
    std::vector<std::pair<float, std::uint32_t>> potentials;
    std::vector<std::pair<float, ComponentId>> query_terms;

    void prepare(std::uint64_t dim, std::size_t n) {
        if (dense.dim() != dim) dense = DenseQuery(dim);
        if (stamp.size() != n) {
            stamp.assign(n, 0);
            epoch = 0;
        }
        if (++epoch == 0) {
            std::fill(stamp.begin(), stamp.end(), 0);
            epoch = 1;
        }
    }
    bool visit(DocId d) {
        if (stamp[d] == epoch) return false;
        stamp[d] = epoch;
        return true;
    }
};

thread_local SearchScratch tl_search;

}  // namespace

// ---------------------------------------------------------------------------

SparseVector build_summary(const Dataset& forward, std::span<const DocId> members, double alpha,
                           SummaryEnergy energy) {
    require(!members.empty(), "build_summary: block must be non-empty");
    auto& acc = tl_accumulator;
    acc.reset(forward.dim());
    for (DocId d : members) {
        const SparseView v = forward[d];
        for (std::size_t i = 0; i < v.size(); ++i) acc.max_in(v.ids[i], v.values[i]);
    }
    auto entries = acc.drain();
    if (alpha < 1.0) {
        auto order = entries;
        std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
            return a.second > b.second || (a.second == b.second && a.first < b.first);
        });
        auto mass = [&](float v) { return energy == SummaryEnergy::L1 ? double{v} : double{v} * v; };
        double total = 0.0;
        for (const auto& e : order) total += mass(e.second);
        const double target = alpha * total;
        double running = 0.0;
        std::size_t keep = 0;
        while (keep < order.size()) {
            running += mass(order[keep].second);
            ++keep;
            if (running >= target) break;
        }
        order.resize(keep);
        std::sort(order.begin(), order.end());
        entries = std::move(order);
    }
    std::vector<ComponentId> ids;
    std::vector<float> values;
    ids.reserve(entries.size());
    values.reserve(entries.size());
    for (const auto& [c, v] : entries) {
        ids.push_back(c);
        values.push_back(v);
    }
    return SparseVector(std::move(ids), std::move(values));
}

std::vector<std::vector<DocId>> cluster_list(const Dataset& forward, std::span<const DocId> docs,
                                             std::uint32_t beta, std::uint64_t seed) {
    require(beta >= 1, "cluster_list: beta must be at least 1");
    std::vector<std::vector<DocId>> blocks;
    if (docs.empty()) return blocks;
    if (docs.size() <= beta) {
        for (DocId d : docs) blocks.push_back({d});
        return blocks;
    }
    if (beta == 1) {
        blocks.emplace_back(docs.begin(), docs.end());
        return blocks;
    }

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> positions(docs.size());
    std::iota(positions.begin(), positions.end(), 0);
    std::vector<std::size_t> picked;
    picked.reserve(beta);
    std::sample(positions.begin(), positions.end(), std::back_inserter(picked), beta, rng);

    std::vector<Centroid> centroids(beta);
    for (std::uint32_t j = 0; j < beta; ++j) {
        const SparseView v = forward[docs[picked[j]]];
        centroids[j].ids.assign(v.ids.begin(), v.ids.end());
        centroids[j].values.assign(v.values.begin(), v.values.end());
    }

    auto& index = tl_centroids;
    auto& acc = tl_accumulator;
    acc.reset(forward.dim());
    std::vector<std::uint32_t> assignment(docs.size(), 0);
    std::vector<double> scores(beta);
    constexpr int kRounds = 3;
    for (int round = 0; round < kRounds; ++round) {
        index.rebuild(centroids, forward.dim());
        for (std::size_t i = 0; i < docs.size(); ++i) assignment[i] = index.best(forward[docs[i]], scores);
        if (round + 1 == kRounds) break;
        // Mean of members; clusters that lost every member keep their centroid.
        std::vector<std::vector<std::size_t>> members(beta);
        for (std::size_t i = 0; i < docs.size(); ++i) members[assignment[i]].push_back(i);
        for (std::uint32_t j = 0; j < beta; ++j) {
            if (members[j].empty()) continue;
            for (auto i : members[j]) {
                const SparseView v = forward[docs[i]];
                for (std::size_t t = 0; t < v.size(); ++t) acc.add(v.ids[t], v.values[t]);
            }
            const float inv = 1.0f / static_cast<float>(members[j].size());
            auto entries = acc.drain(false);
            centroids[j].ids.clear();
            centroids[j].values.clear();
            for (const auto& [c, v] : entries) {
                centroids[j].ids.push_back(c);
                centroids[j].values.push_back(v * inv);
            }
        }
    }

    std::vector<std::vector<DocId>> by_centroid(beta);
    for (std::size_t i = 0; i < docs.size(); ++i) by_centroid[assignment[i]].push_back(docs[i]);
    for (auto& b : by_centroid)
        if (!b.empty()) blocks.push_back(std::move(b));
    return blocks;
}

// ---------------------------------------------------------------------------

SeismicIndex SeismicIndex::build(const Dataset& dataset, const SeismicParams& params, unsigned workers) {
    require(!dataset.empty(), "seismic build: dataset is empty");
    require(dataset.nonneg(), "seismic build: dataset must be non-negative");
    require(params.lambda >= 1, "seismic build: lambda must be at least 1");
    require(params.beta >= 1, "seismic build: beta must be at least 1");
    require(params.alpha > 0.0 && params.alpha <= 1.0, "seismic build: alpha must be in (0, 1]");
    require(dataset.size() <= UINT32_MAX, "seismic build: too many documents");

    SeismicIndex index;
    index.params_ = params;
    index.forward_ = dataset.quantized();
    const Dataset& fwd = index.forward_;
    const std::uint64_t dim = fwd.dim();

    // Transpose into per-component posting lists, doc ids ascending.
    std::vector<std::uint64_t> col_offsets(dim + 1, 0);
    for (auto c : fwd.ids()) ++col_offsets[c + 1];
    std::partial_sum(col_offsets.begin(), col_offsets.end(), col_offsets.begin());
    std::vector<DocId> col_docs(fwd.nnz());
    std::vector<float> col_values(fwd.nnz());
    {
        std::vector<std::uint64_t> fill(col_offsets.begin(), col_offsets.end() - 1);
        for (std::size_t d = 0; d < fwd.size(); ++d) {
            const SparseView v = fwd[d];
            for (std::size_t i = 0; i < v.size(); ++i) {
                const auto at = fill[v.ids[i]]++;
                col_docs[at] = static_cast<DocId>(d);
                col_values[at] = v.values[i];
            }
        }
    }

    struct ListBuild {
        std::vector<std::vector<DocId>> blocks;
        std::vector<SparseVector> summaries;
    };
    std::vector<ListBuild> lists(dim);
    parallel_for(dim, workers, [&](std::size_t c, unsigned) {
        const auto begin = col_offsets[c];
        const auto len = col_offsets[c + 1] - begin;
        if (len == 0) return;
        std::vector<std::uint64_t> order(len);
        std::iota(order.begin(), order.end(), begin);
        auto by_value = [&](std::uint64_t a, std::uint64_t b) {
            return col_values[a] > col_values[b] || (col_values[a] == col_values[b] && col_docs[a] < col_docs[b]);
        };
        if (len > params.lambda) {
            std::nth_element(order.begin(), order.begin() + params.lambda, order.end(), by_value);
            order.resize(params.lambda);
        }
        std::sort(order.begin(), order.end(), by_value);
        std::vector<DocId> docs(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) docs[i] = col_docs[order[i]];

        auto& out = lists[c];
        out.blocks = cluster_list(fwd, docs, params.beta, splitmix64(params.seed ^ splitmix64(c)));
        out.summaries.reserve(out.blocks.size());
        for (const auto& b : out.blocks) out.summaries.push_back(build_summary(fwd, b, params.alpha, params.energy));
    });

    index.list_offsets_.assign(1, 0);
    index.list_offsets_.reserve(dim + 1);
    for (std::uint64_t c = 0; c < dim; ++c) {
        for (std::size_t b = 0; b < lists[c].blocks.size(); ++b) {
            const auto& docs = lists[c].blocks[b];
            index.postings_.insert(index.postings_.end(), docs.begin(), docs.end());
            require(index.postings_.size() <= UINT32_MAX, "seismic build: too many postings");
            index.block_offsets_.push_back(static_cast<std::uint32_t>(index.postings_.size()));
            const auto& s = lists[c].summaries[b];
            index.summary_ids_.insert(index.summary_ids_.end(), s.ids().begin(), s.ids().end());
            index.summary_values_.insert(index.summary_values_.end(), s.values().begin(), s.values().end());
            require(index.summary_ids_.size() <= UINT32_MAX, "seismic build: summaries too large");
            index.summary_offsets_.push_back(static_cast<std::uint32_t>(index.summary_ids_.size()));
        }
        index.list_offsets_.push_back(static_cast<std::uint32_t>(index.block_offsets_.size() - 1));
        lists[c] = {};
    }
    return index;
}

std::pair<std::uint32_t, std::uint32_t> SeismicIndex::list_blocks(ComponentId c) const noexcept {
    if (c + 1ULL >= list_offsets_.size()) return {0, 0};
    return {list_offsets_[c], list_offsets_[c + 1]};
}

std::span<const DocId> SeismicIndex::block_docs(std::uint32_t block) const noexcept {
    return std::span(postings_).subspan(block_offsets_[block], block_offsets_[block + 1] - block_offsets_[block]);
}

SparseView SeismicIndex::block_summary(std::uint32_t block) const noexcept {
    const auto b = summary_offsets_[block];
    const auto e = summary_offsets_[block + 1];
    return {std::span(summary_ids_).subspan(b, e - b), std::span(summary_values_).subspan(b, e - b)};
}

std::vector<ScoredDoc> SeismicIndex::search(SparseView query, const SeismicQuery& q, SearchTrace* trace) const {
    require(q.k >= 1, "seismic search: k must be at least 1");
    require(q.cut >= 1, "seismic search: cut must be at least 1");
    require(q.heap_factor > 0.0 && q.heap_factor <= 1.0, "seismic search: heap_factor must be in (0, 1]");

    auto& s = tl_search;
    s.prepare(dim(), size());
    s.dense.load(query);

    s.query_terms.clear();
    for (std::size_t i = 0; i < query.size(); ++i) s.query_terms.emplace_back(query.values[i], query.ids[i]);
    const std::size_t cut = std::min<std::size_t>(q.cut, s.query_terms.size());
    auto by_weight = [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); };
    std::partial_sort(s.query_terms.begin(), s.query_terms.begin() + cut, s.query_terms.end(), by_weight);

    TopKHeap heap(q.k);
    for (std::size_t t = 0; t < cut; ++t) {
        const ComponentId comp = s.query_terms[t].second;
        if (trace) trace->lists.push_back(comp);
        const auto [first, last] = list_blocks(comp);
        if (first == last) continue;

        s.potentials.clear();
        for (std::uint32_t b = first; b < last; ++b) s.potentials.emplace_back(s.dense.score(block_summary(b)), b);
        std::sort(s.potentials.begin(), s.potentials.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });

        for (const auto& [potential, b] : s.potentials) {
            // Potentials are visited in descending order and the threshold
            // only changes when a block is evaluated, so the first skip ends
            // the list.
            if (heap.full() && !(q.heap_factor * potential > heap.threshold())) break;
            if (trace) trace->blocks.push_back(b);
            for (DocId d : block_docs(b)) {
                if (!s.visit(d)) continue;
                if (trace) trace->scored_docs.push_back(d);
                heap.push({d, s.dense.score(forward_[d])});
            }
        }
    }

    auto results = heap.sorted();
    if (q.use_knn) results = expand_and_rescore(results, query, q.k);
    s.dense.clear();
    return results;
}

std::vector<ScoredDoc> SeismicIndex::expand_and_rescore(std::span<const ScoredDoc> results, SparseView query,
                                                        std::size_t k) const {
    if (!knn_) fail(ErrorCode::InvalidArgument, "expand_and_rescore: index has no kNN graph");
    require(k >= 1, "expand_and_rescore: k must be at least 1");
    // Own scratch: may run nested inside search(), which holds tl_search.
    thread_local DenseQuery dense;
    thread_local std::vector<DocId> pool;
    if (dense.dim() != dim()) dense = DenseQuery(dim());
    dense.load(query);
    pool.clear();
    for (const auto& r : results) {
        pool.push_back(r.doc);
        for (std::uint32_t j = 0; j < knn_->kappa(); ++j) pool.push_back(knn_->neighbor(r.doc, j));
    }
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    TopKHeap heap(k);
    for (DocId d : pool) heap.push({d, dense.score(forward_[d])});
    dense.clear();
    return heap.sorted();
}

void SeismicIndex::attach_knn(KnnGraph graph) {
    require(graph.size() == size(), "attach_knn: graph size does not match the index");
    knn_ = std::move(graph);
}

SeismicSize SeismicIndex::size_bytes() const noexcept {
    const std::uint64_t id_bytes = dim() <= 65536 ? 2 : 4;
    SeismicSize s;
    s.forward = forward_.storage_bytes();
    s.postings = 4 * (list_offsets_.size() + block_offsets_.size() + postings_.size());
    s.summaries = 4 * summary_offsets_.size() + (id_bytes + 2) * summary_ids_.size();
    s.knn = knn_ ? knn_->payload_bytes() : 0;
    return s;
}

std::uint64_t SeismicIndex::file_header_bytes() noexcept { return 8 + 4 * 2 + 4 * 2 + 8 + 8 + 4 * 2 + 8 * 6; }

namespace {

void put_ids(binio::Writer& w, std::span<const ComponentId> ids, bool wide) {
    if (wide) {
        w.put_span<ComponentId>(ids);
        return;
    }
    std::vector<std::uint16_t> narrow(ids.begin(), ids.end());
    w.put_span<std::uint16_t>(narrow);
}

void put_halves(binio::Writer& w, std::span<const float> values) {
    std::vector<std::uint16_t> bits(values.size());
    std::transform(values.begin(), values.end(), bits.begin(), to_half_bits);
    w.put_span<std::uint16_t>(bits);
}

std::vector<ComponentId> get_ids(binio::Reader& r, std::uint64_t count, bool wide, const char* what) {
    if (wide) return r.get_vector<ComponentId>(count, what);
    const auto narrow = r.get_vector<std::uint16_t>(count, what);
    return {narrow.begin(), narrow.end()};
}

std::vector<float> get_halves(binio::Reader& r, std::uint64_t count, const char* what) {
    const auto bits = r.get_vector<std::uint16_t>(count, what);
    std::vector<float> out(count);
    std::transform(bits.begin(), bits.end(), out.begin(), from_half_bits);
    return out;
}

template <typename T>
void check_offsets(const binio::Reader& r, const std::vector<T>& offsets, std::uint64_t end, const char* what) {
    if (offsets.empty() || offsets.front() != 0 || offsets.back() != end)
        r.format_error(std::string(what) + " offsets do not span their section", r.offset());
    for (std::size_t i = 1; i < offsets.size(); ++i)
        if (offsets[i] < offsets[i - 1]) r.format_error(std::string(what) + " offsets decrease", r.offset());
}

}  // namespace

std::vector<std::uint8_t> SeismicIndex::serialize() const {
    const bool wide = dim() > 65536;
    binio::Writer w;
    w.put_bytes(kMagic.data(), kMagic.size());
    w.put<std::uint32_t>(kVersion);
    w.put<std::uint32_t>((knn_ ? kFlagKnn : 0u) | (wide ? kFlagWideIds : 0u));
    w.put<std::uint32_t>(params_.lambda);
    w.put<std::uint32_t>(params_.beta);
    w.put<double>(params_.alpha);
    w.put<std::uint64_t>(params_.seed);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(params_.energy));
    w.put<std::uint32_t>(0);
    w.put<std::uint64_t>(size());
    w.put<std::uint64_t>(dim());
    w.put<std::uint64_t>(forward_.nnz());
    w.put<std::uint64_t>(num_blocks());
    w.put<std::uint64_t>(postings_.size());
    w.put<std::uint64_t>(summary_ids_.size());

    w.put_span<std::uint64_t>(forward_.offsets());
    put_ids(w, forward_.ids(), wide);
    put_halves(w, forward_.values());

    w.put_span<std::uint32_t>(list_offsets_);
    w.put_span<std::uint32_t>(block_offsets_);
    w.put_span<DocId>(postings_);

    w.put_span<std::uint32_t>(summary_offsets_);
    put_ids(w, summary_ids_, wide);
    put_halves(w, summary_values_);

    if (knn_) knn_->write(w);
    return w.bytes();
}

void SeismicIndex::save(const std::filesystem::path& path) const {
    binio::Writer w;
    const auto bytes = serialize();
    w.put_bytes(bytes.data(), bytes.size());
    w.save(path);
}

SeismicIndex SeismicIndex::load(const std::filesystem::path& path) {
    auto r = binio::Reader::load(path);
    std::vector<std::uint8_t> bytes = r.get_vector<std::uint8_t>(r.remaining(), "index");
    return deserialize(std::move(bytes));
}

SeismicIndex SeismicIndex::deserialize(std::vector<std::uint8_t> bytes) {
    binio::Reader r(std::move(bytes));
    std::array<char, 8> magic{};
    for (auto& ch : magic) ch = r.get<char>("magic");
    if (magic != kMagic) r.format_error("not a Seismic index file (bad magic)", 0);
    const auto version = r.get<std::uint32_t>("version");
    if (version != kVersion)
        r.format_error("unsupported Seismic index version " + std::to_string(version), 8);
    const auto flags = r.get<std::uint32_t>("flags");
    const bool wide = flags & kFlagWideIds;

    SeismicIndex index;
    index.params_.lambda = r.get<std::uint32_t>("lambda");
    index.params_.beta = r.get<std::uint32_t>("beta");
    index.params_.alpha = r.get<double>("alpha");
    index.params_.seed = r.get<std::uint64_t>("seed");
    const auto energy = r.get<std::uint32_t>("energy");
    if (energy > 1) r.format_error("unknown summary energy", r.offset() - 4);
    index.params_.energy = static_cast<SummaryEnergy>(energy);
    (void)r.get<std::uint32_t>("reserved");
    const auto n = r.get<std::uint64_t>("n");
    const auto dim = r.get<std::uint64_t>("dim");
    const auto nnz = r.get<std::uint64_t>("nnz");
    const auto blocks = r.get<std::uint64_t>("blocks");
    const auto postings = r.get<std::uint64_t>("postings");
    const auto entries = r.get<std::uint64_t>("summary entries");
    if (wide != (dim > 65536)) r.format_error("component id width flag does not match dim", 12);

    auto offsets = r.get_vector<std::uint64_t>(n + 1, "forward offsets");
    check_offsets(r, offsets, nnz, "forward");
    auto ids = get_ids(r, nnz, wide, "forward ids");
    auto values = get_halves(r, nnz, "forward values");
    try {
        index.forward_ = Dataset(std::move(offsets), std::move(ids), std::move(values), dim);
    } catch (const Error& e) {
        r.format_error(std::string("invalid forward index: ") + e.what(), r.offset());
    }

    index.list_offsets_ = r.get_vector<std::uint32_t>(dim + 1, "list offsets");
    check_offsets(r, index.list_offsets_, blocks, "list");
    index.block_offsets_ = r.get_vector<std::uint32_t>(blocks + 1, "block offsets");
    check_offsets(r, index.block_offsets_, postings, "block");
    index.postings_ = r.get_vector<DocId>(postings, "postings");
    for (DocId d : index.postings_)
        if (d >= n) r.format_error("posting doc id out of range", r.offset());

    index.summary_offsets_ = r.get_vector<std::uint32_t>(blocks + 1, "summary offsets");
    check_offsets(r, index.summary_offsets_, entries, "summary");
    index.summary_ids_ = get_ids(r, entries, wide, "summary ids");
    index.summary_values_ = get_halves(r, entries, "summary values");

    if (flags & kFlagKnn) {
        index.knn_ = KnnGraph::read(r);
        if (index.knn_->size() != n) r.format_error("kNN graph size does not match the index", r.offset());
    }
    if (!r.at_end()) r.format_error("trailing bytes after index", r.offset());
    return index;
}

// ---------------------------------------------------------------------------
// kNN graph construction

namespace {

/// Drops `self`, keeps the first kappa entries, and pads when short: first
/// from `seen` (exactly scored candidates), then with the smallest unused ids,
/// each padding batch ordered by exact score.
std::vector<DocId> finish_neighbors(std::vector<ScoredDoc> ranked, DocId self, std::uint32_t kappa,
                                    const Dataset& forward, SparseView query, std::span<const DocId> seen) {
    std::vector<DocId> out;
    out.reserve(kappa);
    auto take = [&](DocId d) {
        if (d == self || out.size() == kappa) return;
        if (std::find(out.begin(), out.end(), d) != out.end()) return;
        out.push_back(d);
    };
    for (const auto& r : ranked) take(r.doc);
    if (out.size() == kappa) return out;

    auto pad_from = [&](std::span<const DocId> pool) {
        std::vector<ScoredDoc> extra;
        for (DocId d : pool)
            if (d != self && std::find(out.begin(), out.end(), d) == out.end()) extra.push_back({d, dot(query, forward[d])});
        std::sort(extra.begin(), extra.end(), ranks_before);
        for (const auto& e : extra) take(e.doc);
    };
    pad_from(seen);
    if (out.size() == kappa) return out;

    std::vector<DocId> smallest;
    for (DocId d = 0; d < forward.size() && out.size() + smallest.size() < kappa; ++d)
        if (d != self && std::find(out.begin(), out.end(), d) == out.end()) smallest.push_back(d);
    pad_from(smallest);
    return out;
}

}  // namespace

KnnGraph build_knn_graph(const SeismicIndex& index, std::uint32_t kappa, std::uint32_t cut, double heap_factor,
                         unsigned workers) {
    const auto n = index.size();
    require(kappa >= 1, "build_knn_graph: kappa must be at least 1");
    require(kappa < n, "build_knn_graph: kappa must be smaller than n");
    std::vector<DocId> neighbors(n * std::uint64_t{kappa});
    const SeismicQuery q{.k = kappa + std::size_t{1}, .cut = cut, .heap_factor = heap_factor, .use_knn = false};
    std::vector<SearchTrace> traces(effective_workers(n, workers));
    parallel_for(n, workers, [&](std::size_t u, unsigned w) {
        const SparseView doc = index.forward()[u];
        auto& trace = traces[w];
        trace = {};
        auto ranked = index.search(doc, q, &trace);
        const auto row = finish_neighbors(std::move(ranked), static_cast<DocId>(u), kappa, index.forward(), doc,
                                          trace.scored_docs);
        std::copy(row.begin(), row.end(), neighbors.begin() + u * kappa);
    });
    return KnnGraph(n, kappa, neighbors);
}

KnnGraph build_knn_graph(const Dataset& dataset, std::uint32_t kappa, KnnMode mode, const KnnBuildParams& params,
                         unsigned workers) {
    const auto n = dataset.size();
    require(kappa >= 1, "build_knn_graph: kappa must be at least 1");
    require(kappa < n, "build_knn_graph: kappa=" + std::to_string(kappa) + " must be smaller than n=" +
                           std::to_string(n));
    if (mode == KnnMode::Approx) {
        const auto index = SeismicIndex::build(dataset, params.index, workers);
        return build_knn_graph(index, kappa, params.cut, params.heap_factor, workers);
    }
    std::vector<DocId> neighbors(n * std::uint64_t{kappa});
    parallel_for(n, workers, [&](std::size_t u, unsigned) {
        const SparseView doc = dataset[u];
        auto ranked = exact_topk(dataset, doc, kappa + 1);
        const auto row = finish_neighbors(std::move(ranked), static_cast<DocId>(u), kappa, dataset, doc, {});
        std::copy(row.begin(), row.end(), neighbors.begin() + u * kappa);
    });
    return KnnGraph(n, kappa, neighbors);
}

}  // namespace lsr

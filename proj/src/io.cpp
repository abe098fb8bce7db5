#include "lsr/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "lsr/binio.hpp"
#include "lsr/grids.hpp"

namespace lsr {

namespace binio {

void Writer::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
    if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

Reader Reader::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return Reader(std::move(bytes));
}

}  // namespace binio

Dataset read_csr(const std::filesystem::path& path) {
    auto r = binio::Reader::load(path);
    const auto n_rows = r.get<std::uint64_t>("n_rows");
    const auto n_cols = r.get<std::uint64_t>("n_cols");
    const auto nnz = r.get<std::uint64_t>("nnz");
    if (n_rows == UINT64_MAX) r.format_error("n_rows overflow", 0);
    const std::size_t indptr_at = r.offset();
    auto indptr = r.get_vector<std::uint64_t>(n_rows + 1, "indptr");
    const std::size_t indices_at = r.offset();
    auto indices = r.get_vector<std::uint32_t>(nnz, "indices");
    auto values = r.get_vector<float>(nnz, "values");
    if (!r.at_end()) r.format_error("trailing bytes after values", r.offset());

    if (indptr[0] != 0) r.format_error("indptr[0] must be 0", indptr_at);
    for (std::uint64_t i = 1; i <= n_rows; ++i) {
        if (indptr[i] > nnz) r.format_error("indptr[" + std::to_string(i) + "] exceeds nnz", indptr_at + 8 * i);
        if (indptr[i] < indptr[i - 1]) r.format_error("indptr decreases", indptr_at + 8 * i);
    }
    if (indptr[n_rows] != nnz) r.format_error("indptr[n_rows] != nnz", indptr_at + 8 * n_rows);
    for (std::uint64_t row = 0; row < n_rows; ++row) {
        for (std::uint64_t j = indptr[row]; j < indptr[row + 1]; ++j) {
            if (indices[j] >= n_cols)
                r.format_error("component index " + std::to_string(indices[j]) + " >= n_cols", indices_at + 4 * j);
            if (j > indptr[row] && indices[j] <= indices[j - 1])
                r.format_error("indices not strictly increasing within row " + std::to_string(row),
                               indices_at + 4 * j);
        }
    }
    for (std::uint64_t j = 0; j < nnz; ++j)
        if (!std::isfinite(values[j])) r.format_error("non-finite value", indices_at + 4 * nnz + 4 * j);
    return Dataset(std::move(indptr), std::move(indices), std::move(values), n_cols);
}

void write_csr(const Dataset& dataset, const std::filesystem::path& path) {
    binio::Writer w;
    w.put<std::uint64_t>(dataset.size());
    w.put<std::uint64_t>(dataset.dim());
    w.put<std::uint64_t>(dataset.nnz());
    w.put_span<std::uint64_t>(dataset.offsets());
    w.put_span<std::uint32_t>(dataset.ids());
    w.put_span<float>(dataset.values());
    w.save(path);
}

void GroundTruth::validate() const {
    require(k >= 1, "ground truth: k must be at least 1");
    const std::uint64_t total = std::uint64_t{n_queries} * k;
    require(ids.size() == total && scores.size() == total, "ground truth: array sizes do not match n_queries * k");
    for (std::uint32_t q = 0; q < n_queries; ++q) {
        auto s = scores_of(q);
        for (std::uint32_t i = 1; i < k; ++i)
            require(s[i] <= s[i - 1], "ground truth: scores increase within query " + std::to_string(q));
        auto id = ids_of(q);
        std::unordered_set<DocId> seen(id.begin(), id.end());
        require(seen.size() == k, "ground truth: duplicate ids within query " + std::to_string(q));
    }
}

GroundTruth read_ground_truth(const std::filesystem::path& path, std::optional<std::uint32_t> expected_k) {
    auto r = binio::Reader::load(path);
    GroundTruth gt;
    gt.n_queries = r.get<std::uint32_t>("n_queries");
    gt.k = r.get<std::uint32_t>("k");
    if (gt.k == 0) r.format_error("ground truth k must be at least 1", 4);
    if (expected_k && gt.k != *expected_k)
        fail(ErrorCode::InvalidArgument, "ground truth has k=" + std::to_string(gt.k) + ", expected " +
                                             std::to_string(*expected_k));
    const std::uint64_t total = std::uint64_t{gt.n_queries} * gt.k;
    gt.ids = r.get_vector<DocId>(total, "ids");
    gt.scores = r.get_vector<float>(total, "scores");
    if (!r.at_end()) r.format_error("trailing bytes after scores", r.offset());
    try {
        gt.validate();
    } catch (const Error& e) {
        fail(ErrorCode::Format, e.what());
    }
    return gt;
}

void write_ground_truth(const GroundTruth& gt, const std::filesystem::path& path) {
    gt.validate();
    binio::Writer w;
    w.put<std::uint32_t>(gt.n_queries);
    w.put<std::uint32_t>(gt.k);
    w.put_span<DocId>(gt.ids);
    w.put_span<float>(gt.scores);
    w.save(path);
}

// ---------------------------------------------------------------------------
// Run configuration

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) fail(ErrorCode::InvalidArgument, "config: '" + where + "' must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            fail(ErrorCode::InvalidArgument, "config: unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidArgument, std::string("config: bad value for '") + key + "': " + e.what());
    }
}

template <typename T>
bool on_grid(T v, const std::vector<T>& grid) {
    if constexpr (std::is_floating_point_v<T>) {
        return std::any_of(grid.begin(), grid.end(), [&](T g) { return std::abs(g - v) < 1e-9; });
    } else {
        return std::find(grid.begin(), grid.end(), v) != grid.end();
    }
}

template <typename T>
void check_grid(const std::vector<T>& values, const std::vector<T>& grid, const char* name) {
    for (auto v : values) {
        if (!on_grid(v, grid)) {
            std::ostringstream os;
            os << "config: " << name << "=" << v << " is outside the default grid (set off_grid to override)";
            fail(ErrorCode::InvalidArgument, os.str());
        }
    }
}

}  // namespace

RunConfig RunConfig::defaults(const std::string& algorithm) {
    RunConfig c;
    c.algorithm = algorithm;
    c.k = grids::default_k;
    c.seismic.lambda = grids::seismic_lambda();
    c.seismic.alpha = grids::seismic_alpha;
    c.seismic.beta_ratio = grids::seismic_beta_ratio;
    c.seismic.knn = {0};
    for (auto kk : grids::seismic_knn()) c.seismic.knn.push_back(kk);
    c.seismic.knn_lambda = grids::knn_lambda;
    c.seismic.knn_cut = grids::knn_cut;
    c.seismic.knn_heap_factor = grids::knn_heap_factor;
    c.seismic.cut = grids::seismic_cut();
    c.seismic.heap_factor = grids::seismic_heap_factor();
    c.hnsw.m = grids::hnsw_m();
    c.hnsw.ef_construction = grids::hnsw_ef_construction;
    c.hnsw.ef_search = grids::hnsw_ef_search();
    return c;
}

RunConfig RunConfig::parse(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(ErrorCode::Format, std::string("config: not valid JSON: ") + e.what());
    }
    reject_unknown(doc,
                   {"dataset", "queries", "ground_truth", "algorithm", "seed", "build", "query", "budget", "k",
                    "output", "dataset_tag", "workers", "off_grid"},
                   "top level");
    std::string algorithm;
    read_opt(doc, "algorithm", algorithm);
    RunConfig c = defaults(algorithm);
    read_opt(doc, "dataset", c.dataset);
    read_opt(doc, "queries", c.queries);
    read_opt(doc, "ground_truth", c.ground_truth);
    read_opt(doc, "seed", c.seed);
    read_opt(doc, "budget", c.budget);
    read_opt(doc, "k", c.k);
    read_opt(doc, "output", c.output);
    read_opt(doc, "dataset_tag", c.dataset_tag);
    read_opt(doc, "workers", c.workers);
    read_opt(doc, "off_grid", c.off_grid);

    const json empty = json::object();
    const json& build = doc.contains("build") ? doc.at("build") : empty;
    const json& query = doc.contains("query") ? doc.at("query") : empty;
    if (algorithm == "seismic") {
        reject_unknown(build,
                       {"lambda", "lambda_scale", "beta_ratio", "alpha", "knn", "knn_mode", "knn_lambda", "knn_cut",
                        "knn_heap_factor"},
                       "build");
        reject_unknown(query, {"cut", "heap_factor"}, "query");
        auto& s = c.seismic;
        read_opt(build, "lambda", s.lambda);
        read_opt(build, "lambda_scale", s.lambda_scale);
        read_opt(build, "beta_ratio", s.beta_ratio);
        read_opt(build, "alpha", s.alpha);
        read_opt(build, "knn", s.knn);
        read_opt(build, "knn_mode", s.knn_mode);
        read_opt(build, "knn_lambda", s.knn_lambda);
        read_opt(build, "knn_cut", s.knn_cut);
        read_opt(build, "knn_heap_factor", s.knn_heap_factor);
        read_opt(query, "cut", s.cut);
        read_opt(query, "heap_factor", s.heap_factor);
    } else if (algorithm == "hnsw") {
        reject_unknown(build, {"M", "ef_construction"}, "build");
        reject_unknown(query, {"ef_search", "qprune"}, "query");
        read_opt(build, "M", c.hnsw.m);
        read_opt(build, "ef_construction", c.hnsw.ef_construction);
        read_opt(query, "ef_search", c.hnsw.ef_search);
        read_opt(query, "qprune", c.hnsw.qprune);
    }
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void RunConfig::validate() const {
    require(algorithm == "seismic" || algorithm == "hnsw",
            "config: algorithm must be 'seismic' or 'hnsw', got '" + algorithm + "'");
    require(k >= 1, "config: k must be at least 1");
    require(budget > 0.0, "config: budget must be positive");
    if (algorithm == "seismic") {
        const auto& s = seismic;
        require(!s.lambda.empty() && !s.cut.empty() && !s.heap_factor.empty() && !s.knn.empty(),
                "config: seismic grids must be non-empty");
        require(s.lambda_scale > 0.0, "config: lambda_scale must be positive");
        require(s.beta_ratio > 0.0, "config: beta_ratio must be positive");
        require(s.alpha > 0.0 && s.alpha <= 1.0, "config: alpha must be in (0, 1]");
        require(s.knn_mode == "approx" || s.knn_mode == "exact", "config: knn_mode must be 'approx' or 'exact'");
        for (auto l : s.lambda) require(l >= 1, "config: lambda must be at least 1");
        for (auto cut : s.cut) require(cut >= 1, "config: cut must be at least 1");
        for (auto h : s.heap_factor) require(h > 0.0 && h <= 1.0, "config: heap_factor must be in (0, 1]");
        require(s.knn_cut >= 1 && s.knn_lambda >= 1, "config: knn_cut and knn_lambda must be at least 1");
        require(s.knn_heap_factor > 0.0 && s.knn_heap_factor <= 1.0, "config: knn_heap_factor must be in (0, 1]");
        if (!off_grid) {
            check_grid(s.lambda, grids::seismic_lambda(), "lambda");
            check_grid(s.cut, grids::seismic_cut(), "cut");
            check_grid(s.heap_factor, grids::seismic_heap_factor(), "heap_factor");
            auto knn_grid = grids::seismic_knn();
            knn_grid.push_back(0);
            check_grid(s.knn, knn_grid, "knn");
            check_grid(std::vector{s.alpha}, std::vector{grids::seismic_alpha}, "alpha");
            check_grid(std::vector{s.beta_ratio}, std::vector{grids::seismic_beta_ratio}, "beta_ratio");
            check_grid(std::vector{s.knn_lambda}, std::vector{grids::knn_lambda}, "knn_lambda");
            check_grid(std::vector{s.knn_cut}, std::vector{grids::knn_cut}, "knn_cut");
            check_grid(std::vector{s.knn_heap_factor}, std::vector{grids::knn_heap_factor}, "knn_heap_factor");
        }
    } else {
        const auto& h = hnsw;
        require(!h.m.empty() && !h.ef_search.empty(), "config: hnsw grids must be non-empty");
        for (auto m : h.m) require(m >= 2, "config: M must be at least 2");
        require(h.ef_construction >= 1, "config: ef_construction must be at least 1");
        for (auto e : h.ef_search) require(e >= k, "config: every ef_search must be >= k");
        require(h.qprune >= 0.0 && h.qprune <= 1.0, "config: qprune must be in [0, 1]");
        if (!off_grid) {
            check_grid(h.m, grids::hnsw_m(), "M");
            check_grid(std::vector{h.ef_construction}, std::vector{grids::hnsw_ef_construction}, "ef_construction");
            check_grid(h.ef_search, grids::hnsw_ef_search(), "ef_search");
        }
    }
    if (!off_grid) {
        check_grid(std::vector{budget}, grids::budgets(), "budget");
    }
}

std::string RunConfig::to_json() const {
    json doc = {{"dataset", dataset},     {"queries", queries}, {"ground_truth", ground_truth},
                {"algorithm", algorithm}, {"seed", seed},       {"budget", budget},
                {"k", k},                 {"output", output},   {"dataset_tag", dataset_tag},
                {"workers", workers},     {"off_grid", off_grid}};
    if (algorithm == "seismic") {
        const auto& s = seismic;
        doc["build"] = {{"lambda", s.lambda},       {"lambda_scale", s.lambda_scale},
                        {"beta_ratio", s.beta_ratio}, {"alpha", s.alpha},
                        {"knn", s.knn},             {"knn_mode", s.knn_mode},
                        {"knn_lambda", s.knn_lambda}, {"knn_cut", s.knn_cut},
                        {"knn_heap_factor", s.knn_heap_factor}};
        doc["query"] = {{"cut", s.cut}, {"heap_factor", s.heap_factor}};
    } else {
        doc["build"] = {{"M", hnsw.m}, {"ef_construction", hnsw.ef_construction}};
        doc["query"] = {{"ef_search", hnsw.ef_search}, {"qprune", hnsw.qprune}};
    }
    return doc.dump(2);
}

}  // namespace lsr

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
// Usage: lsr_acceptance [--work DIR] [--only NAME]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lsr/bench.hpp"
#include "lsr/grids.hpp"
#include "lsr/hnsw.hpp"
#include "lsr/io.hpp"
#include "lsr/oracle.hpp"
#include "lsr/seismic.hpp"

using namespace lsr;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::filesystem::path g_work = std::filesystem::temp_directory_path() / "lsr_acceptance";

void note(const std::string& s) { std::cerr << "  .. " << s << std::endl; }

std::string fmt(double v, int p = 4) { return format_number(v, p); }

// Reference collections: 10k "small" and 100k "large", 200 queries each.
SynthParams desk_params(std::uint64_t n, std::uint64_t seed) {
    SynthParams p;
    p.n = n;
    p.dim = 30000;
    p.doc_nnz = 127.0;
    p.query_nnz = 44.0;
    p.n_queries = 200;
    p.seed = seed;
    return p;
}

const std::pair<Dataset, Dataset>& small_data() {
    static const auto d = synth_dataset(desk_params(10000, 7));
    return d;
}

const GroundTruth& small_gt() {
    static const GroundTruth gt = exact_topk_batch(small_data().first, small_data().second, 10, 0);
    return gt;
}

// Lambda is an absolute posting count tuned for 138M documents. Scaling by
// n / 1.38e8 keeps the retained fraction of each list comparable.
double lambda_scale_for(std::uint64_t n) { return static_cast<double>(n) / 1.38e8; }

std::vector<DocId> sorted_ids(std::span<const ScoredDoc> r) {
    auto ids = ids_of(r);
    std::sort(ids.begin(), ids.end());
    return ids;
}

double mean_accuracy(const GroundTruth& gt, const std::function<std::vector<ScoredDoc>(std::size_t)>& search) {
    double s = 0.0;
    for (std::size_t q = 0; q < gt.n_queries; ++q) s += accuracy_at_k(ids_of(search(q)), gt.ids_of(q), gt.k);
    return s / static_cast<double>(gt.n_queries);
}

// ---- exactness and bounds ------------------------------------------------

Verdict safe_mode() {
    const auto t0 = Clock::now();
    const auto& [docs, queries] = small_data();
    SeismicParams p;
    p.lambda = 100000000;  // beyond any list length
    p.beta = 10000000;     // every doc its own block
    p.alpha = 1.0;
    const auto index = SeismicIndex::build(docs, p, 0);
    std::size_t identical = 0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const SeismicQuery sq{.k = 10, .cut = static_cast<std::uint32_t>(queries[q].size()), .heap_factor = 1.0};
        identical += sorted_ids(index.search(queries[q], sq)) == sorted_ids(exact_topk(docs, queries[q], 10));
    }
    const double secs = seconds_since(t0);
    return {identical == queries.size() && secs < 300.0,
            std::to_string(identical) + "/" + std::to_string(queries.size()) + " queries identical to the oracle in " +
                fmt(secs, 1) + " s"};
}

Verdict summary_dominance() {
    const auto& [docs, queries] = small_data();
    const auto index = SeismicIndex::build(docs, {.lambda = 60, .beta = 6, .alpha = 1.0}, 0);
    const auto& fwd = index.forward();
    DenseQuery dq(fwd.dim());
    std::vector<float> doc_score(fwd.size());
    std::uint64_t checks = 0, violations = 0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        dq.load(queries[q]);
        for (std::size_t d = 0; d < fwd.size(); ++d) doc_score[d] = dq.score(fwd[d]);
        for (std::uint32_t b = 0; b < index.num_blocks(); ++b) {
            const float p = dq.score(index.block_summary(b));
            for (DocId m : index.block_docs(b)) {
                ++checks;
                violations += doc_score[m] > p;
            }
        }
        dq.clear();
    }
    return {violations == 0, std::to_string(index.num_blocks()) + " blocks, " + std::to_string(checks) +
                                 " (query, member) pairs, " + std::to_string(violations) + " violations"};
}

Verdict expansion_monotonicity() {
    const auto& [docs, queries] = small_data();
    const auto& gt = small_gt();
    const auto scale = lambda_scale_for(docs.size());
    std::uint64_t checks = 0, violations = 0, improved = 0;
    // The kNN graph comes from its own index, as in the protocol.
    SeismicParams kp;
    kp.lambda = static_cast<std::uint32_t>(std::max(1.0, std::round(grids::knn_lambda * scale)));
    kp.beta = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::round(kp.lambda * 0.1)));
    const auto knn_index = SeismicIndex::build(docs, kp, 0);
    const auto graph = build_knn_graph(knn_index, 10, grids::knn_cut, grids::knn_heap_factor, 0);
    for (std::uint32_t lambda : {30000u, 60000u, 90000u}) {
        SeismicParams p;
        p.lambda = static_cast<std::uint32_t>(std::max(1.0, std::round(lambda * scale)));
        p.beta = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::round(p.lambda * 0.1)));
        auto index = SeismicIndex::build(docs, p, 0);
        index.attach_knn(graph);
        for (auto cut : grids::seismic_cut()) {
            for (double hf : grids::seismic_heap_factor()) {
                for (std::size_t q = 0; q < queries.size(); ++q) {
                    const auto plain = index.search(queries[q], {.k = 10, .cut = cut, .heap_factor = hf});
                    const auto expanded = index.expand_and_rescore(plain, queries[q], 10);
                    const double a = accuracy_at_k(ids_of(plain), gt.ids_of(q), 10);
                    const double b = accuracy_at_k(ids_of(expanded), gt.ids_of(q), 10);
                    ++checks;
                    violations += b < a;
                    improved += b > a;
                }
            }
        }
    }
    return {violations == 0, std::to_string(checks) + " (config, query) pairs, " + std::to_string(violations) +
                                 " violations, " + std::to_string(improved) + " strictly improved"};
}

Verdict pruning_trend() {
    const auto& [docs, queries] = small_data();
    const auto& gt = small_gt();
    const auto index = SeismicIndex::build(docs, {.lambda = 30, .beta = 3, .alpha = 0.4}, 0);
    const auto cuts = grids::seismic_cut();
    const auto hfs = grids::seismic_heap_factor();
    std::vector<std::vector<double>> acc(cuts.size(), std::vector<double>(hfs.size()));
    for (std::size_t i = 0; i < cuts.size(); ++i)
        for (std::size_t j = 0; j < hfs.size(); ++j)
            acc[i][j] = mean_accuracy(gt, [&](std::size_t q) {
                return index.search(queries[q], {.k = 10, .cut = cuts[i], .heap_factor = hfs[j]});
            });
    const double tol = 0.005;
    int steps = 0, bad = 0;
    double worst = 0.0;  // most negative step
    auto step = [&](double from, double to) {
        ++steps;
        worst = std::min(worst, to - from);
        bad += to < from - tol;
    };
    for (std::size_t i = 0; i < cuts.size(); ++i)
        for (std::size_t j = 1; j < hfs.size(); ++j) step(acc[i][j - 1], acc[i][j]);
    for (std::size_t j = 0; j < hfs.size(); ++j)
        for (std::size_t i = 1; i < cuts.size(); ++i) step(acc[i - 1][j], acc[i][j]);
    return {bad == 0, std::to_string(steps) + " grid steps, " + std::to_string(bad) + " beyond 0.5 points, accuracy " +
                          fmt(acc.front().front()) + " at (cut 2, hf 0.6) to " + fmt(acc.back().back()) +
                          " at (cut 14, hf 1.0), largest drop " + fmt(std::max(0.0, -worst) * 100.0, 3) + " points"};
}

Verdict knn_storage() {
    std::ostringstream detail;
    bool ok = true;
    for (std::uint64_t n : {2ull, 1024ull, 100000ull}) {
        for (std::uint32_t kappa : {10u, 20u}) {
            const std::uint64_t bits = static_cast<std::uint64_t>(std::floor(std::log2(static_cast<double>(n - 1)))) + 1;
            const std::uint64_t expected = (bits * n * kappa + 7) / 8 + KnnGraph::header_bytes;
            if (kappa >= n) {
                // Fewer than kappa other documents exist: such a graph is rejected.
                bool rejected = false;
                try {
                    KnnGraph(n, kappa, std::vector<DocId>(n * kappa, 0));
                } catch (const Error&) {
                    rejected = true;
                }
                ok = ok && rejected;
                detail << "n=" << n << " k=" << kappa << ": rejected (kappa >= n); ";
                continue;
            }
            std::vector<DocId> ids(n * kappa);
            for (std::uint64_t u = 0; u < n; ++u)
                for (std::uint64_t j = 0; j < kappa; ++j) ids[u * kappa + j] = static_cast<DocId>((u + j + 1) % n);
            const KnnGraph g(n, kappa, ids);
            binio::Writer w;
            g.write(w);
            ok = ok && w.size() == expected;
            detail << "n=" << n << " k=" << kappa << ": " << w.size() << "/" << expected << " B; ";
        }
    }
    // n=2 supports kappa=1 only.
    const KnnGraph tiny(2, 1, std::vector<DocId>{1, 0});
    binio::Writer w;
    tiny.write(w);
    ok = ok && w.size() == 1 + KnnGraph::header_bytes;
    detail << "n=2 k=1: " << w.size() << "/" << 1 + KnnGraph::header_bytes << " B; ";
    // Inside an index file the section adds exactly its own size.
    const auto docs = synth_dataset(desk_params(1024, 3)).first;
    auto index = SeismicIndex::build(docs, {.lambda = 20, .beta = 2, .alpha = 0.4}, 0);
    const auto plain = index.serialize().size();
    index.attach_knn(build_knn_graph(docs, 10, KnnMode::Exact, {}, 0));
    const auto with = index.serialize().size();
    ok = ok && with - plain == 12800 + KnnGraph::header_bytes;
    detail << "index file grows by " << with - plain << " B";
    return {ok, detail.str()};
}

/// Nodes reachable from the entry point along layer-0 links.
std::size_t base_layer_reachable(const HnswIndex& index) {
    std::vector<bool> seen(index.size(), false);
    std::queue<DocId> todo;
    todo.push(index.entry_point());
    seen[index.entry_point()] = true;
    std::size_t count = 1;
    while (!todo.empty()) {
        const DocId u = todo.front();
        todo.pop();
        for (DocId v : index.neighbors(u, 0))
            if (!seen[v]) seen[v] = true, ++count, todo.push(v);
    }
    return count;
}

Verdict hnsw_sanity() {
    const auto& [docs, queries] = small_data();
    const auto& gt = small_gt();
    const auto t0 = Clock::now();
    const auto index = HnswIndex::build(docs, {.m = 32, .ef_construction = 500, .seed = 42});
    const double build = seconds_since(t0);
    const double acc500 = mean_accuracy(gt, [&](std::size_t q) { return index.search(queries[q], 10, 500); });
    const double acc_n = mean_accuracy(gt, [&](std::size_t q) { return index.search(queries[q], 10, docs.size()); });
    const auto reachable = base_layer_reachable(index);
    // A beam as wide as the collection visits every reachable node, so with a
    // connected base layer it must be exact. The check demands 1.0 either way.
    return {acc500 >= 0.95 && acc_n == 1.0,
            "build " + fmt(build, 1) + " s, ef_s=500 accuracy " + fmt(acc500) + ", " + std::to_string(reachable) +
                "/" + std::to_string(index.size()) + " nodes reachable on layer 0, ef_s=n accuracy " + fmt(acc_n)};
}

// ---- protocol ------------------------------------------------------------

struct ProtocolRun {
    std::filesystem::path dir;
    std::uint64_t dataset_bytes = 0;
    std::vector<ResultRow> rows;
    double seconds = 0.0;
};

/// Synthesizes the collection, computes ground truth, and sweeps Seismic and
/// HNSW over their default grids. Everything lands in `dir`.
ProtocolRun run_protocol(const std::string& tag, std::uint64_t n, std::uint64_t seed, const std::filesystem::path& dir) {
    const auto t0 = Clock::now();
    std::filesystem::create_directories(dir);
    const auto [docs, queries] = synth_dataset(desk_params(n, seed));
    write_csr(docs, dir / "docs.csr");
    write_csr(queries, dir / "queries.csr");
    write_ground_truth(exact_topk_batch(docs, queries, 10, 0), dir / "gt.bin");
    note(tag + ": data and ground truth ready after " + fmt(seconds_since(t0), 1) + " s");

    ProtocolRun out;
    out.dir = dir;
    out.dataset_bytes = docs.storage_bytes();
    for (const std::string algo : {"seismic", "hnsw"}) {
        auto c = RunConfig::defaults(algo);
        c.dataset = (dir / "docs.csr").string();
        c.queries = (dir / "queries.csr").string();
        c.ground_truth = (dir / "gt.bin").string();
        c.output = (dir / (algo + ".csv")).string();
        c.dataset_tag = tag;
        c.seed = 42;
        c.workers = 0;
        if (algo == "seismic") c.seismic.lambda_scale = lambda_scale_for(n);
        std::ofstream(dir / (algo + ".json")) << c.to_json() << '\n';
        const auto t1 = Clock::now();
        auto res = run(RunConfig::load(dir / (algo + ".json")));
        note(tag + ": " + algo + " sweep " + std::to_string(res.rows.size()) + " rows in " +
             fmt(seconds_since(t1), 1) + " s");
        out.rows.insert(out.rows.end(), res.rows.begin(), res.rows.end());
    }
    write_results_csv(out.rows, dir / "results.csv");
    for (double budget : grids::budgets()) {
        const auto t = budget_tables(read_results_csv(dir / "results.csv"), out.dataset_bytes, budget,
                                     grids::accuracy_cutoffs());
        const std::string b = format_number(budget, 1);
        write_results_csv(t.frontier, dir / ("frontier_" + b + ".csv"));
        write_best_time_csv(t.best, dir / ("best_time_" + b + ".csv"));
    }
    out.seconds = seconds_since(t0);
    return out;
}

std::string key(const ResultRow& r) { return r.algorithm + "|" + r.build_params + "|" + r.query_params; }

bool dominates(const ResultRow& b, const ResultRow& a) {
    return (b.accuracy >= a.accuracy && b.mean_latency_us < a.mean_latency_us) ||
           (b.accuracy > a.accuracy && b.mean_latency_us <= a.mean_latency_us);
}

/// Antichain per algorithm, nested budget sets, and the three series present.
bool check_protocol_tables(const ProtocolRun& p, std::ostringstream& detail) {
    bool ok = true;
    const auto all = read_results_csv(p.dir / "results.csv");
    std::set<std::string> prev;
    bool first = true;
    for (double budget : grids::budgets()) {
        const std::string b = format_number(budget, 1);
        const auto frontier = read_results_csv(p.dir / ("frontier_" + b + ".csv"));
        const auto best = read_best_time_csv(p.dir / ("best_time_" + b + ".csv"));
        std::map<std::string, int> per_algo;
        for (const auto& a : frontier) {
            ++per_algo[a.algorithm];
            ok = ok && static_cast<double>(a.index_bytes) <= budget * static_cast<double>(p.dataset_bytes);
            for (const auto& c : frontier) ok = ok && !(c.algorithm == a.algorithm && dominates(c, a));
        }
        ok = ok && best.size() == 3 * grids::accuracy_cutoffs().size();
        const auto kept = budget_filter(all, p.dataset_bytes, budget);
        std::set<std::string> now;
        for (const auto& r : kept) now.insert(key(r));
        if (!first) ok = ok && std::includes(now.begin(), now.end(), prev.begin(), prev.end());
        prev = now;
        first = false;
        detail << b << "x: " << kept.size() << "/" << all.size() << " rows in budget, frontier";
        for (const char* a : {"seismic", "seismic-knn", "hnsw"}) detail << ' ' << a << '=' << per_algo[a];
        int found = 0;
        for (const auto& x : best) found += x.row.has_value();
        detail << ", best-time found " << found << "/" << best.size() << "; ";
    }
    return ok;
}

Verdict protocol_shape(const ProtocolRun& small) {
    const auto t0 = Clock::now();
    const auto large = run_protocol("large", 100000, 8, g_work / "large");
    std::ostringstream detail;
    detail << "small: ";
    bool ok = check_protocol_tables(small, detail);
    detail << "large: ";
    ok = check_protocol_tables(large, detail) && ok;
    int ratios = 0;
    for (double budget : grids::budgets()) {
        const std::string b = format_number(budget, 1);
        const auto lpath = large.dir / ("best_time_" + b + ".csv");
        const auto spath = small.dir / ("best_time_" + b + ".csv");
        const auto out = g_work / ("scaling_" + b + ".csv");
        write_scaling_csv(scaling_ratios(read_best_time_csv(lpath), read_best_time_csv(spath)), out);
        // Hand division from the emitted best-time files.
        const auto L = read_best_time_csv(lpath);
        const auto S = read_best_time_csv(spath);
        const auto emitted = read_scaling_csv(out);
        ok = ok && emitted.size() == L.size();
        for (std::size_t i = 0; i < emitted.size() && i < L.size(); ++i) {
            const auto& e = emitted[i];
            const auto s = std::find_if(S.begin(), S.end(), [&](const BestTime& x) {
                return x.algorithm == L[i].algorithm && x.cutoff == L[i].cutoff;
            });
            const bool have = L[i].row && s != S.end() && s->row;
            ok = ok && e.ratio.has_value() == have;
            if (have) {
                ++ratios;
                const double hand = L[i].row->mean_latency_us / s->row->mean_latency_us;
                ok = ok && format_number(hand, 6) == format_number(*e.ratio, 6);
            }
        }
    }
    const double total = small.seconds + seconds_since(t0);
    detail << ratios << " ratios checked by hand division; small " << fmt(small.seconds, 0) << " s + large "
           << fmt(large.seconds, 0) << " s";
    return {ok && total < 7200.0, detail.str()};
}

std::vector<std::string> columns(const std::filesystem::path& csv, std::initializer_list<int> cols) {
    std::ifstream in(csv);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string x;
        while (std::getline(ss, x, ',')) f.push_back(x);
        std::string pick;
        for (int c : cols) pick += (c < static_cast<int>(f.size()) ? f[c] : std::string()) + ",";
        out.push_back(pick);
    }
    return out;
}

Verdict determinism(const ProtocolRun& first) {
    const auto second = run_protocol("small", 10000, 7, g_work / "small_rerun");
    // accuracy (4) and index_bytes (6) plus the identifying columns.
    const auto a = columns(first.dir / "results.csv", {0, 1, 2, 4, 6});
    const auto b = columns(second.dir / "results.csv", {0, 1, 2, 4, 6});
    std::size_t same = 0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) same += a[i] == b[i];
    return {a.size() == b.size() && same == a.size(),
            std::to_string(same) + "/" + std::to_string(a.size()) + " lines with identical accuracy and size columns"};
}

}  // namespace

int main(int argc, char** argv) {
    std::string only;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--work") {
            g_work = argv[i + 1];
        } else if (flag == "--only") {
            only = argv[i + 1];
        } else {
            std::cerr << "usage: lsr_acceptance [--work DIR] [--only NAME]\n";
            return 2;
        }
    }
    std::filesystem::create_directories(g_work);

    std::optional<ProtocolRun> small;
    auto small_run = [&]() -> const ProtocolRun& {
        if (!small) small = run_protocol("small", 10000, 7, g_work / "small");
        return *small;
    };

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"safe_mode_exactness", safe_mode},
        {"summary_dominance", summary_dominance},
        {"expansion_monotonicity", expansion_monotonicity},
        {"pruning_tradeoff_trend", pruning_trend},
        {"knn_storage_formula", knn_storage},
        {"hnsw_sanity", hnsw_sanity},
        {"protocol_shape", [&] { return protocol_shape(small_run()); }},
        {"determinism", [&] { return determinism(small_run()); }},
    };

    int failed = 0;
    for (const auto& [name, check] : criteria) {
        if (!only.empty() && only != name) continue;
        const auto t0 = Clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        failed += !v.pass;
        std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << " [" << fmt(seconds_since(t0), 1)
                  << " s]" << std::endl;
    }
    return failed == 0 ? 0 : 1;
}

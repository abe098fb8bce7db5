#include <fstream>
#include <random>
#include <sstream>

#include "lsr/bench.hpp"
#include "lsr/grids.hpp"
#include "lsr/oracle.hpp"
#include "test_util.hpp"

using namespace lsr;
using lsr::test::TempDir;

namespace {

ResultRow row(const std::string& algo, double acc, double lat, std::uint64_t bytes = 100, std::string qp = "") {
    ResultRow r;
    r.algorithm = algo;
    r.build_params = "b";
    r.query_params = std::move(qp);
    r.accuracy = acc;
    r.mean_latency_us = lat;
    r.index_bytes = bytes;
    r.build_seconds = 1.5;
    r.dataset_tag = "t";
    return r;
}

std::string slurp_text(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool dominates(const ResultRow& b, const ResultRow& a) {
    return (b.accuracy >= a.accuracy && b.mean_latency_us < a.mean_latency_us) ||
           (b.accuracy > a.accuracy && b.mean_latency_us <= a.mean_latency_us);
}

/// Seismic config whose every block is scored: singleton blocks, full
/// summaries, every query component, no skipping.
RunConfig safe_config() {
    auto c = RunConfig::defaults("seismic");
    c.off_grid = true;
    c.seismic.lambda = {1000000};
    c.seismic.beta_ratio = 0.1;
    c.seismic.alpha = 1.0;
    c.seismic.knn = {0};
    c.seismic.cut = {100000};
    c.seismic.heap_factor = {1.0};
    c.workers = 2;
    return c;
}

RunConfig small_config() {
    auto c = RunConfig::defaults("seismic");
    c.off_grid = true;
    c.seismic.lambda = {30000, 60000};
    c.seismic.lambda_scale = 0.0003;
    c.seismic.knn = {0, 10};
    c.seismic.knn_lambda = 60000;
    c.seismic.cut = {4, 8};
    c.seismic.heap_factor = {0.7, 1.0};
    c.workers = 2;
    return c;
}

}  // namespace

// ---- budget ------------------------------------------------------------

TEST(Budget, BoundaryIsInclusive) {
    const std::vector<ResultRow> rows{row("a", 0.9, 1, 150), row("a", 0.9, 1, 151), row("a", 0.9, 1, 200),
                                      row("a", 0.9, 1, 201)};
    EXPECT_EQ(budget_filter(rows, 100, 1.5).size(), 1u);
    EXPECT_EQ(budget_filter(rows, 100, 2.0).size(), 3u);
    EXPECT_THROW(budget_filter(rows, 100, 0.0), Error);
}

TEST(Budget, TighterBudgetIsSubset) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::uint64_t> bytes(0, 400);
    std::vector<ResultRow> rows;
    for (int i = 0; i < 200; ++i) rows.push_back(row("a", 0.5, 1, bytes(rng), std::to_string(i)));
    const auto tight = budget_filter(rows, 100, 1.5);
    const auto loose = budget_filter(rows, 100, 2.0);
    for (const auto& r : tight) EXPECT_NE(std::find(loose.begin(), loose.end(), r), loose.end());
    for (const auto& r : loose) EXPECT_LE(r.index_bytes, 200u);
}

// ---- pareto --------------------------------------------------------------

TEST(Pareto, HandExample) {
    const std::vector<ResultRow> rows{row("a", 0.90, 1.0), row("a", 0.92, 0.9), row("a", 0.95, 2.0)};
    const auto f = pareto_frontier(rows);
    EXPECT_EQ(f, (std::vector<ResultRow>{rows[1], rows[2]}));
    EXPECT_EQ(pareto_frontier({rows[0]}), (std::vector<ResultRow>{rows[0]}));
    EXPECT_TRUE(pareto_frontier({}).empty());
}

TEST(Pareto, ExactDuplicatesBothSurvive) {
    const std::vector<ResultRow> rows{row("a", 0.9, 1.0, 1, "x"), row("a", 0.9, 1.0, 1, "y")};
    EXPECT_EQ(pareto_frontier(rows).size(), 2u);
}

TEST(Pareto, MatchesQuadraticOracleAndIsAntichain) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> acc(0, 20), lat(1, 20);  // coarse values force ties
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<ResultRow> rows;
        for (int i = 0; i < 30; ++i) rows.push_back(row("a", acc(rng) / 20.0, lat(rng), 1, std::to_string(i)));
        const auto f = pareto_frontier(rows);
        std::vector<ResultRow> ref;
        for (const auto& a : rows) {
            bool dominated = false;
            for (const auto& b : rows) dominated = dominated || dominates(b, a);
            if (!dominated) ref.push_back(a);
        }
        auto key = [](const ResultRow& r) { return r.query_params; };
        std::vector<std::string> got_keys, ref_keys;
        for (const auto& r : f) got_keys.push_back(key(r));
        for (const auto& r : ref) ref_keys.push_back(key(r));
        std::sort(got_keys.begin(), got_keys.end());
        std::sort(ref_keys.begin(), ref_keys.end());
        ASSERT_EQ(got_keys, ref_keys);
        for (const auto& a : f)
            for (const auto& b : f) EXPECT_FALSE(dominates(b, a));
        for (std::size_t i = 1; i < f.size(); ++i) EXPECT_LE(f[i - 1].mean_latency_us, f[i].mean_latency_us);
    }
}

// ---- best time and scaling ----------------------------------------------

TEST(BestTime, HandExample) {
    const std::vector<ResultRow> rows{row("a", 0.89, 1.0, 1, "r0"), row("a", 0.91, 5.0, 1, "r1"),
                                      row("a", 0.93, 3.0, 1, "r2"), row("a", 0.97, 3.0, 1, "r3")};
    const auto b = best_time_at_accuracy(rows, {90, 91, 93, 95, 98});
    ASSERT_EQ(b.size(), 5u);
    EXPECT_EQ(b[0].row->query_params, "r2");
    EXPECT_EQ(b[1].row->query_params, "r2");
    EXPECT_EQ(b[2].row->query_params, "r2");  // latency tie with r3, earlier row wins
    EXPECT_EQ(b[3].row->query_params, "r3");
    EXPECT_FALSE(b[4].row.has_value());
    EXPECT_EQ(b[4].algorithm, "a");
    EXPECT_THROW(best_time_at_accuracy(rows, {0}), Error);
}

TEST(BestTime, AccuracyExactlyAtCutoffQualifies) {
    // 0.9 = 1800 / 2000 hits; floating point must not drop it.
    const std::vector<ResultRow> rows{row("a", 1800.0 / 2000.0, 2.0)};
    EXPECT_TRUE(best_time_at_accuracy(rows, {90})[0].row.has_value());
    EXPECT_FALSE(best_time_at_accuracy(rows, {91})[0].row.has_value());
}

TEST(Scaling, IdenticalSetsGiveUnitRatio) {
    const std::vector<ResultRow> rows{row("a", 0.93, 3.0), row("a", 0.97, 7.0)};
    const auto b = best_time_at_accuracy(rows, grids::accuracy_cutoffs());
    const auto r = scaling_ratios(b, b);
    ASSERT_EQ(r.size(), b.size());
    for (const auto& x : r) {
        if (x.cutoff <= 97) {
            ASSERT_TRUE(x.ratio.has_value());
            EXPECT_DOUBLE_EQ(*x.ratio, 1.0);
        } else {
            EXPECT_FALSE(x.ratio.has_value());
        }
    }
}

TEST(Scaling, RatioIsLargeOverSmall) {
    const auto large = best_time_at_accuracy({row("a", 0.95, 12.0)}, {90, 95});
    const auto small = best_time_at_accuracy({row("a", 0.92, 3.0)}, {90, 95});
    const auto r = scaling_ratios(large, small);
    EXPECT_DOUBLE_EQ(*r[0].ratio, 4.0);
    EXPECT_TRUE(r[1].large_us.has_value());
    EXPECT_FALSE(r[1].small_us.has_value());
    EXPECT_FALSE(r[1].ratio.has_value());
}

// ---- CSV -----------------------------------------------------------------

TEST(Csv, ResultsRoundTrip) {
    TempDir dir;
    std::vector<ResultRow> rows{row("seismic", 0.9125, 123.456, 5000000, "cut=4;heap_factor=0.8"),
                                row("hnsw", 1.0, 0.001, 1, "ef_search=10;qprune=0")};
    write_results_csv(rows, dir / "r.csv");
    EXPECT_EQ(read_results_csv(dir / "r.csv"), rows);
    const auto text = slurp_text(dir / "r.csv");
    EXPECT_EQ(text.substr(0, text.find('\n')), kResultsHeader);
    rows[0].build_params = "a,b";
    EXPECT_THROW(write_results_csv(rows, dir / "bad.csv"), Error);
}

TEST(Csv, RejectsWrongHeaderAndShortRows) {
    TempDir dir;
    {
        std::ofstream o(dir / "h.csv");
        o << "algo,x\n";
    }
    EXPECT_THROW(read_results_csv(dir / "h.csv"), Error);
    {
        std::ofstream o(dir / "s.csv");
        o << kResultsHeader << "\nseismic,b,q,10\n";
    }
    EXPECT_THROW(read_results_csv(dir / "s.csv"), Error);
}

TEST(Csv, BestTimeAndScalingRoundTrip) {
    TempDir dir;
    const auto b = best_time_at_accuracy({row("a", 0.93, 3.0, 7, "q")}, {90, 95});
    write_best_time_csv(b, dir / "b.csv");
    const auto back = read_best_time_csv(dir / "b.csv");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].row->query_params, "q");
    EXPECT_EQ(back[0].row->index_bytes, 7u);
    EXPECT_FALSE(back[1].row.has_value());
    EXPECT_NE(slurp_text(dir / "b.csv").find("a,95,0,,,,,"), std::string::npos);

    const auto s = scaling_ratios(b, b);
    write_scaling_csv(s, dir / "s.csv");
    const auto sb = read_scaling_csv(dir / "s.csv");
    ASSERT_EQ(sb.size(), 2u);
    EXPECT_DOUBLE_EQ(*sb[0].ratio, 1.0);
    EXPECT_FALSE(sb[1].ratio.has_value());
}

// ---- synthetic data --------------------------------------------------------

TEST(Synth, EmptyDeterministicAndValidated) {
    SynthParams p;
    p.n = 0;
    const auto [d0, q0] = synth_dataset(p);
    EXPECT_EQ(d0.size(), 0u);
    EXPECT_EQ(q0.size(), 0u);
    p.n = 300;
    p.n_queries = 20;
    EXPECT_EQ(synth_dataset(p), synth_dataset(p));
    auto other = p;
    other.seed = 8;
    EXPECT_NE(synth_dataset(other).first, synth_dataset(p).first);
    const auto [d, q] = synth_dataset(p);
    for (std::size_t i = 0; i < d.size(); ++i) {
        ASSERT_FALSE(d[i].ids.empty());
        for (float v : d[i].values) ASSERT_EQ(v, round_to_half(v));
    }
    auto bad = p;
    bad.dim = 50;
    bad.doc_nnz = 127;
    EXPECT_THROW(synth_dataset(bad), Error);
    bad = p;
    bad.topic_share = 1.5;
    EXPECT_THROW(synth_dataset(bad), Error);
}

// ---- harness ---------------------------------------------------------------

TEST(Harness, EmptyQueriesWriteHeaderOnly) {
    TempDir dir;
    const auto& docs = lsr::test::desk_data(500, 10).first;
    auto c = small_config();
    c.output = (dir / "r.csv").string();
    GroundTruth gt;
    gt.k = 10;
    const auto out = run(c, docs, Dataset(std::vector<std::uint64_t>{0}, {}, {}, docs.dim()), gt);
    EXPECT_TRUE(out.rows.empty());
    EXPECT_EQ(slurp_text(dir / "r.csv"), std::string(kResultsHeader) + "\n");
}

TEST(Harness, RejectsMismatchedGroundTruth) {
    const auto& [docs, queries] = lsr::test::desk_data(500, 10);
    const auto gt = exact_topk_batch(docs, queries, 5, 2);
    EXPECT_THROW(run(small_config(), docs, queries, gt), Error);
}

TEST(Harness, SafeModeRowIsExact) {
    const auto& [docs, queries] = lsr::test::desk_data();
    const auto gt = exact_topk_batch(docs, queries, 10, 2);
    const auto out = run(safe_config(), docs, queries, gt);
    ASSERT_EQ(out.rows.size(), 1u);
    EXPECT_DOUBLE_EQ(out.rows[0].accuracy, 1.0);
    EXPECT_EQ(out.rows[0].algorithm, "seismic");
}

TEST(Harness, GridShapeParamsAndFilesOnDisk) {
    TempDir dir;
    const auto& [docs, queries] = lsr::test::desk_data();
    const auto gt = exact_topk_batch(docs, queries, 10, 2);
    auto c = small_config();
    c.output = (dir / "r.csv").string();
    const auto out = run(c, docs, queries, gt);
    // 2 lambdas x 2 kNN settings x 2 cuts x 2 heap factors.
    ASSERT_EQ(out.rows.size(), 16u);
    EXPECT_EQ(read_results_csv(dir / "r.csv").size(), 16u);
    EXPECT_EQ(out.rows[0].build_params, "lambda=30000;lambda_scale=0.0003;beta=1;alpha=0.4;knn=0");
    EXPECT_EQ(out.rows[0].query_params, "cut=4;heap_factor=0.7");
    EXPECT_EQ(out.rows[4].algorithm, "seismic-knn");
    EXPECT_GT(out.rows[4].index_bytes, out.rows[0].index_bytes);
    for (const auto& r : out.rows) {
        EXPECT_GE(r.accuracy, 0.0);
        EXPECT_LE(r.accuracy, 1.0);
        EXPECT_GT(r.mean_latency_us, 0.0);
        EXPECT_EQ(r.k, 10u);
    }
    // Latency dump: header plus one line per query per row.
    std::ifstream lat(c.output + ".latency.csv");
    std::string line;
    std::size_t lines = 0;
    while (std::getline(lat, line)) ++lines;
    EXPECT_EQ(lines, 1 + 16 * queries.size());
    EXPECT_TRUE(std::filesystem::exists(c.output + ".budget.log"));
}

TEST(Harness, OverBudgetRowsAreLoggedAndFiltered) {
    const auto& [docs, queries] = lsr::test::desk_data();
    const auto gt = exact_topk_batch(docs, queries, 10, 2);
    auto c = small_config();
    c.seismic.lambda = {90000};
    c.seismic.lambda_scale = 0.002;
    c.seismic.knn = {20};
    c.budget = 1.5;
    const auto out = run(c, docs, queries, gt);
    ASSERT_FALSE(out.rows.empty());
    const auto bytes = docs.storage_bytes();
    ASSERT_GT(static_cast<double>(out.rows[0].index_bytes), 1.5 * bytes);
    EXPECT_TRUE(budget_filter(out.rows, bytes, 1.5).empty());
    EXPECT_EQ(out.budget_violations.size(), 1u);  // one line per index, not per row
}

TEST(Harness, RerunKeepsAccuracyAndSize) {
    const auto& [docs, queries] = lsr::test::desk_data();
    const auto gt = exact_topk_batch(docs, queries, 10, 2);
    auto c = small_config();
    const auto a = run(c, docs, queries, gt);
    const auto b = run(c, docs, queries, gt);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].accuracy, b.rows[i].accuracy);
        EXPECT_EQ(a.rows[i].index_bytes, b.rows[i].index_bytes);
        EXPECT_EQ(a.rows[i].build_params, b.rows[i].build_params);
    }
}

TEST(Harness, HnswRows) {
    const auto& [docs, queries] = lsr::test::desk_data(500, 20);
    const auto gt = exact_topk_batch(docs, queries, 10, 2);
    auto c = RunConfig::defaults("hnsw");
    c.hnsw.m = {16};
    c.hnsw.ef_search = {10, 500};
    c.hnsw.ef_construction = 500;
    const auto out = run(c, docs, queries, gt);
    ASSERT_EQ(out.rows.size(), 2u);
    EXPECT_EQ(out.rows[0].build_params, "M=16;ef_construction=500");
    EXPECT_EQ(out.rows[1].query_params, "ef_search=500;qprune=0");
    EXPECT_GE(out.rows[1].accuracy, out.rows[0].accuracy);
}

#include "lsr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "lsr/half.hpp"
#include "lsr/hnsw.hpp"
#include "lsr/oracle.hpp"
#include "lsr/seismic.hpp"

namespace lsr {

const char* const kResultsHeader =
    "algorithm,build_params,query_params,k,accuracy,mean_latency_us,index_bytes,build_seconds,dataset_tag";
const char* const kBestTimeHeader =
    "algorithm,cutoff,found,build_params,query_params,accuracy,mean_latency_us,index_bytes";
const char* const kScalingHeader = "algorithm,cutoff,large_latency_us,small_latency_us,ratio";

// ---------------------------------------------------------------------------
// Synthetic data

namespace {

class VectorSampler {
public:
    explicit VectorSampler(const SynthParams& p) : p_(p), rng_(p.seed) {
        std::vector<double> weights(p.dim);
        for (std::uint64_t r = 0; r < p.dim; ++r) weights[r] = std::pow(static_cast<double>(r + 1), -p.zipf_exponent);
        rank_ = std::discrete_distribution<std::uint64_t>(weights.begin(), weights.end());
        global_.resize(p.dim);
        std::iota(global_.begin(), global_.end(), 0);
        std::shuffle(global_.begin(), global_.end(), rng_);
        // Each topic reorders the ranking by an affine map coprime with dim.
        std::uniform_int_distribution<std::uint64_t> any(0, p.dim - 1);
        for (std::uint32_t t = 0; t < p.topics; ++t) {
            std::uint64_t a = 1;
            do {
                a = any(rng_) | 1;
            } while (p.dim > 1 && std::gcd(a, p.dim) != 1);
            topic_maps_.push_back({a, any(rng_)});
        }
        value_ = std::lognormal_distribution<double>(p.value_mu, p.value_sigma);
    }

    SparseVector draw(double mean_nnz) {
        std::poisson_distribution<std::uint64_t> count(mean_nnz);
        const std::uint64_t nnz = std::clamp<std::uint64_t>(count(rng_), 1, p_.dim);
        const std::uint32_t topic =
            p_.topics == 0 ? 0 : std::uniform_int_distribution<std::uint32_t>(0, p_.topics - 1)(rng_);
        std::bernoulli_distribution from_topic(p_.topics == 0 ? 0.0 : p_.topic_share);
        std::unordered_set<ComponentId> chosen;
        std::vector<std::pair<ComponentId, float>> entries;
        entries.reserve(nnz);
        while (entries.size() < nnz) {
            std::uint64_t r = rank_(rng_);
            if (from_topic(rng_)) {
                const auto [a, b] = topic_maps_[topic];
                r = (a * r + b) % p_.dim;
            }
            const auto c = static_cast<ComponentId>(global_[r]);
            if (!chosen.insert(c).second) continue;
            float v = round_to_half(static_cast<float>(value_(rng_)));
            if (v <= 0.0f) v = round_to_half(1e-3f);
            entries.emplace_back(c, v);
        }
        return SparseVector::from_pairs(std::move(entries));
    }

private:
    SynthParams p_;
    std::mt19937_64 rng_;
    std::discrete_distribution<std::uint64_t> rank_;
    std::vector<std::uint64_t> global_;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> topic_maps_;
    std::lognormal_distribution<double> value_;
};

}  // namespace

std::pair<Dataset, Dataset> synth_dataset(const SynthParams& p) {
    require(p.dim >= 1 && p.dim <= (std::uint64_t{1} << 32), "synth: dim must be in [1, 2^32]");
    require(p.doc_nnz > 0.0 && p.query_nnz > 0.0, "synth: nnz means must be positive");
    require(static_cast<double>(p.dim) >= p.doc_nnz, "synth: dim must be at least the document nnz mean");
    require(static_cast<double>(p.dim) >= p.query_nnz, "synth: dim must be at least the query nnz mean");
    require(p.topic_share >= 0.0 && p.topic_share <= 1.0, "synth: topic_share must be in [0, 1]");
    require(p.value_sigma >= 0.0, "synth: value_sigma must be non-negative");
    if (p.n == 0) return {Dataset(std::vector<std::uint64_t>{0}, {}, {}, p.dim), Dataset(std::vector<std::uint64_t>{0}, {}, {}, p.dim)};

    VectorSampler sampler(p);
    auto make = [&](std::uint64_t count, double mean) {
        std::vector<std::uint64_t> offsets{0};
        std::vector<ComponentId> ids;
        std::vector<float> values;
        for (std::uint64_t i = 0; i < count; ++i) {
            const auto v = sampler.draw(mean);
            ids.insert(ids.end(), v.ids().begin(), v.ids().end());
            values.insert(values.end(), v.values().begin(), v.values().end());
            offsets.push_back(ids.size());
        }
        return Dataset(std::move(offsets), std::move(ids), std::move(values), p.dim);
    };
    Dataset docs = make(p.n, p.doc_nnz);
    Dataset queries = make(p.n_queries, p.query_nnz);
    return {std::move(docs), std::move(queries)};
}

// ---------------------------------------------------------------------------
// CSV

std::string format_number(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

void check_field(const std::string& s) {
    require(s.find_first_of(",\n\r") == std::string::npos, "csv: field contains a separator: '" + s + "'");
}

std::vector<std::vector<std::string>> read_table(const std::filesystem::path& path, const char* header,
                                                 std::size_t columns) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != header)
        fail(ErrorCode::Format, "csv " + path.string() + ": unexpected header (want '" + header + "')");
    std::vector<std::vector<std::string>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split(line);
        if (f.size() != columns)
            fail(ErrorCode::Format, "csv " + path.string() + ": line " + std::to_string(lineno) + " has " +
                                        std::to_string(f.size()) + " fields, expected " + std::to_string(columns));
        rows.push_back(std::move(f));
    }
    return rows;
}

double to_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::Format, "csv: not a number: '" + s + "'");
    }
}

std::optional<double> to_opt_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return to_double(s);
}

std::string opt_field(const std::optional<double>& v, int precision) {
    return v ? format_number(*v, precision) : std::string();
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    return out;
}

}  // namespace

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << kResultsHeader << '\n';
    for (const auto& r : rows) {
        for (const auto* s : {&r.algorithm, &r.build_params, &r.query_params, &r.dataset_tag}) check_field(*s);
        out << r.algorithm << ',' << r.build_params << ',' << r.query_params << ',' << r.k << ','
            << format_number(r.accuracy, 6) << ',' << format_number(r.mean_latency_us, 3) << ',' << r.index_bytes
            << ',' << format_number(r.build_seconds, 3) << ',' << r.dataset_tag << '\n';
    }
    if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
    std::vector<ResultRow> rows;
    for (const auto& f : read_table(path, kResultsHeader, 9)) {
        ResultRow r;
        r.algorithm = f[0];
        r.build_params = f[1];
        r.query_params = f[2];
        r.k = static_cast<std::uint32_t>(to_double(f[3]));
        r.accuracy = to_double(f[4]);
        r.mean_latency_us = to_double(f[5]);
        r.index_bytes = static_cast<std::uint64_t>(std::stoull(f[6]));
        r.build_seconds = to_double(f[7]);
        r.dataset_tag = f[8];
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Protocol computations

std::vector<ResultRow> budget_filter(const std::vector<ResultRow>& rows, std::uint64_t dataset_bytes,
                                     double multiplier) {
    require(multiplier > 0.0, "budget_filter: multiplier must be positive");
    const long double limit = static_cast<long double>(multiplier) * static_cast<long double>(dataset_bytes);
    std::vector<ResultRow> out;
    std::copy_if(rows.begin(), rows.end(), std::back_inserter(out),
                 [&](const ResultRow& r) { return static_cast<long double>(r.index_bytes) <= limit; });
    return out;
}

std::vector<ResultRow> pareto_frontier(const std::vector<ResultRow>& rows) {
    // Sort by latency ascending, accuracy descending; a row survives iff it is
    // strictly more accurate than every faster row, or ties the best accuracy
    // at the same latency.
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rows[a].mean_latency_us != rows[b].mean_latency_us) return rows[a].mean_latency_us < rows[b].mean_latency_us;
        return rows[a].accuracy > rows[b].accuracy;
    });
    std::vector<ResultRow> out;
    double best_acc = -1.0;          // best accuracy among strictly faster rows
    double group_latency = NAN;
    double group_best = -1.0;        // best accuracy within the current latency group
    for (std::size_t i : order) {
        const auto& r = rows[i];
        if (r.mean_latency_us != group_latency) {
            best_acc = std::max(best_acc, group_best);
            group_latency = r.mean_latency_us;
            group_best = r.accuracy;
        }
        if (r.accuracy > best_acc && r.accuracy == group_best) out.push_back(r);
    }
    return out;
}

std::vector<BestTime> best_time_at_accuracy(const std::vector<ResultRow>& rows, const std::vector<int>& cutoffs) {
    std::vector<BestTime> out;
    for (int c : cutoffs) {
        require(c > 0 && c <= 100, "best_time_at_accuracy: cutoffs must be in (0, 100]");
        BestTime b;
        b.cutoff = c;
        b.algorithm = rows.empty() ? std::string() : rows.front().algorithm;
        for (const auto& r : rows) {
            // accuracy is an exact multiple of 1/(queries*k); compare in percent
            // with a margin far below that resolution.
            if (r.accuracy * 100.0 + 1e-9 < c) continue;
            if (!b.row || r.mean_latency_us < b.row->mean_latency_us) b.row = r;
        }
        if (b.row) b.algorithm = b.row->algorithm;
        out.push_back(std::move(b));
    }
    return out;
}

void write_best_time_csv(const std::vector<BestTime>& best, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << kBestTimeHeader << '\n';
    for (const auto& b : best) {
        check_field(b.algorithm);
        out << b.algorithm << ',' << b.cutoff << ',';
        if (b.row) {
            out << "1," << b.row->build_params << ',' << b.row->query_params << ','
                << format_number(b.row->accuracy, 6) << ',' << format_number(b.row->mean_latency_us, 3) << ','
                << b.row->index_bytes << '\n';
        } else {
            out << "0,,,,,\n";
        }
    }
    if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

std::vector<BestTime> read_best_time_csv(const std::filesystem::path& path) {
    std::vector<BestTime> out;
    for (const auto& f : read_table(path, kBestTimeHeader, 8)) {
        BestTime b;
        b.algorithm = f[0];
        b.cutoff = static_cast<int>(to_double(f[1]));
        if (f[2] == "1") {
            ResultRow r;
            r.algorithm = f[0];
            r.build_params = f[3];
            r.query_params = f[4];
            r.accuracy = to_double(f[5]);
            r.mean_latency_us = to_double(f[6]);
            r.index_bytes = static_cast<std::uint64_t>(std::stoull(f[7]));
            b.row = std::move(r);
        } else if (f[2] != "0") {
            fail(ErrorCode::Format, "best-time csv: 'found' must be 0 or 1");
        }
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<ScalingRatio> scaling_ratios(const std::vector<BestTime>& large, const std::vector<BestTime>& small) {
    std::vector<ScalingRatio> out;
    for (const auto& l : large) {
        ScalingRatio s;
        s.algorithm = l.algorithm;
        s.cutoff = l.cutoff;
        if (l.row) s.large_us = l.row->mean_latency_us;
        auto match = std::find_if(small.begin(), small.end(), [&](const BestTime& b) {
            return b.cutoff == l.cutoff && b.algorithm == l.algorithm;
        });
        if (match != small.end() && match->row) s.small_us = match->row->mean_latency_us;
        if (s.large_us && s.small_us && *s.small_us > 0.0) s.ratio = *s.large_us / *s.small_us;
        out.push_back(std::move(s));
    }
    return out;
}

void write_scaling_csv(const std::vector<ScalingRatio>& ratios, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << kScalingHeader << '\n';
    for (const auto& s : ratios) {
        check_field(s.algorithm);
        out << s.algorithm << ',' << s.cutoff << ',' << opt_field(s.large_us, 3) << ',' << opt_field(s.small_us, 3)
            << ',' << opt_field(s.ratio, 6) << '\n';
    }
    if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

std::vector<ScalingRatio> read_scaling_csv(const std::filesystem::path& path) {
    std::vector<ScalingRatio> out;
    for (const auto& f : read_table(path, kScalingHeader, 5)) {
        ScalingRatio s;
        s.algorithm = f[0];
        s.cutoff = static_cast<int>(to_double(f[1]));
        s.large_us = to_opt_double(f[2]);
        s.small_us = to_opt_double(f[3]);
        s.ratio = to_opt_double(f[4]);
        out.push_back(std::move(s));
    }
    return out;
}

BudgetTables budget_tables(const std::vector<ResultRow>& rows, std::uint64_t dataset_bytes, double budget,
                           const std::vector<int>& cutoffs) {
    BudgetTables out;
    for (const auto& [algo, group] : group_by_algorithm(rows)) {
        const auto kept = budget_filter(group, dataset_bytes, budget);
        const auto f = pareto_frontier(kept);
        out.frontier.insert(out.frontier.end(), f.begin(), f.end());
        auto b = best_time_at_accuracy(kept, cutoffs);
        for (auto& x : b) x.algorithm = algo;
        out.best.insert(out.best.end(), b.begin(), b.end());
    }
    return out;
}

std::vector<std::pair<std::string, std::vector<ResultRow>>> group_by_algorithm(const std::vector<ResultRow>& rows) {
    std::vector<std::pair<std::string, std::vector<ResultRow>>> out;
    for (const auto& r : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& g) { return g.first == r.algorithm; });
        if (it == out.end()) {
            out.push_back({r.algorithm, {}});
            it = std::prev(out.end());
        }
        it->second.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweep driver

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_param(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

struct Measurement {
    double accuracy = 0.0;
    double mean_latency_us = 0.0;
    std::vector<double> latencies_us;
};

/// One untimed warm-up pass, then one timed pass on this thread.
template <typename Search>
Measurement measure(const Dataset& queries, const GroundTruth& gt, std::size_t k, Search&& search) {
    for (std::size_t q = 0; q < queries.size(); ++q) (void)search(queries[q]);
    Measurement m;
    m.latencies_us.resize(queries.size());
    double acc_sum = 0.0;
    double lat_sum = 0.0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const auto t0 = Clock::now();
        const auto res = search(queries[q]);
        const double us = std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
        m.latencies_us[q] = us;
        lat_sum += us;
        const auto ids = ids_of(res);
        acc_sum += accuracy_at_k(ids, gt.ids_of(q), k);
    }
    m.accuracy = acc_sum / static_cast<double>(queries.size());
    // Latency must be positive; clamp below the clock resolution.
    m.mean_latency_us = std::max(lat_sum / static_cast<double>(queries.size()), 1e-3);
    return m;
}

class RunWriter {
public:
    RunWriter(const RunConfig& c, std::uint64_t dataset_bytes) : config_(c), dataset_bytes_(dataset_bytes) {
        if (!c.output.empty()) {
            latency_ = open_out(c.output + ".latency.csv");
            latency_ << "algorithm,build_params,query_params,query,latency_us\n";
        }
    }

    void add(ResultRow row, const Measurement& m) {
        if (latency_.is_open()) {
            for (std::size_t q = 0; q < m.latencies_us.size(); ++q)
                latency_ << row.algorithm << ',' << row.build_params << ',' << row.query_params << ',' << q << ','
                         << format_number(m.latencies_us[q], 3) << '\n';
        }
        const long double limit = static_cast<long double>(config_.budget) * dataset_bytes_;
        if (static_cast<long double>(row.index_bytes) > limit) {
            std::ostringstream os;
            os << row.algorithm << ' ' << row.build_params << ": index " << row.index_bytes << " bytes exceeds "
               << config_.budget << "x dataset (" << dataset_bytes_ << " bytes)";
            // One line per index: rows of the same build repeat the message.
            if (out_.budget_violations.empty() || out_.budget_violations.back() != os.str())
                out_.budget_violations.push_back(os.str());
        }
        out_.rows.push_back(std::move(row));
    }

    RunOutputs finish() {
        if (!config_.output.empty()) {
            write_results_csv(out_.rows, config_.output);
            auto log = open_out(config_.output + ".budget.log");
            for (const auto& v : out_.budget_violations) log << v << '\n';
        }
        return std::move(out_);
    }

private:
    const RunConfig& config_;
    std::uint64_t dataset_bytes_;
    std::ofstream latency_;
    RunOutputs out_;
};

std::uint32_t scaled(std::uint32_t v, double scale) {
    return static_cast<std::uint32_t>(std::max<long long>(1, std::llround(static_cast<double>(v) * scale)));
}

void run_seismic(const RunConfig& c, const Dataset& dataset, const Dataset& queries, const GroundTruth& gt,
                 RunWriter& writer) {
    const auto& s = c.seismic;
    auto make_params = [&](std::uint32_t lambda) {
        SeismicParams p;
        p.lambda = scaled(lambda, s.lambda_scale);
        p.beta = scaled(p.lambda, s.beta_ratio);
        p.alpha = s.alpha;
        p.seed = c.seed;
        return p;
    };

    // kNN graphs are independent of the main index's lambda: build each once.
    std::map<std::uint32_t, std::pair<KnnGraph, double>> graphs;
    if (std::any_of(s.knn.begin(), s.knn.end(), [](auto kk) { return kk != 0; })) {
        const auto t0 = Clock::now();
        const KnnMode mode = s.knn_mode == "exact" ? KnnMode::Exact : KnnMode::Approx;
        std::optional<SeismicIndex> knn_index;
        if (mode == KnnMode::Approx) knn_index = SeismicIndex::build(dataset, make_params(s.knn_lambda), c.workers);
        const double index_seconds = seconds_since(t0);
        for (auto kappa : s.knn) {
            if (kappa == 0 || graphs.count(kappa)) continue;
            const auto t1 = Clock::now();
            KnnGraph g = mode == KnnMode::Approx
                             ? build_knn_graph(*knn_index, kappa, s.knn_cut, s.knn_heap_factor, c.workers)
                             : build_knn_graph(dataset, kappa, KnnMode::Exact, {}, c.workers);
            graphs.emplace(kappa, std::make_pair(std::move(g), index_seconds + seconds_since(t1)));
        }
    }

    for (auto lambda : s.lambda) {
        const SeismicParams params = make_params(lambda);
        const auto t0 = Clock::now();
        SeismicIndex index = SeismicIndex::build(dataset, params, c.workers);
        const double build_seconds = seconds_since(t0);
        for (auto kappa : s.knn) {
            double extra_seconds = 0.0;
            if (kappa == 0) {
                index.detach_knn();
            } else {
                index.attach_knn(graphs.at(kappa).first);
                extra_seconds = graphs.at(kappa).second;
            }
            std::ostringstream bp;
            bp << "lambda=" << lambda << ";lambda_scale=" << fmt_param(s.lambda_scale) << ";beta=" << params.beta
               << ";alpha=" << fmt_param(s.alpha) << ";knn=" << kappa;
            const auto bytes = index.size_bytes().total();
            for (auto cut : s.cut) {
                for (auto hf : s.heap_factor) {
                    const SeismicQuery q{.k = c.k, .cut = cut, .heap_factor = hf, .use_knn = kappa != 0};
                    const auto m = measure(queries, gt, c.k, [&](SparseView v) { return index.search(v, q); });
                    ResultRow row;
                    row.algorithm = kappa == 0 ? "seismic" : "seismic-knn";
                    row.build_params = bp.str();
                    row.query_params = "cut=" + std::to_string(cut) + ";heap_factor=" + fmt_param(hf);
                    row.k = c.k;
                    row.accuracy = m.accuracy;
                    row.mean_latency_us = m.mean_latency_us;
                    row.index_bytes = bytes;
                    row.build_seconds = build_seconds + extra_seconds;
                    row.dataset_tag = c.dataset_tag;
                    writer.add(std::move(row), m);
                }
            }
        }
    }
}

void run_hnsw(const RunConfig& c, const Dataset& dataset, const Dataset& queries, const GroundTruth& gt,
              RunWriter& writer) {
    for (auto m_param : c.hnsw.m) {
        const HnswParams params{.m = m_param, .ef_construction = c.hnsw.ef_construction, .seed = c.seed};
        const auto t0 = Clock::now();
        const HnswIndex index = HnswIndex::build(dataset, params);
        const double build_seconds = seconds_since(t0);
        const auto bytes = index.size_bytes().total();
        const std::string bp = "M=" + std::to_string(m_param) + ";ef_construction=" +
                               std::to_string(c.hnsw.ef_construction);
        for (auto ef : c.hnsw.ef_search) {
            const auto m = measure(queries, gt, c.k,
                                   [&](SparseView v) { return index.search(v, c.k, ef, c.hnsw.qprune); });
            ResultRow row;
            row.algorithm = "hnsw";
            row.build_params = bp;
            row.query_params = "ef_search=" + std::to_string(ef) + ";qprune=" + fmt_param(c.hnsw.qprune);
            row.k = c.k;
            row.accuracy = m.accuracy;
            row.mean_latency_us = m.mean_latency_us;
            row.index_bytes = bytes;
            row.build_seconds = build_seconds;
            row.dataset_tag = c.dataset_tag;
            writer.add(std::move(row), m);
        }
    }
}

}  // namespace

RunOutputs run(const RunConfig& config, const Dataset& dataset, const Dataset& queries, const GroundTruth& gt) {
    config.validate();
    RunWriter writer(config, dataset.storage_bytes());
    if (queries.empty()) return writer.finish();
    require(gt.n_queries == queries.size(), "run: ground truth covers " + std::to_string(gt.n_queries) +
                                                " queries, query file has " + std::to_string(queries.size()));
    require(gt.k == config.k, "run: ground truth k=" + std::to_string(gt.k) + " does not match k=" +
                                  std::to_string(config.k));
    if (config.algorithm == "seismic") {
        run_seismic(config, dataset, queries, gt, writer);
    } else {
        run_hnsw(config, dataset, queries, gt, writer);
    }
    return writer.finish();
}

RunOutputs run(const RunConfig& config) {
    require(!config.dataset.empty() && !config.queries.empty(), "run: dataset and queries paths are required");
    const Dataset dataset = read_csr(config.dataset);
    const Dataset queries = read_csr(config.queries);
    GroundTruth gt;
    if (queries.empty()) {
        gt.k = config.k;
    } else {
        require(!config.ground_truth.empty(), "run: ground_truth path is required (run the oracle first)");
        gt = read_ground_truth(config.ground_truth, config.k);
    }
    return run(config, dataset, queries, gt);
}

}  // namespace lsr

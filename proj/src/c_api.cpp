#include "lsr/lsr.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "lsr/bench.hpp"
#include "lsr/grids.hpp"
#include "lsr/hnsw.hpp"
#include "lsr/io.hpp"
#include "lsr/oracle.hpp"
#include "lsr/seismic.hpp"

struct lsr_dataset {
    lsr::Dataset d;
};
struct lsr_seismic {
    lsr::SeismicIndex index;
};
struct lsr_hnsw {
    lsr::HnswIndex index;
};

namespace {

thread_local std::string g_last_error;

lsr_status set_error(lsr_status s, const char* what) {
    g_last_error = what;
    return s;
}

template <typename F>
lsr_status guarded(F&& f) noexcept {
    try {
        f();
        g_last_error.clear();
        return LSR_OK;
    } catch (const lsr::Error& e) {
        return set_error(static_cast<lsr_status>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(LSR_INTERNAL, "out of memory");
    } catch (const std::filesystem::filesystem_error& e) {
        return set_error(LSR_IO, e.what());
    } catch (const std::exception& e) {
        return set_error(LSR_INTERNAL, e.what());
    } catch (...) {
        return set_error(LSR_INTERNAL, "unknown error");
    }
}

void need(const void* p, const char* name) {
    lsr::require(p != nullptr, std::string(name) + " must not be NULL");
}

lsr::SparseView query_view(const uint32_t* ids, const float* values, size_t nnz) {
    if (nnz > 0) {
        need(ids, "ids");
        need(values, "values");
    }
    lsr::SparseView v{{ids, nnz}, {values, nnz}};
    lsr::validate(v);
    return v;
}

void copy_results(const std::vector<lsr::ScoredDoc>& res, lsr_result* out, size_t* n_out) {
    need(n_out, "n_out");
    if (!res.empty()) need(out, "out");
    for (size_t i = 0; i < res.size(); ++i) out[i] = {res[i].doc, res[i].score};
    *n_out = res.size();
}

}  // namespace

extern "C" {

const char* lsr_last_error(void) { return g_last_error.c_str(); }
const char* lsr_version(void) { return "1.0.0"; }

void lsr_synth_params_default(lsr_synth_params* p) {
    if (!p) return;
    const lsr::SynthParams d;
    *p = {d.n,       d.dim,           d.doc_nnz, d.query_nnz,   d.n_queries, d.seed,
          d.zipf_exponent, d.topics, d.topic_share, d.value_mu, d.value_sigma};
}

lsr_status lsr_synth(const lsr_synth_params* p, lsr_dataset** docs, lsr_dataset** queries) {
    return guarded([&] {
        need(p, "params");
        need(docs, "docs");
        need(queries, "queries");
        lsr::SynthParams s;
        s.n = p->n;
        s.dim = p->dim;
        s.doc_nnz = p->doc_nnz;
        s.query_nnz = p->query_nnz;
        s.n_queries = p->n_queries;
        s.seed = p->seed;
        s.zipf_exponent = p->zipf_exponent;
        s.topics = p->topics;
        s.topic_share = p->topic_share;
        s.value_mu = p->value_mu;
        s.value_sigma = p->value_sigma;
        auto [d, q] = lsr::synth_dataset(s);
        auto dh = std::make_unique<lsr_dataset>(lsr_dataset{std::move(d)});
        auto qh = std::make_unique<lsr_dataset>(lsr_dataset{std::move(q)});
        *docs = dh.release();
        *queries = qh.release();
    });
}

lsr_status lsr_dataset_create(const uint64_t* offsets, uint64_t n_rows, const uint32_t* ids, const float* values,
                              uint64_t dim, lsr_dataset** out) {
    return guarded([&] {
        need(offsets, "offsets");
        need(out, "out");
        const uint64_t nnz = offsets[n_rows];
        if (nnz > 0) {
            need(ids, "ids");
            need(values, "values");
        }
        lsr::Dataset d(std::vector<uint64_t>(offsets, offsets + n_rows + 1),
                       std::vector<lsr::ComponentId>(ids, ids + nnz), std::vector<float>(values, values + nnz), dim);
        *out = new lsr_dataset{std::move(d)};
    });
}

lsr_status lsr_dataset_read(const char* path, lsr_dataset** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new lsr_dataset{lsr::read_csr(path)};
    });
}

lsr_status lsr_dataset_write(const lsr_dataset* d, const char* path) {
    return guarded([&] {
        need(d, "dataset");
        need(path, "path");
        lsr::write_csr(d->d, path);
    });
}

void lsr_dataset_free(lsr_dataset* d) { delete d; }
uint64_t lsr_dataset_rows(const lsr_dataset* d) { return d ? d->d.size() : 0; }
uint64_t lsr_dataset_dim(const lsr_dataset* d) { return d ? d->d.dim() : 0; }
uint64_t lsr_dataset_nnz(const lsr_dataset* d) { return d ? d->d.nnz() : 0; }
uint64_t lsr_dataset_storage_bytes(const lsr_dataset* d) { return d ? d->d.storage_bytes() : 0; }

lsr_status lsr_ground_truth(const lsr_dataset* docs, const lsr_dataset* queries, uint32_t k, unsigned workers,
                            const char* path) {
    return guarded([&] {
        need(docs, "docs");
        need(queries, "queries");
        need(path, "path");
        const auto gt = lsr::exact_topk_batch(docs->d, queries->d, k, workers);
        lsr::write_ground_truth(gt, path);
    });
}

void lsr_seismic_params_default(lsr_seismic_params* p) {
    if (!p) return;
    const lsr::SeismicParams d;
    *p = {d.lambda, d.beta, d.alpha, d.seed, d.energy == lsr::SummaryEnergy::L2 ? 1 : 0};
}

lsr_status lsr_seismic_build(const lsr_dataset* d, const lsr_seismic_params* p, unsigned workers,
                             lsr_seismic** out) {
    return guarded([&] {
        need(d, "dataset");
        need(p, "params");
        need(out, "out");
        lsr::SeismicParams sp;
        sp.lambda = p->lambda;
        sp.beta = p->beta;
        sp.alpha = p->alpha;
        sp.seed = p->seed;
        sp.energy = p->l2_energy ? lsr::SummaryEnergy::L2 : lsr::SummaryEnergy::L1;
        *out = new lsr_seismic{lsr::SeismicIndex::build(d->d, sp, workers)};
    });
}

lsr_status lsr_seismic_build_knn(lsr_seismic* index, uint32_t kappa, int exact, uint32_t cut, double heap_factor,
                                 unsigned workers) {
    return guarded([&] {
        need(index, "index");
        auto g = exact ? lsr::build_knn_graph(index->index.forward(), kappa, lsr::KnnMode::Exact, {}, workers)
                       : lsr::build_knn_graph(index->index, kappa, cut, heap_factor, workers);
        index->index.attach_knn(std::move(g));
    });
}

lsr_status lsr_seismic_search(const lsr_seismic* index, const uint32_t* ids, const float* values, size_t nnz,
                              uint32_t k, uint32_t cut, double heap_factor, int use_knn, lsr_result* out,
                              size_t* n_out) {
    return guarded([&] {
        need(index, "index");
        const lsr::SeismicQuery q{.k = k, .cut = cut, .heap_factor = heap_factor, .use_knn = use_knn != 0};
        copy_results(index->index.search(query_view(ids, values, nnz), q), out, n_out);
    });
}

lsr_status lsr_seismic_save(const lsr_seismic* index, const char* path) {
    return guarded([&] {
        need(index, "index");
        need(path, "path");
        index->index.save(path);
    });
}

lsr_status lsr_seismic_load(const char* path, lsr_seismic** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new lsr_seismic{lsr::SeismicIndex::load(path)};
    });
}

uint64_t lsr_seismic_size_bytes(const lsr_seismic* index) { return index ? index->index.size_bytes().total() : 0; }
uint64_t lsr_seismic_knn_bytes(const lsr_seismic* index) { return index ? index->index.size_bytes().knn : 0; }
void lsr_seismic_free(lsr_seismic* index) { delete index; }

lsr_status lsr_hnsw_build(const lsr_dataset* d, uint32_t m, uint32_t ef_construction, uint64_t seed,
                          lsr_hnsw** out) {
    return guarded([&] {
        need(d, "dataset");
        need(out, "out");
        *out = new lsr_hnsw{lsr::HnswIndex::build(d->d, {.m = m, .ef_construction = ef_construction, .seed = seed})};
    });
}

lsr_status lsr_hnsw_search(const lsr_hnsw* index, const uint32_t* ids, const float* values, size_t nnz, uint32_t k,
                           uint32_t ef_search, double qprune, lsr_result* out, size_t* n_out) {
    return guarded([&] {
        need(index, "index");
        copy_results(index->index.search(query_view(ids, values, nnz), k, ef_search, qprune), out, n_out);
    });
}

lsr_status lsr_hnsw_save(const lsr_hnsw* index, const char* path) {
    return guarded([&] {
        need(index, "index");
        need(path, "path");
        index->index.save(path);
    });
}

lsr_status lsr_hnsw_load(const char* path, lsr_hnsw** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new lsr_hnsw{lsr::HnswIndex::load(path)};
    });
}

uint64_t lsr_hnsw_size_bytes(const lsr_hnsw* index) { return index ? index->index.size_bytes().total() : 0; }
void lsr_hnsw_free(lsr_hnsw* index) { delete index; }

void lsr_run_overrides_default(lsr_run_overrides* o) {
    if (!o) return;
    std::memset(o, 0, sizeof *o);
    o->workers = -1;
}

lsr_status lsr_run(const char* config_path, const lsr_run_overrides* o, size_t* n_rows,
                   size_t* n_budget_violations) {
    return guarded([&] {
        lsr::RunConfig c;
        if (config_path) {
            c = lsr::RunConfig::load(config_path);
        } else {
            lsr::require(o && o->algorithm, "either a config file or an algorithm is required");
            c = lsr::RunConfig::defaults(o->algorithm);
        }
        if (o) {
            if (o->algorithm && c.algorithm != o->algorithm) {
                lsr::require(!config_path, std::string("--algo ") + o->algorithm +
                                               " conflicts with the config's algorithm " + c.algorithm);
            }
            if (o->dataset) c.dataset = o->dataset;
            if (o->queries) c.queries = o->queries;
            if (o->ground_truth) c.ground_truth = o->ground_truth;
            if (o->output) c.output = o->output;
            if (o->budget != 0.0) c.budget = o->budget;
            if (o->k != 0) c.k = o->k;
            if (o->has_seed) c.seed = o->seed;
            if (o->workers >= 0) c.workers = static_cast<unsigned>(o->workers);
        }
        const auto out = lsr::run(c);
        if (n_rows) *n_rows = out.rows.size();
        if (n_budget_violations) *n_budget_violations = out.budget_violations.size();
    });
}

lsr_status lsr_pareto(const char* results_path, uint64_t dataset_bytes, double budget, const char* frontier_path,
                      const char* best_time_path) {
    return guarded([&] {
        need(results_path, "results_path");
        const auto t = lsr::budget_tables(lsr::read_results_csv(results_path), dataset_bytes, budget,
                                          lsr::grids::accuracy_cutoffs());
        if (frontier_path) lsr::write_results_csv(t.frontier, frontier_path);
        if (best_time_path) lsr::write_best_time_csv(t.best, best_time_path);
    });
}

lsr_status lsr_scaling(const char* large_best_time, const char* small_best_time, const char* out_path) {
    return guarded([&] {
        need(large_best_time, "large_best_time");
        need(small_best_time, "small_best_time");
        need(out_path, "out_path");
        lsr::write_scaling_csv(
            lsr::scaling_ratios(lsr::read_best_time_csv(large_best_time), lsr::read_best_time_csv(small_best_time)),
            out_path);
    });
}

}  // extern "C"

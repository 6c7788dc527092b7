#include "ctxeval.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <initializer_list>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "ctxeval/benchmark.hpp"
#include "ctxeval/error.hpp"
#include "ctxeval/metrics.hpp"
#include "ctxeval/mfr.hpp"
#include "ctxeval/pipeline.hpp"
#include "ctxeval/text.hpp"

namespace {

thread_local std::string g_last_error;

int code_of(const ctxeval::Error& e) {
    switch (e.code()) {
        case ctxeval::ErrorCode::invalid_argument: return CTXEVAL_ERR_INVALID;
        case ctxeval::ErrorCode::parse_error: return CTXEVAL_ERR_PARSE;
        case ctxeval::ErrorCode::io_error: return CTXEVAL_ERR_IO;
        case ctxeval::ErrorCode::not_found: return CTXEVAL_ERR_NOT_FOUND;
        case ctxeval::ErrorCode::domain_error: return CTXEVAL_ERR_DOMAIN;
    }
    return CTXEVAL_ERR_INTERNAL;
}

// Runs the body, translating exceptions into status codes.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return CTXEVAL_OK;
    } catch (const ctxeval::Error& e) {
        g_last_error = e.what();
        return code_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CTXEVAL_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return CTXEVAL_ERR_INTERNAL;
    }
}

int require_args(std::initializer_list<const void*> args) {
    for (const void* arg : args) {
        if (arg == nullptr) {
            g_last_error = "null argument";
            return CTXEVAL_ERR_INVALID;
        }
    }
    return CTXEVAL_OK;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

char** dup_string_list(const std::vector<std::string>& items) {
    char** out = static_cast<char**>(std::malloc(sizeof(char*) * (items.size() + 1)));
    for (std::size_t i = 0; i < items.size(); ++i) out[i] = dup_string(items[i]);
    out[items.size()] = nullptr;
    return out;
}

const char* or_empty(const char* s) { return s == nullptr ? "" : s; }

}  // namespace

struct ctxeval_index {
    ctxeval::Bm25Index impl;
};

extern "C" {

const char* ctxeval_version(void) { return "0.1.0"; }

const char* ctxeval_last_error(void) { return g_last_error.c_str(); }

void ctxeval_free_string(char* s) { std::free(s); }

void ctxeval_free_string_list(char** list, size_t len) {
    if (list == nullptr) return;
    for (size_t i = 0; i < len; ++i) std::free(list[i]);
    std::free(list);
}

int ctxeval_normalize(const char* text, char** out) {
    if (int rc = require_args({text, out})) return rc;
    return guarded([&] { *out = dup_string(ctxeval::normalize(text)); });
}

int ctxeval_tokenize(const char* text, char*** out_tokens, size_t* out_len) {
    if (int rc = require_args({text, out_tokens, out_len})) return rc;
    return guarded([&] {
        const ctxeval::Tokens tokens = ctxeval::tokenize(text);
        *out_tokens = dup_string_list(tokens);
        *out_len = tokens.size();
    });
}

int ctxeval_levenshtein(const char* a, const char* b, size_t* out) {
    if (int rc = require_args({a, b, out})) return rc;
    return guarded([&] { *out = ctxeval::levenshtein(a, b); });
}

int ctxeval_rouge_n(const char* candidate, const char* reference, unsigned n,
                    ctxeval_metric_score* out) {
    if (int rc = require_args({candidate, reference, out})) return rc;
    return guarded([&] {
        const auto score = ctxeval::rouge_n(ctxeval::tokenize(candidate),
                                            ctxeval::tokenize(reference), static_cast<int>(n));
        *out = {score.precision, score.recall, score.f1};
    });
}

int ctxeval_rouge_l(const char* candidate, const char* reference, ctxeval_metric_score* out) {
    if (int rc = require_args({candidate, reference, out})) return rc;
    return guarded([&] {
        const auto score =
            ctxeval::rouge_l(ctxeval::tokenize(candidate), ctxeval::tokenize(reference));
        *out = {score.precision, score.recall, score.f1};
    });
}

int ctxeval_density(const char* candidate, const char* source, double* out) {
    if (int rc = require_args({candidate, source, out})) return rc;
    return guarded(
        [&] { *out = ctxeval::density(ctxeval::tokenize(candidate), ctxeval::tokenize(source)); });
}

int ctxeval_pearson(const double* x, const double* y, size_t len, double* out) {
    if (int rc = require_args({x, y, out})) return rc;
    return guarded([&] { *out = ctxeval::pearson({x, len}, {y, len}); });
}

int ctxeval_margin_failure(double phi_train, double phi_test, double margin, int* out) {
    if (int rc = require_args({out})) return rc;
    return guarded([&] { *out = ctxeval::margin_failure(phi_train, phi_test, margin); });
}

int ctxeval_index_create(const char* const* doc_ids, const char* const* texts, size_t n,
                         double k1, double b, ctxeval_index** out) {
    if (int rc = require_args({doc_ids, texts, out})) return rc;
    return guarded([&] {
        std::vector<std::pair<std::string, std::string>> corpus;
        corpus.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            corpus.emplace_back(or_empty(doc_ids[i]), or_empty(texts[i]));
        }
        ctxeval::Bm25Params params;
        if (k1 > 0.0) params.k1 = k1;
        if (b >= 0.0) params.b = b;
        *out = new ctxeval_index{ctxeval::Bm25Index::build(corpus, params)};
    });
}

void ctxeval_index_destroy(ctxeval_index* index) { delete index; }

int ctxeval_index_score(const ctxeval_index* index, const char* query, const char* doc_id,
                        double* out) {
    if (int rc = require_args({index, query, doc_id, out})) return rc;
    return guarded([&] { *out = index->impl.score(ctxeval::tokenize(query), doc_id); });
}

int ctxeval_index_top_k(const ctxeval_index* index, const char* query, size_t k,
                        const char* const* exclude_ids, size_t n_exclude, char*** out_ids,
                        size_t* out_len) {
    if (int rc = require_args({index, query, out_ids, out_len})) return rc;
    if (n_exclude > 0 && exclude_ids == nullptr) {
        g_last_error = "null argument";
        return CTXEVAL_ERR_INVALID;
    }
    return guarded([&] {
        std::unordered_set<std::string> exclude;
        for (size_t i = 0; i < n_exclude; ++i) exclude.insert(or_empty(exclude_ids[i]));
        const auto ids = index->impl.top_k(ctxeval::tokenize(query), k, exclude);
        *out_ids = dup_string_list(ids);
        *out_len = ids.size();
    });
}

void ctxeval_build_options_init(ctxeval_build_options* options) {
    if (options == nullptr) return;
    *options = {};
    options->mode = CTXEVAL_MODE_HARD_NEG;
    options->variant = CTXEVAL_TRANSFER_POS;
    options->n_neg = 4;
    options->dedup_threshold = 4;
    options->seed = 17;
    options->k1 = 0.0;
    options->b = -1.0;
}

int ctxeval_build(const ctxeval_build_options* options) {
    if (int rc = require_args({options})) return rc;
    if (int rc = require_args({options->corpus_path, options->out_dir})) return rc;
    return guarded([&] {
        ctxeval::BuildOptions build;
        build.corpus_path = options->corpus_path;
        build.out_dir = options->out_dir;
        switch (options->mode) {
            case CTXEVAL_MODE_NONE_NEG: build.mode = ctxeval::NegMode::none_neg; break;
            case CTXEVAL_MODE_HARD_NEG: build.mode = ctxeval::NegMode::hard_neg; break;
            case CTXEVAL_MODE_RAND_NEG: build.mode = ctxeval::NegMode::rand_neg; break;
            default:
                throw ctxeval::Error(ctxeval::ErrorCode::invalid_argument,
                                     "unknown mode " + std::to_string(options->mode));
        }
        switch (options->variant) {
            case CTXEVAL_TRANSFER_POS: build.variant = ctxeval::TransferVariant::transfer_pos; break;
            case CTXEVAL_TRANSFER_ALL: build.variant = ctxeval::TransferVariant::transfer_all; break;
            default:
                throw ctxeval::Error(ctxeval::ErrorCode::invalid_argument,
                                     "unknown variant " + std::to_string(options->variant));
        }
        build.n_neg = options->n_neg;
        build.dedup_threshold = options->dedup_threshold;
        build.seed = options->seed;
        if (options->k1 > 0.0) build.bm25.k1 = options->k1;
        if (options->b >= 0.0) build.bm25.b = options->b;
        ctxeval::run_build(build);
    });
}

int ctxeval_score(const ctxeval_score_options* options) {
    if (int rc = require_args({options})) return rc;
    if (int rc = require_args({options->predictions_path, options->test_path, options->metrics,
                               options->out_csv})) {
        return rc;
    }
    return guarded([&] {
        ctxeval::ScoreOptions score;
        score.predictions_path = options->predictions_path;
        score.test_path = options->test_path;
        score.train_path = or_empty(options->train_path);
        score.out_csv = options->out_csv;
        std::string metrics = options->metrics;
        std::size_t start = 0;
        while (start <= metrics.size()) {
            std::size_t end = metrics.find(',', start);
            if (end == std::string::npos) end = metrics.size();
            if (end > start) score.metric_specs.push_back(metrics.substr(start, end - start));
            start = end + 1;
        }
        ctxeval::run_score(score);
    });
}

int ctxeval_validate_scores(const char* csv_path) {
    if (int rc = require_args({csv_path})) return rc;
    return guarded([&] {
        std::ostringstream summary;
        ctxeval::run_validate_scores(csv_path, summary);
        const std::string text = std::move(summary).str();
        std::fwrite(text.data(), 1, text.size(), stdout);
    });
}

void ctxeval_mfr_options_init(ctxeval_mfr_options* options) {
    if (options == nullptr) return;
    *options = {};
    options->margin = 1.25;
    options->filter_threshold = 40.0;
}

int ctxeval_mfr(const ctxeval_mfr_options* options) {
    if (int rc = require_args({options})) return rc;
    if (int rc = require_args({options->metric})) return rc;
    return guarded([&] {
        ctxeval::MfrOptions mfr;
        mfr.scores_path = or_empty(options->scores_path);
        mfr.predictions_path = or_empty(options->predictions_path);
        mfr.test_path = or_empty(options->test_path);
        mfr.train_path = or_empty(options->train_path);
        mfr.metric = options->metric;
        mfr.margin = options->margin;
        mfr.filter_candidates = options->filter_candidates != 0;
        mfr.filter_threshold = options->filter_threshold;
        mfr.out_json = or_empty(options->out_json);
        mfr.out_table = or_empty(options->out_table);
        ctxeval::run_mfr(mfr);
    });
}

void ctxeval_sweep_options_init(ctxeval_sweep_options* options) {
    if (options == nullptr) return;
    *options = {};
    options->m_min = 1.0;
    options->m_max = 2.0;
    options->step = 0.01;
}

int ctxeval_sweep(const ctxeval_sweep_options* options) {
    if (int rc = require_args({options})) return rc;
    if (int rc = require_args({options->scores_path, options->metric, options->labels_path,
                               options->out_csv})) {
        return rc;
    }
    return guarded([&] {
        ctxeval::SweepOptions sweep;
        sweep.scores_path = options->scores_path;
        sweep.metric = options->metric;
        sweep.labels_path = options->labels_path;
        sweep.m_min = options->m_min;
        sweep.m_max = options->m_max;
        sweep.step = options->step;
        sweep.out_csv = options->out_csv;
        sweep.out_json = or_empty(options->out_json);
        ctxeval::run_sweep(sweep);
    });
}

void ctxeval_correlate_options_init(ctxeval_correlate_options* options) {
    if (options == nullptr) return;
    *options = {};
    options->margin = 1.25;
}

int ctxeval_correlate(const ctxeval_correlate_options* options) {
    if (int rc = require_args({options})) return rc;
    if (int rc = require_args({options->scores_path, options->labels_path, options->out_csv})) {
        return rc;
    }
    return guarded([&] {
        ctxeval::CorrelateOptions correlate;
        correlate.scores_path = options->scores_path;
        correlate.labels_path = options->labels_path;
        correlate.margin = options->margin;
        correlate.out_csv = options->out_csv;
        ctxeval::run_correlate(correlate);
    });
}

} /* extern "C" */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ctxeval/benchmark.hpp"

namespace ctxeval {

/// Everything a `build` run needs. Outputs land in `out_dir` as
/// train.jsonl, dev.jsonl, test.jsonl and manifest.json.
struct BuildOptions {
    std::string corpus_path;
    std::string out_dir;
    NegMode mode = NegMode::hard_neg;
    TransferVariant variant = TransferVariant::transfer_pos;
    int n_neg = 4;
    int dedup_threshold = 4;
    std::uint64_t seed = 17;
    Bm25Params bm25;
};

struct BuildReport {
    std::size_t raw = 0;
    std::size_t kept = 0;
    std::size_t groups = 0;
    std::size_t train = 0;
    std::size_t dev = 0;
    std::size_t test = 0;
    std::vector<std::string> notices;
};

BuildReport run_build(const BuildOptions& options);

/// Computes built-in metric scores for predictions against the test split
/// (and the train split, for context-kind metrics) and writes a score
/// table CSV. Metric specs are "rouge-1", "rouge-l", "density", optionally
/// suffixed ":answers" or ":contexts" to override the reference kind.
struct ScoreOptions {
    std::string predictions_path;
    std::string test_path;
    std::string train_path;  // required only by context-kind metrics
    std::vector<std::string> metric_specs;
    std::string out_csv;
};

void run_score(const ScoreOptions& options);

/// Parses an externally produced score CSV, enforcing the table
/// invariants; writes a one-line summary on success.
void run_validate_scores(const std::string& csv_path, std::ostream& summary);

/// Margin-failure report for one metric at one margin. Phi values come
/// from a score table CSV when `scores_path` is set, otherwise they are
/// computed in-process from the prediction and split files.
struct MfrOptions {
    std::string scores_path;
    std::string predictions_path;
    std::string test_path;
    std::string train_path;
    std::string metric;
    double margin = 1.25;
    bool filter_candidates = false;
    double filter_threshold = 40.0;  // display scale
    std::string out_json;
    std::string out_table;  // optional; "-" writes the table to stdout
};

void run_mfr(const MfrOptions& options);

struct SweepOptions {
    std::string scores_path;
    std::string metric;
    std::string labels_path;
    double m_min = 1.0;
    double m_max = 2.0;
    double step = 0.01;
    std::string out_csv;
    std::string out_json;
};

void run_sweep(const SweepOptions& options);

struct CorrelateOptions {
    std::string scores_path;
    std::string labels_path;
    double margin = 1.25;
    std::string out_csv;
};

void run_correlate(const CorrelateOptions& options);

}  // namespace ctxeval

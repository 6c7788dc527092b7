// Command-line front end for the ctxeval shared library. All heavy lifting
// happens behind the C API; this file only parses flags and forwards.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "ctxeval.h"

namespace {

int report(int status) {
    if (status != CTXEVAL_OK) {
        std::fprintf(stderr, "ctxeval: error: %s\n", ctxeval_last_error());
    }
    return status;
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("ctxeval ") + ctxeval_version() +
                 " - context-transfer QA benchmarks and margin failure rates"};
    app.require_subcommand(1);

    // build
    ctxeval_build_options build_options;
    ctxeval_build_options_init(&build_options);
    std::string corpus_path, out_dir, mode = "hard-neg", variant = "transfer-pos";
    auto* build = app.add_subcommand("build", "Construct train/dev/test splits from a corpus");
    build->add_option("--corpus", corpus_path, "Input corpus (JSONL: id, question, context, answer)")
        ->required();
    build->add_option("--out-dir", out_dir, "Output directory")->required();
    build->add_option("--mode", mode, "Negative-context mode: none-neg, hard-neg, rand-neg")
        ->check(CLI::IsMember({"none-neg", "hard-neg", "rand-neg"}))
        ->capture_default_str();
    build->add_option("--variant", variant, "Test transfer variant: transfer-pos, transfer-all")
        ->check(CLI::IsMember({"transfer-pos", "transfer-all"}))
        ->capture_default_str();
    build->add_option("--n-neg", build_options.n_neg, "Negative contexts per example")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    build->add_option("--threshold", build_options.dedup_threshold,
                      "Drop examples whose dedup key is within this edit distance of a kept one")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    build->add_option("--seed", build_options.seed, "Random seed for sampled negatives")
        ->capture_default_str();
    build->add_option("--k1", build_options.k1, "BM25 k1 (default 1.2)");
    build->add_option("--b", build_options.b, "BM25 b (default 0.75)");

    // score
    ctxeval_score_options score_options;
    std::string predictions_path, test_path, train_path, metrics = "rouge-1,rouge-l,density";
    std::string out_csv, validate_path;
    auto* score = app.add_subcommand("score", "Score predictions with built-in metrics, or "
                                              "validate an external score CSV");
    score->add_option("--predictions", predictions_path, "Predictions (JSONL: id, answer)");
    score->add_option("--test", test_path, "Test split (test.jsonl)");
    score->add_option("--train", train_path, "Train split, needed by context-kind metrics");
    score->add_option("--metrics", metrics,
                      "Comma-separated metric specs; rouge-1, rouge-l, density, optionally "
                      "suffixed :answers or :contexts")
        ->capture_default_str();
    score->add_option("--out", out_csv, "Output score CSV");
    score->add_option("--validate", validate_path, "Validate this external score CSV and exit");

    // mfr
    ctxeval_mfr_options mfr_options;
    ctxeval_mfr_options_init(&mfr_options);
    std::string scores_path, metric, out_json, out_table = "-";
    bool filter = false;
    auto* mfr = app.add_subcommand("mfr", "Margin failure rate for one metric at one margin");
    mfr->add_option("--scores", scores_path, "Score table CSV (computed or external)");
    mfr->add_option("--predictions", predictions_path, "Predictions (JSONL), for in-process phi");
    mfr->add_option("--test", test_path, "Test split, for in-process phi");
    mfr->add_option("--train", train_path, "Train split, for context-kind metrics");
    mfr->add_option("--metric", metric, "Metric name (built-in or a score-table column)")
        ->required();
    mfr->add_option("--margin", mfr_options.margin, "Margin m")->capture_default_str();
    mfr->add_flag("--filter-candidates", filter,
                  "Keep only predictions whose ROUGE-1 against train references exceeds the "
                  "filter threshold");
    mfr->add_option("--filter-threshold", mfr_options.filter_threshold,
                    "Candidate filter threshold, 0-100 scale")
        ->capture_default_str();
    mfr->add_option("--out", out_json, "Report JSON path");
    mfr->add_option("--table", out_table, "Text table path ('-' for stdout)")
        ->capture_default_str();

    // sweep
    ctxeval_sweep_options sweep_options;
    ctxeval_sweep_options_init(&sweep_options);
    std::string labels_path, sweep_json;
    auto* sweep = app.add_subcommand("sweep", "Correlate margin-failure flags with human labels "
                                              "over a margin grid");
    sweep->add_option("--scores", scores_path, "Score table CSV")->required();
    sweep->add_option("--metric", metric, "Metric name")->required();
    sweep->add_option("--labels", labels_path, "Human labels CSV (prediction_id,label)")
        ->required();
    sweep->add_option("--m-min", sweep_options.m_min, "Grid start")->capture_default_str();
    sweep->add_option("--m-max", sweep_options.m_max, "Grid end")->capture_default_str();
    sweep->add_option("--step", sweep_options.step, "Grid step")->capture_default_str();
    sweep->add_option("--out-csv", out_csv, "Sweep CSV (margin,r)")->required();
    sweep->add_option("--out-json", sweep_json, "Summary JSON with the best point");

    // correlate
    ctxeval_correlate_options correlate_options;
    ctxeval_correlate_options_init(&correlate_options);
    auto* correlate = app.add_subcommand("correlate", "Metric-vs-metric correlation matrix of "
                                                      "margin-failure flags plus human labels");
    correlate->add_option("--scores", scores_path, "Score table CSV")->required();
    correlate->add_option("--labels", labels_path, "Human labels CSV")->required();
    correlate->add_option("--margin", correlate_options.margin, "Margin m")
        ->capture_default_str();
    correlate->add_option("--out", out_csv, "Matrix CSV")->required();

    CLI11_PARSE(app, argc, argv);

    if (build->parsed()) {
        build_options.corpus_path = corpus_path.c_str();
        build_options.out_dir = out_dir.c_str();
        build_options.mode = mode == "none-neg"   ? CTXEVAL_MODE_NONE_NEG
                             : mode == "rand-neg" ? CTXEVAL_MODE_RAND_NEG
                                                  : CTXEVAL_MODE_HARD_NEG;
        build_options.variant =
            variant == "transfer-all" ? CTXEVAL_TRANSFER_ALL : CTXEVAL_TRANSFER_POS;
        return report(ctxeval_build(&build_options));
    }
    if (score->parsed()) {
        if (!validate_path.empty()) {
            return report(ctxeval_validate_scores(validate_path.c_str()));
        }
        if (predictions_path.empty() || test_path.empty() || out_csv.empty()) {
            std::fprintf(stderr,
                         "ctxeval: error: score needs --predictions, --test and --out "
                         "(or --validate FILE)\n");
            return CTXEVAL_ERR_INVALID;
        }
        score_options.predictions_path = predictions_path.c_str();
        score_options.test_path = test_path.c_str();
        score_options.train_path = opt(train_path);
        score_options.metrics = metrics.c_str();
        score_options.out_csv = out_csv.c_str();
        return report(ctxeval_score(&score_options));
    }
    if (mfr->parsed()) {
        mfr_options.scores_path = opt(scores_path);
        mfr_options.predictions_path = opt(predictions_path);
        mfr_options.test_path = opt(test_path);
        mfr_options.train_path = opt(train_path);
        mfr_options.metric = metric.c_str();
        mfr_options.filter_candidates = filter ? 1 : 0;
        mfr_options.out_json = opt(out_json);
        mfr_options.out_table = opt(out_table);
        return report(ctxeval_mfr(&mfr_options));
    }
    if (sweep->parsed()) {
        sweep_options.scores_path = scores_path.c_str();
        sweep_options.metric = metric.c_str();
        sweep_options.labels_path = labels_path.c_str();
        sweep_options.out_csv = out_csv.c_str();
        sweep_options.out_json = opt(sweep_json);
        return report(ctxeval_sweep(&sweep_options));
    }
    if (correlate->parsed()) {
        correlate_options.scores_path = scores_path.c_str();
        correlate_options.labels_path = labels_path.c_str();
        correlate_options.out_csv = out_csv.c_str();
        return report(ctxeval_correlate(&correlate_options));
    }
    return CTXEVAL_ERR_INVALID;
}

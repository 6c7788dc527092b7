#include "ctxeval/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ctxeval/error.hpp"
#include "ctxeval/io.hpp"
#include "ctxeval/meta_eval.hpp"
#include "ctxeval/metrics.hpp"
#include "ctxeval/mfr.hpp"
#include "ctxeval/score_table.hpp"
#include "ctxeval/text.hpp"

namespace ctxeval {

namespace {

using nlohmann::ordered_json;

namespace fs = std::filesystem;

struct MetricSpec {
    std::string table_name;  // as given, e.g. "rouge-l" or "rouge-l:contexts"
    std::string name;        // builtin name
    MetricKind kind;
};

MetricSpec parse_metric_spec(const std::string& spec) {
    MetricSpec parsed;
    parsed.table_name = spec;
    const auto colon = spec.find(':');
    parsed.name = spec.substr(0, colon);
    if (!is_builtin_metric(parsed.name)) {
        throw Error(ErrorCode::not_found,
                    "unknown metric '" + parsed.name + "' (built-in: rouge-1, rouge-l, density)");
    }
    if (colon == std::string::npos) {
        parsed.kind = builtin_metric_default_kind(parsed.name);
    } else {
        const std::string kind = spec.substr(colon + 1);
        if (kind == "answers") parsed.kind = MetricKind::answers;
        else if (kind == "contexts") parsed.kind = MetricKind::contexts;
        else throw Error(ErrorCode::invalid_argument,
                         "metric spec '" + spec + "': kind must be 'answers' or 'contexts'");
    }
    return parsed;
}

std::vector<TestExample> load_test_split(const std::string& path) {
    std::istringstream in(read_file(path));
    return read_test_jsonl(in, fs::path(path).filename().string());
}

std::vector<Prediction> load_predictions(const std::string& path) {
    std::istringstream in(read_file(path));
    return read_predictions_jsonl(in, fs::path(path).filename().string());
}

ScoreTable load_score_table(const std::string& path) {
    std::istringstream in(read_file(path));
    return ScoreTable::from_csv(in, fs::path(path).filename().string());
}

HumanLabelSet load_labels(const std::string& path) {
    std::istringstream in(read_file(path));
    return HumanLabelSet::from_csv(in, fs::path(path).filename().string());
}

/// Positive contexts of the train split grouped by normalized question.
std::map<std::string, std::vector<std::string>> train_contexts_by_question(
    const std::string& train_path) {
    std::istringstream in(read_file(train_path));
    const auto train = read_examples_jsonl(in, fs::path(train_path).filename().string());
    std::map<std::string, std::vector<std::string>> by_question;
    for (const auto& e : train) {
        by_question[normalize(e.question)].push_back(e.positive_context);
    }
    return by_question;
}

/// Pairs each prediction with its test example; unknown prediction ids are
/// rejected.
std::vector<std::pair<Prediction, const TestExample*>> match_predictions(
    const std::vector<Prediction>& predictions, const std::vector<TestExample>& test) {
    std::map<std::string, const TestExample*> by_id;
    for (const auto& e : test) by_id.emplace(e.id, &e);
    std::vector<std::pair<Prediction, const TestExample*>> matched;
    matched.reserve(predictions.size());
    for (const auto& p : predictions) {
        auto it = by_id.find(p.id);
        if (it == by_id.end()) {
            throw Error(ErrorCode::not_found,
                        "prediction id '" + p.id + "' does not appear in the test split");
        }
        matched.emplace_back(p, it->second);
    }
    std::sort(matched.begin(), matched.end(),
              [](const auto& a, const auto& b) { return a.first.id < b.first.id; });
    return matched;
}

ReferenceSet train_reference_set(
    const MetricSpec& spec, const TestExample& example,
    const std::map<std::string, std::vector<std::string>>* train_contexts) {
    ReferenceSet refs;
    refs.role = RefRole::train;
    refs.kind = spec.kind;
    if (spec.kind == MetricKind::answers) {
        refs.texts = example.train_ref_answers;
    } else {
        if (train_contexts == nullptr) {
            throw Error(ErrorCode::invalid_argument,
                        "metric '" + spec.table_name +
                            "' scores against train contexts; a train split is required");
        }
        auto it = train_contexts->find(normalize(example.question));
        if (it == train_contexts->end() || it->second.empty()) {
            throw Error(ErrorCode::not_found,
                        "no train contexts found for the question of test example '" +
                            example.id + "'");
        }
        refs.texts = it->second;
    }
    return refs;
}

ReferenceSet test_reference_set(const MetricSpec& spec, const TestExample& example) {
    ReferenceSet refs;
    refs.role = RefRole::test;
    refs.kind = spec.kind;
    refs.texts = spec.kind == MetricKind::answers
                     ? std::vector<std::string>{example.answer}
                     : std::vector<std::string>{example.positive_context};
    return refs;
}

std::vector<MFRecord> compute_records(
    const std::vector<std::pair<Prediction, const TestExample*>>& matched,
    const MetricSpec& spec, double margin,
    const std::map<std::string, std::vector<std::string>>* train_contexts) {
    const MetricFn metric = builtin_metric(spec.name);
    std::vector<MFRecord> records;
    records.reserve(matched.size());
    for (const auto& [prediction, example] : matched) {
        records.push_back(compute_mf(prediction.id, prediction.answer,
                                     train_reference_set(spec, *example, train_contexts),
                                     test_reference_set(spec, *example), metric, margin));
    }
    return records;
}

std::vector<std::string> candidate_filter_ids(
    const std::vector<std::pair<Prediction, const TestExample*>>& matched, double threshold) {
    std::vector<CandidatePrediction> candidates;
    candidates.reserve(matched.size());
    for (const auto& [prediction, example] : matched) {
        candidates.push_back({prediction.id, prediction.answer, example->train_ref_answers});
    }
    return filter_candidates(candidates, threshold);
}

std::string render_mfr_table(const std::string& metric_name, double margin,
                             const std::vector<MFRecord>& records, double mfr) {
    std::size_t id_width = 2;  // "id"
    for (const auto& r : records) id_width = std::max(id_width, r.prediction_id.size());

    std::ostringstream out;
    out << std::left;
    auto pad = [&](const std::string& s, std::size_t width) {
        out << s;
        for (std::size_t i = s.size(); i < width + 2; ++i) out << ' ';
    };
    pad("id", id_width);
    out << "phi_train  phi_test  flag\n";
    for (const auto& r : records) {
        pad(r.prediction_id, id_width);
        std::string train_s = fmt_display_score(r.phi_train);
        std::string test_s = fmt_display_score(r.phi_test);
        train_s.insert(0, train_s.size() < 9 ? 9 - train_s.size() : 0, ' ');
        test_s.insert(0, test_s.size() < 8 ? 8 - test_s.size() : 0, ' ');
        out << train_s << "  " << test_s << "  " << r.flag << '\n';
    }
    out << "metric=" << metric_name << " margin=" << fmt_double_compact(margin)
        << " n=" << records.size() << " mfr=" << fmt_display_score(mfr) << '\n';
    return std::move(out).str();
}

}  // namespace

BuildReport run_build(const BuildOptions& options) {
    const std::string corpus_bytes = read_file(options.corpus_path);
    std::istringstream corpus_in(corpus_bytes);
    const auto raw = read_corpus_jsonl(corpus_in, fs::path(options.corpus_path).filename().string());
    if (raw.empty()) {
        throw Error(ErrorCode::invalid_argument, "empty corpus: " + options.corpus_path);
    }

    const auto kept = dedup(raw, options.dedup_threshold);
    const auto groups = group_by_question(kept);
    const auto index = build_context_index(kept, options.bm25);

    BuildReport report;
    const BenchmarkSplit split = build_transfer_test(groups, options.variant, options.mode,
                                                     options.n_neg, index, options.seed,
                                                     &report.notices);
    report.raw = raw.size();
    report.kept = kept.size();
    report.groups = groups.size();
    report.train = split.train.size();
    report.dev = split.dev.size();
    report.test = split.test.size();

    ordered_json manifest;
    manifest["command"] = "build";
    manifest["corpus_fnv1a64"] = fnv1a64_hex(corpus_bytes);
    manifest["dedup_threshold"] = options.dedup_threshold;
    manifest["mode"] = to_string(options.mode);
    manifest["variant"] = to_string(options.variant);
    manifest["n_neg"] = options.n_neg;
    manifest["seed"] = options.seed;
    manifest["bm25"] = {{"k1", options.bm25.k1}, {"b", options.bm25.b}};
    manifest["counts"] = {{"raw", report.raw},     {"kept", report.kept},
                          {"groups", report.groups}, {"train", report.train},
                          {"dev", report.dev},     {"test", report.test}};

    const fs::path out_dir(options.out_dir);
    fs::create_directories(out_dir);
    write_file_atomic(out_dir / "train.jsonl", to_jsonl(split.train));
    write_file_atomic(out_dir / "dev.jsonl", to_jsonl(split.dev));
    write_file_atomic(out_dir / "test.jsonl", to_jsonl(split.test));
    write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return report;
}

void run_score(const ScoreOptions& options) {
    if (options.metric_specs.empty()) {
        throw Error(ErrorCode::invalid_argument, "score: no metrics requested");
    }
    std::vector<MetricSpec> specs;
    specs.reserve(options.metric_specs.size());
    bool needs_train_contexts = false;
    for (const auto& raw : options.metric_specs) {
        specs.push_back(parse_metric_spec(raw));
        needs_train_contexts |= specs.back().kind == MetricKind::contexts;
    }

    const auto test = load_test_split(options.test_path);
    const auto predictions = load_predictions(options.predictions_path);
    const auto matched = match_predictions(predictions, test);

    std::map<std::string, std::vector<std::string>> train_contexts;
    if (needs_train_contexts) {
        if (options.train_path.empty()) {
            throw Error(ErrorCode::invalid_argument,
                        "score: a context-kind metric was requested, pass the train split");
        }
        train_contexts = train_contexts_by_question(options.train_path);
    }

    ScoreTable table;
    for (const auto& spec : specs) {
        const auto records = compute_records(matched, spec, 1.0,
                                             needs_train_contexts ? &train_contexts : nullptr);
        for (const auto& r : records) {
            table.insert({r.prediction_id, RefRole::train, spec.table_name}, r.phi_train);
            table.insert({r.prediction_id, RefRole::test, spec.table_name}, r.phi_test);
        }
    }

    std::ostringstream out;
    table.write_csv(out);
    write_file_atomic(options.out_csv, std::move(out).str());
}

void run_validate_scores(const std::string& csv_path, std::ostream& summary) {
    const ScoreTable table = load_score_table(csv_path);
    const auto metrics = table.metric_names();
    summary << "ok: " << table.size() << " entries, " << metrics.size() << " metric(s)";
    for (const auto& name : metrics) summary << ' ' << name;
    summary << '\n';
}

void run_mfr(const MfrOptions& options) {
    if (options.metric.empty()) {
        throw Error(ErrorCode::invalid_argument, "mfr: metric name required");
    }

    std::vector<MFRecord> records;
    if (!options.scores_path.empty()) {
        const ScoreTable table = load_score_table(options.scores_path);
        std::set<std::string> ids;
        for (const auto& [key, score] : table.entries()) {
            if (key.metric == options.metric) ids.insert(key.prediction_id);
        }
        if (ids.empty()) {
            throw Error(ErrorCode::not_found,
                        "mfr: no entries for metric '" + options.metric + "' in " +
                            options.scores_path);
        }
        for (const auto& id : ids) {
            records.push_back(compute_mf_from_table(table, id, options.metric, options.margin));
        }
    } else {
        const MetricSpec spec = parse_metric_spec(options.metric);
        if (options.predictions_path.empty() || options.test_path.empty()) {
            throw Error(ErrorCode::invalid_argument,
                        "mfr: prediction and test files are required without a score table");
        }
        const auto test = load_test_split(options.test_path);
        const auto matched = match_predictions(load_predictions(options.predictions_path), test);
        std::map<std::string, std::vector<std::string>> train_contexts;
        const bool needs_train = spec.kind == MetricKind::contexts;
        if (needs_train) {
            if (options.train_path.empty()) {
                throw Error(ErrorCode::invalid_argument,
                            "mfr: metric '" + options.metric +
                                "' scores against train contexts, pass the train split");
            }
            train_contexts = train_contexts_by_question(options.train_path);
        }
        records = compute_records(matched, spec, options.margin,
                                  needs_train ? &train_contexts : nullptr);
    }

    std::size_t total = records.size();
    if (options.filter_candidates) {
        if (options.predictions_path.empty() || options.test_path.empty()) {
            throw Error(ErrorCode::invalid_argument,
                        "mfr: the candidate filter needs the prediction and test files");
        }
        const auto test = load_test_split(options.test_path);
        const auto matched = match_predictions(load_predictions(options.predictions_path), test);
        const auto kept_list = candidate_filter_ids(matched, options.filter_threshold);
        const std::set<std::string> kept(kept_list.begin(), kept_list.end());
        std::set<std::string> known;
        for (const auto& [prediction, example] : matched) known.insert(prediction.id);
        for (const auto& r : records) {
            if (!known.count(r.prediction_id)) {
                throw Error(ErrorCode::not_found,
                            "mfr: no prediction text for '" + r.prediction_id +
                                "', cannot apply the candidate filter");
            }
        }
        std::vector<MFRecord> filtered;
        for (auto& r : records) {
            if (kept.count(r.prediction_id)) filtered.push_back(std::move(r));
        }
        records = std::move(filtered);
        if (records.empty()) {
            throw Error(ErrorCode::invalid_argument,
                        "mfr: no predictions survive the candidate filter (threshold " +
                            fmt_double_compact(options.filter_threshold) + ")");
        }
    }

    const double mfr = compute_mfr(records);

    ordered_json report;
    report["metric_name"] = options.metric;
    report["margin"] = options.margin;
    report["n"] = records.size();
    report["mfr"] = mfr;
    report["filter"] = options.filter_candidates
                           ? ordered_json{{"applied", true},
                                          {"threshold", options.filter_threshold},
                                          {"kept", records.size()},
                                          {"scored", total}}
                           : ordered_json{{"applied", false}};
    auto& rows = report["records"] = ordered_json::array();
    for (const auto& r : records) {
        rows.push_back({{"id", r.prediction_id},
                        {"phi_train", r.phi_train},
                        {"phi_test", r.phi_test},
                        {"flag", r.flag}});
    }
    if (!options.out_json.empty()) {
        write_file_atomic(options.out_json, report.dump(2) + "\n");
    }
    if (!options.out_table.empty()) {
        const std::string table = render_mfr_table(options.metric, options.margin, records, mfr);
        if (options.out_table == "-") {
            std::fwrite(table.data(), 1, table.size(), stdout);
        } else {
            write_file_atomic(options.out_table, table);
        }
    }
}

void run_sweep(const SweepOptions& options) {
    const ScoreTable table = load_score_table(options.scores_path);
    const HumanLabelSet labels = load_labels(options.labels_path);

    std::set<std::string> ids;
    for (const auto& [key, score] : table.entries()) {
        if (key.metric == options.metric) ids.insert(key.prediction_id);
    }
    if (ids.empty()) {
        throw Error(ErrorCode::not_found,
                    "sweep: no entries for metric '" + options.metric + "' in " +
                        options.scores_path);
    }
    std::vector<PhiPair> pairs;
    pairs.reserve(ids.size());
    for (const auto& id : ids) {
        pairs.push_back({id, table.at({id, RefRole::train, options.metric}),
                         table.at({id, RefRole::test, options.metric})});
    }

    const SweepResult result =
        margin_sweep(pairs, labels, options.m_min, options.m_max, options.step);

    std::string csv = "margin,r\n";
    std::size_t defined = 0;
    for (const auto& point : result.points) {
        csv += fmt_double_compact(point.margin);
        csv.push_back(',');
        if (point.r) {
            csv += fmt_double(*point.r);
            ++defined;
        }
        csv.push_back('\n');
    }

    ordered_json summary;
    summary["metric_name"] = options.metric;
    summary["m_min"] = options.m_min;
    summary["m_max"] = options.m_max;
    summary["step"] = options.step;
    summary["n_points"] = result.points.size();
    summary["n_defined"] = defined;
    summary["n_predictions"] = pairs.size();
    if (result.best) {
        summary["best"] = {{"margin", result.best->margin}, {"r", *result.best->r}};
    } else {
        summary["best"] = nullptr;
    }

    write_file_atomic(options.out_csv, csv);
    if (!options.out_json.empty()) {
        write_file_atomic(options.out_json, summary.dump(2) + "\n");
    }
}

void run_correlate(const CorrelateOptions& options) {
    const ScoreTable table = load_score_table(options.scores_path);
    const HumanLabelSet labels = load_labels(options.labels_path);

    std::vector<NamedFlags> vectors;
    for (const auto& metric : table.metric_names()) {
        std::set<std::string> ids;
        for (const auto& [key, score] : table.entries()) {
            if (key.metric == metric) ids.insert(key.prediction_id);
        }
        NamedFlags flags;
        flags.name = metric;
        for (const auto& id : ids) {
            flags.flags[id] = margin_failure(table.at({id, RefRole::train, metric}),
                                             table.at({id, RefRole::test, metric}),
                                             options.margin);
        }
        vectors.push_back(std::move(flags));
    }

    const CorrelationMatrix matrix = metric_correlation_matrix(vectors, labels);

    std::string csv;
    for (const auto& name : matrix.names) {
        csv.push_back(',');
        csv += csv_field(name);
    }
    csv.push_back('\n');
    for (std::size_t i = 0; i < matrix.names.size(); ++i) {
        csv += csv_field(matrix.names[i]);
        for (std::size_t j = 0; j < matrix.names.size(); ++j) {
            csv.push_back(',');
            if (matrix.values[i][j]) csv += fmt_double(*matrix.values[i][j]);
        }
        csv.push_back('\n');
    }
    write_file_atomic(options.out_csv, csv);
}

}  // namespace ctxeval

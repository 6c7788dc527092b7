#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ctxeval/error.hpp"
#include "ctxeval/meta_eval.hpp"
#include "ctxeval/pipeline.hpp"
#include "ctxeval/score_table.hpp"
#include "ctxeval/text.hpp"
#include "test_util.hpp"

using namespace ctxeval;
using nlohmann::json;

namespace {

const std::string kFixtureCorpus = std::string(CTXEVAL_FIXTURE_DIR) + "/corpus60.jsonl";

BuildOptions fixture_build(const testutil::TempDir& dir, NegMode mode, TransferVariant variant,
                           std::uint64_t seed = 17) {
    BuildOptions options;
    options.corpus_path = kFixtureCorpus;
    options.out_dir = dir.file("out");
    options.mode = mode;
    options.variant = variant;
    options.seed = seed;
    return options;
}

std::vector<TestExample> load_test(const std::string& path) {
    std::istringstream in(testutil::slurp(path));
    return read_test_jsonl(in, "test.jsonl");
}

// Predictions that copy the first train reference answer: guaranteed
// margin failures under any answer-kind metric.
std::string echo_train_predictions(const std::vector<TestExample>& test) {
    std::string out;
    for (const auto& t : test) {
        json record;
        record["id"] = t.id;
        record["answer"] = t.train_ref_answers.front();
        out += record.dump() + "\n";
    }
    return out;
}

}  // namespace

TEST_CASE("build produces the expected fixture split sizes") {
    testutil::TempDir dir;
    const auto report = run_build(fixture_build(dir, NegMode::hard_neg,
                                                TransferVariant::transfer_pos));
    CHECK(report.raw == 60);
    CHECK(report.kept == 50);
    CHECK(report.groups == 31);
    CHECK(report.train == 31);  // 19 transfer anchors + 12 singletons
    CHECK(report.dev == 19);
    CHECK(report.test == 19);
    CHECK(report.notices.size() == 12);

    for (const char* name : {"train.jsonl", "dev.jsonl", "test.jsonl", "manifest.json"}) {
        CHECK(std::filesystem::exists(dir.file(std::string("out/") + name)));
    }

    const auto manifest = json::parse(testutil::slurp(dir.file("out/manifest.json")));
    CHECK(manifest.at("mode") == "hard-neg");
    CHECK(manifest.at("variant") == "transfer-pos");
    CHECK(manifest.at("n_neg") == 4);
    CHECK(manifest.at("seed") == 17);
    CHECK(manifest.at("dedup_threshold") == 4);
    CHECK(manifest.at("counts").at("kept") == 50);
    CHECK(manifest.at("corpus_fnv1a64").get<std::string>().size() == 16);

    const auto test = load_test(dir.file("out/test.jsonl"));
    REQUIRE(test.size() == 19);
    for (const auto& t : test) {
        CHECK(t.negative_contexts.size() == 4);
        CHECK(!t.train_ref_answers.empty());
    }
}

TEST_CASE("build is byte-identical across reruns and differs across seeds") {
    testutil::TempDir dir;
    auto options = fixture_build(dir, NegMode::rand_neg, TransferVariant::transfer_all, 99);
    options.out_dir = dir.file("a");
    run_build(options);
    options.out_dir = dir.file("b");
    run_build(options);
    for (const char* name : {"/train.jsonl", "/dev.jsonl", "/test.jsonl", "/manifest.json"}) {
        CHECK(testutil::slurp(dir.file("a") + name) == testutil::slurp(dir.file("b") + name));
    }

    options.out_dir = dir.file("c");
    options.seed = 100;
    run_build(options);
    CHECK(testutil::slurp(dir.file("a") + "/train.jsonl") !=
          testutil::slurp(dir.file("c") + "/train.jsonl"));
}

TEST_CASE("build rejects malformed corpora with a line number") {
    testutil::TempDir dir;
    const std::string bad = dir.file("bad.jsonl");
    testutil::write_text(bad,
                         R"({"id":"a","question":"q?","context":"c","answer":"x"})"
                         "\nnot json at all\n");
    BuildOptions options;
    options.corpus_path = bad;
    options.out_dir = dir.file("out");
    CHECK_THROWS_WITH_AS(run_build(options), doctest::Contains("bad.jsonl:2"), Error);
    CHECK(!std::filesystem::exists(dir.file("out/train.jsonl")));

    testutil::write_text(bad, R"({"id":"a","question":"q?","context":"","answer":"x"})"
                              "\n");
    CHECK_THROWS_WITH_AS(run_build(options), doctest::Contains("nonempty"), Error);

    testutil::write_text(bad, R"({"id":"a","question":"q?","context":"c","answer":"x"})"
                              "\n"
                              R"({"id":"a","question":"q2?","context":"c2","answer":"y"})"
                              "\n");
    CHECK_THROWS_WITH_AS(run_build(options), doctest::Contains("duplicate id"), Error);

    options.corpus_path = dir.file("missing.jsonl");
    CHECK_THROWS_AS(run_build(options), Error);
}

TEST_CASE("score computes phi for built-in metrics and writes a table") {
    testutil::TempDir dir;
    run_build(fixture_build(dir, NegMode::hard_neg, TransferVariant::transfer_pos));
    const auto test = load_test(dir.file("out/test.jsonl"));
    testutil::write_text(dir.file("pred.jsonl"), echo_train_predictions(test));

    ScoreOptions score;
    score.predictions_path = dir.file("pred.jsonl");
    score.test_path = dir.file("out/test.jsonl");
    score.train_path = dir.file("out/train.jsonl");
    score.metric_specs = {"rouge-1", "rouge-l", "density"};
    score.out_csv = dir.file("scores.csv");
    run_score(score);

    std::istringstream in(testutil::slurp(dir.file("scores.csv")));
    const auto table = ScoreTable::from_csv(in, "scores.csv");
    CHECK(table.metric_names() == std::vector<std::string>{"density", "rouge-1", "rouge-l"});
    CHECK(table.size() == 19 * 2 * 3);

    // echoing a train reference scores 1.0 against train answers
    for (const auto& t : test) {
        CHECK(table.at({t.id, RefRole::train, "rouge-l"}) == doctest::Approx(1.0));
    }
}

TEST_CASE("score requires the train split only for context-kind metrics") {
    testutil::TempDir dir;
    run_build(fixture_build(dir, NegMode::hard_neg, TransferVariant::transfer_pos));
    const auto test = load_test(dir.file("out/test.jsonl"));
    testutil::write_text(dir.file("pred.jsonl"), echo_train_predictions(test));

    ScoreOptions score;
    score.predictions_path = dir.file("pred.jsonl");
    score.test_path = dir.file("out/test.jsonl");
    score.metric_specs = {"density"};
    score.out_csv = dir.file("scores.csv");
    CHECK_THROWS_WITH_AS(run_score(score), doctest::Contains("train"), Error);
    CHECK(!std::filesystem::exists(dir.file("scores.csv")));

    score.metric_specs = {"rouge-1"};
    run_score(score);  // answers-kind works without the train split
    CHECK(std::filesystem::exists(dir.file("scores.csv")));

    score.metric_specs = {"rouge-1:contexts"};
    score.out_csv = dir.file("scores2.csv");
    CHECK_THROWS_AS(run_score(score), Error);  // kind override flips the requirement
    score.train_path = dir.file("out/train.jsonl");
    run_score(score);
    CHECK(std::filesystem::exists(dir.file("scores2.csv")));
}

TEST_CASE("score rejects unknown prediction ids") {
    testutil::TempDir dir;
    run_build(fixture_build(dir, NegMode::hard_neg, TransferVariant::transfer_pos));
    testutil::write_text(dir.file("pred.jsonl"), R"({"id":"ghost","answer":"hello"})"
                                                 "\n");
    ScoreOptions score;
    score.predictions_path = dir.file("pred.jsonl");
    score.test_path = dir.file("out/test.jsonl");
    score.metric_specs = {"rouge-1"};
    score.out_csv = dir.file("scores.csv");
    CHECK_THROWS_WITH_AS(run_score(score), doctest::Contains("ghost"), Error);
}

TEST_CASE("mfr report from a score table matches the in-process path") {
    testutil::TempDir dir;
    run_build(fixture_build(dir, NegMode::hard_neg, TransferVariant::transfer_pos));
    const auto test = load_test(dir.file("out/test.jsonl"));
    testutil::write_text(dir.file("pred.jsonl"), echo_train_predictions(test));

    ScoreOptions score;
    score.predictions_path = dir.file("pred.jsonl");
    score.test_path = dir.file("out/test.jsonl");
    score.metric_specs = {"rouge-l"};
    score.out_csv = dir.file("scores.csv");
    run_score(score);

    MfrOptions from_table;
    from_table.scores_path = dir.file("scores.csv");
    from_table.metric = "rouge-l";
    from_table.out_json = dir.file("mfr_table.json");
    run_mfr(from_table);

    MfrOptions in_process;
    in_process.predictions_path = dir.file("pred.jsonl");
    in_process.test_path = dir.file("out/test.jsonl");
    in_process.metric = "rouge-l";
    in_process.out_json = dir.file("mfr_direct.json");
    in_process.out_table = dir.file("mfr_direct.txt");
    run_mfr(in_process);

    const auto a = json::parse(testutil::slurp(dir.file("mfr_table.json")));
    const auto b = json::parse(testutil::slurp(dir.file("mfr_direct.json")));
    CHECK(a.at("records") == b.at("records"));
    CHECK(a.at("mfr") == b.at("mfr"));
    CHECK(a.at("n") == 19);
    CHECK(b.at("margin") == 1.25);

    // the table render exists and carries the display-scale footer
    const auto rendered = testutil::slurp(dir.file("mfr_direct.txt"));
    CHECK(rendered.find("metric=rouge-l margin=1.25 n=19") != std::string::npos);

    // every prediction echoes a train answer it shares nothing with test:
    // a full failure rate would need phi_test 0, so just sanity-check range
    CHECK(a.at("mfr").get<double>() > 0.0);
    CHECK(a.at("mfr").get<double>() <= 1.0);
}

TEST_CASE("mfr candidate filter keeps only train-memory echoes") {
    testutil::TempDir dir;
    run_build(fixture_build(dir, NegMode::hard_neg, TransferVariant::transfer_pos));
    const auto test = load_test(dir.file("out/test.jsonl"));

    // half echo a train answer, half produce unrelated text
    std::string predictions;
    std::size_t echoes = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        json record;
        record["id"] = test[i].id;
        if (i % 2 == 0) {
            record["answer"] = test[i].train_ref_answers.front();
            ++echoes;
        } else {
            record["answer"] = "wholly unrelated text with zero overlap tokens qqq www";
        }
        predictions += record.dump() + "\n";
    }
    testutil::write_text(dir.file("pred.jsonl"), predictions);

    MfrOptions options;
    options.predictions_path = dir.file("pred.jsonl");
    options.test_path = dir.file("out/test.jsonl");
    options.metric = "rouge-l";
    options.filter_candidates = true;
    options.out_json = dir.file("mfr.json");
    run_mfr(options);

    const auto report = json::parse(testutil::slurp(dir.file("mfr.json")));
    CHECK(report.at("filter").at("applied") == true);
    CHECK(report.at("n") == echoes);
    CHECK(report.at("filter").at("scored") == test.size());
    // survivors are exactly the echoing predictions
    std::set<std::string> expected_ids;
    for (std::size_t i = 0; i < test.size(); i += 2) expected_ids.insert(test[i].id);
    std::set<std::string> got_ids;
    for (const auto& row : report.at("records")) {
        got_ids.insert(row.at("id").get<std::string>());
    }
    CHECK(got_ids == expected_ids);
}

TEST_CASE("predictions copying train references score a full failure rate") {
    // small corpus whose paired answers overlap too little to clear the
    // margin, so every echoed train answer is a margin failure
    testutil::TempDir dir;
    std::string corpus;
    const char* topics[4] = {"solar", "river", "budget", "music"};
    int n = 0;
    for (const auto* topic : topics) {
        json a, b;
        a["id"] = "q" + std::to_string(n) + "a";
        a["question"] = std::string("should the city invest in ") + topic + " projects?";
        a["context"] = std::string(topic) + " projects bring long term value to town";
        a["answer"] = std::string("the ") + topic + " plan pays off over decades";
        b["id"] = "q" + std::to_string(n) + "b";
        b["question"] = a["question"];
        b["context"] = std::string(topic) + " spending crowds out urgent repairs";
        b["answer"] = std::string("skip the ") + topic + " plan, fix roads first";
        corpus += a.dump() + "\n" + b.dump() + "\n";
        ++n;
    }
    testutil::write_text(dir.file("mini.jsonl"), corpus);

    BuildOptions build;
    build.corpus_path = dir.file("mini.jsonl");
    build.out_dir = dir.file("out");
    build.mode = NegMode::hard_neg;
    run_build(build);

    const auto test = load_test(dir.file("out/test.jsonl"));
    REQUIRE(test.size() == 4);
    testutil::write_text(dir.file("pred.jsonl"), echo_train_predictions(test));

    MfrOptions options;
    options.predictions_path = dir.file("pred.jsonl");
    options.test_path = dir.file("out/test.jsonl");
    options.metric = "rouge-l";
    options.out_json = dir.file("mfr.json");
    run_mfr(options);
    const auto report = json::parse(testutil::slurp(dir.file("mfr.json")));
    CHECK(report.at("mfr").get<double>() == doctest::Approx(1.0));
    CHECK(report.at("n") == 4);
}

TEST_CASE("sweep and correlate emit well-formed outputs") {
    testutil::TempDir dir;
    run_build(fixture_build(dir, NegMode::hard_neg, TransferVariant::transfer_pos));
    const auto test = load_test(dir.file("out/test.jsonl"));
    testutil::write_text(dir.file("pred.jsonl"), echo_train_predictions(test));

    ScoreOptions score;
    score.predictions_path = dir.file("pred.jsonl");
    score.test_path = dir.file("out/test.jsonl");
    score.train_path = dir.file("out/train.jsonl");
    score.metric_specs = {"rouge-1", "rouge-l"};
    score.out_csv = dir.file("scores.csv");
    run_score(score);

    // labels: alternate by sorted id order
    std::istringstream table_in(testutil::slurp(dir.file("scores.csv")));
    const auto table = ScoreTable::from_csv(table_in, "scores.csv");
    std::string labels = "prediction_id,label\n";
    int i = 0;
    for (const auto& id : table.prediction_ids("rouge-l", RefRole::train)) {
        labels += id + "," + std::to_string(i++ % 2) + "\n";
    }
    testutil::write_text(dir.file("labels.csv"), labels);

    SweepOptions sweep;
    sweep.scores_path = dir.file("scores.csv");
    sweep.metric = "rouge-l";
    sweep.labels_path = dir.file("labels.csv");
    sweep.out_csv = dir.file("sweep.csv");
    sweep.out_json = dir.file("sweep.json");
    run_sweep(sweep);

    const auto csv = testutil::slurp(dir.file("sweep.csv"));
    std::size_t lines = 0;
    for (const char c : csv) lines += c == '\n';
    CHECK(lines == 102);  // header + 101 margins
    CHECK(csv.rfind("margin,r\n1,", 0) == 0);

    const auto summary = json::parse(testutil::slurp(dir.file("sweep.json")));
    CHECK(summary.at("n_points") == 101);
    CHECK(summary.at("n_predictions") == 19);

    CorrelateOptions correlate;
    correlate.scores_path = dir.file("scores.csv");
    correlate.labels_path = dir.file("labels.csv");
    correlate.out_csv = dir.file("matrix.csv");
    run_correlate(correlate);

    const auto matrix = testutil::slurp(dir.file("matrix.csv"));
    CHECK(matrix.rfind(",rouge-1,rouge-l,human\n", 0) == 0);
    lines = 0;
    for (const char c : matrix) lines += c == '\n';
    CHECK(lines == 4);
}

TEST_CASE("mfr rejects unknown metrics and missing table entries") {
    testutil::TempDir dir;
    MfrOptions options;
    options.predictions_path = dir.file("pred.jsonl");
    options.test_path = dir.file("test.jsonl");
    options.metric = "bert-score";  // not built-in, no score table given
    CHECK_THROWS_WITH_AS(run_mfr(options), doctest::Contains("unknown metric"), Error);

    // external metric present for one role only
    testutil::write_text(dir.file("scores.csv"),
                         "prediction_id,reference_role,metric_name,score\n"
                         "p1,train,bert-score,0.9\n");
    options = MfrOptions{};
    options.scores_path = dir.file("scores.csv");
    options.metric = "bert-score";
    options.out_json = dir.file("mfr.json");
    CHECK_THROWS_WITH_AS(run_mfr(options), doctest::Contains("missing score entry"), Error);
    CHECK(!std::filesystem::exists(dir.file("mfr.json")));

    options.metric = "nli-score";
    CHECK_THROWS_WITH_AS(run_mfr(options), doctest::Contains("no entries"), Error);
}

TEST_CASE("validate-scores summarizes a valid external table") {
    testutil::TempDir dir;
    testutil::write_text(dir.file("ext.csv"),
                         "prediction_id,reference_role,metric_name,score\n"
                         "p1,train,bert-score,0.9\n"
                         "p1,test,bert-score,0.5\n");
    std::ostringstream out;
    run_validate_scores(dir.file("ext.csv"), out);
    CHECK(out.str() == "ok: 2 entries, 1 metric(s) bert-score\n");

    testutil::write_text(dir.file("bad.csv"),
                         "prediction_id,reference_role,metric_name,score\n"
                         "p1,train,bert-score,1.9\n");
    std::ostringstream sink;
    CHECK_THROWS_AS(run_validate_scores(dir.file("bad.csv"), sink), Error);
}

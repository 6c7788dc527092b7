#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ctxeval {

/// One (question, positive context, negative contexts, answer) record.
/// The positive context never appears among the negatives.
struct QAExample {
    std::string id;
    std::string question;
    std::string positive_context;
    std::vector<std::string> negative_contexts;
    std::string answer;
};

/// Test-side record: the transferred positive context plus the answers of
/// the same-question training examples, which the margin test scores
/// predictions against.
struct TestExample : QAExample {
    std::vector<std::string> train_ref_answers;
};

/// All examples sharing one normalized question.
struct TransferGroup {
    std::string question_key;
    std::vector<QAExample> members;
};

struct BenchmarkSplit {
    std::vector<QAExample> train;
    std::vector<QAExample> dev;
    std::vector<TestExample> test;
};

struct Prediction {
    std::string id;
    std::string answer;
};

/// Raw corpus lines: {"id", "question", "context", "answer"}, every field
/// a nonempty string, ids unique. Malformed lines are rejected with their
/// line number.
std::vector<QAExample> read_corpus_jsonl(std::istream& in, const std::string& source_name);

/// Split files as written by the builder (negative_contexts populated,
/// test records additionally carrying train_ref_answers).
std::vector<QAExample> read_examples_jsonl(std::istream& in, const std::string& source_name);
std::vector<TestExample> read_test_jsonl(std::istream& in, const std::string& source_name);

/// Predictions: {"id", "answer"} per line, ids unique.
std::vector<Prediction> read_predictions_jsonl(std::istream& in, const std::string& source_name);

std::string to_jsonl(const std::vector<QAExample>& examples);
std::string to_jsonl(const std::vector<TestExample>& examples);

}  // namespace ctxeval

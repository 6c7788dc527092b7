#include "ctxeval/dataset.hpp"

#include <istream>
#include <unordered_set>

#include <json.hpp>

#include "ctxeval/error.hpp"

namespace ctxeval {

namespace {

using nlohmann::ordered_json;

// Applies `fn` to every nonempty line; errors are prefixed with
// "<source>:<line>:".
template <typename Fn>
void for_each_jsonl_record(std::istream& in, const std::string& source_name, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = source_name + ":" + std::to_string(line_no);
        ordered_json record = ordered_json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            throw Error(ErrorCode::parse_error, where + ": not a JSON object");
        }
        try {
            fn(record);
        } catch (const Error& e) {
            throw Error(e.code(), where + ": " + e.what());
        }
    }
}

std::string require_string(const ordered_json& record, const char* field, bool allow_empty) {
    auto it = record.find(field);
    if (it == record.end() || !it->is_string()) {
        throw Error(ErrorCode::parse_error, std::string("missing string field '") + field + "'");
    }
    std::string value = it->get<std::string>();
    if (!allow_empty && value.empty()) {
        throw Error(ErrorCode::parse_error, std::string("field '") + field + "' must be nonempty");
    }
    return value;
}

std::vector<std::string> require_string_array(const ordered_json& record, const char* field) {
    auto it = record.find(field);
    if (it == record.end() || !it->is_array()) {
        throw Error(ErrorCode::parse_error, std::string("missing array field '") + field + "'");
    }
    std::vector<std::string> values;
    values.reserve(it->size());
    for (const auto& item : *it) {
        if (!item.is_string()) {
            throw Error(ErrorCode::parse_error,
                        std::string("field '") + field + "' must contain only strings");
        }
        values.push_back(item.get<std::string>());
    }
    return values;
}

class UniqueIds {
public:
    void check(const std::string& id) {
        if (!seen_.insert(id).second) {
            throw Error(ErrorCode::parse_error, "duplicate id '" + id + "'");
        }
    }

private:
    std::unordered_set<std::string> seen_;
};

ordered_json example_json(const QAExample& e) {
    ordered_json record;
    record["id"] = e.id;
    record["question"] = e.question;
    record["positive_context"] = e.positive_context;
    record["negative_contexts"] = e.negative_contexts;
    record["answer"] = e.answer;
    return record;
}

}  // namespace

std::vector<QAExample> read_corpus_jsonl(std::istream& in, const std::string& source_name) {
    std::vector<QAExample> out;
    UniqueIds ids;
    for_each_jsonl_record(in, source_name, [&](const ordered_json& record) {
        QAExample e;
        e.id = require_string(record, "id", false);
        ids.check(e.id);
        e.question = require_string(record, "question", false);
        e.positive_context = require_string(record, "context", false);
        e.answer = require_string(record, "answer", false);
        out.push_back(std::move(e));
    });
    return out;
}

std::vector<QAExample> read_examples_jsonl(std::istream& in, const std::string& source_name) {
    std::vector<QAExample> out;
    UniqueIds ids;
    for_each_jsonl_record(in, source_name, [&](const ordered_json& record) {
        QAExample e;
        e.id = require_string(record, "id", false);
        ids.check(e.id);
        e.question = require_string(record, "question", false);
        e.positive_context = require_string(record, "positive_context", false);
        e.negative_contexts = require_string_array(record, "negative_contexts");
        e.answer = require_string(record, "answer", false);
        out.push_back(std::move(e));
    });
    return out;
}

std::vector<TestExample> read_test_jsonl(std::istream& in, const std::string& source_name) {
    std::vector<TestExample> out;
    UniqueIds ids;
    for_each_jsonl_record(in, source_name, [&](const ordered_json& record) {
        TestExample e;
        e.id = require_string(record, "id", false);
        ids.check(e.id);
        e.question = require_string(record, "question", false);
        e.positive_context = require_string(record, "positive_context", false);
        e.negative_contexts = require_string_array(record, "negative_contexts");
        e.answer = require_string(record, "answer", false);
        e.train_ref_answers = require_string_array(record, "train_ref_answers");
        if (e.train_ref_answers.empty()) {
            throw Error(ErrorCode::parse_error, "field 'train_ref_answers' must be nonempty");
        }
        out.push_back(std::move(e));
    });
    return out;
}

std::vector<Prediction> read_predictions_jsonl(std::istream& in, const std::string& source_name) {
    std::vector<Prediction> out;
    UniqueIds ids;
    for_each_jsonl_record(in, source_name, [&](const ordered_json& record) {
        Prediction p;
        p.id = require_string(record, "id", false);
        ids.check(p.id);
        p.answer = require_string(record, "answer", true);
        out.push_back(std::move(p));
    });
    return out;
}

std::string to_jsonl(const std::vector<QAExample>& examples) {
    std::string out;
    for (const auto& e : examples) {
        out += example_json(e).dump();
        out.push_back('\n');
    }
    return out;
}

std::string to_jsonl(const std::vector<TestExample>& examples) {
    std::string out;
    for (const auto& e : examples) {
        ordered_json record = example_json(e);
        record["train_ref_answers"] = e.train_ref_answers;
        out += record.dump();
        out.push_back('\n');
    }
    return out;
}

}  // namespace ctxeval

#include "ctxeval/score_table.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <set>

#include "ctxeval/error.hpp"
#include "ctxeval/io.hpp"

namespace ctxeval {

namespace {

std::string describe(const ScoreKey& key) {
    return "(" + key.prediction_id + ", " + std::string(to_string(key.role)) + ", " +
           key.metric + ")";
}

}  // namespace

std::string_view to_string(RefRole role) {
    return role == RefRole::train ? "train" : "test";
}

std::optional<RefRole> parse_ref_role(std::string_view text) {
    if (text == "train") return RefRole::train;
    if (text == "test") return RefRole::test;
    return std::nullopt;
}

void ScoreTable::insert(ScoreKey key, double score) {
    if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
        throw Error(ErrorCode::invalid_argument,
                    "score out of range [0,1] for " + describe(key) + ": " + fmt_double(score));
    }
    auto [it, inserted] = entries_.emplace(std::move(key), score);
    if (!inserted) {
        throw Error(ErrorCode::invalid_argument, "duplicate score entry for " + describe(it->first));
    }
}

std::optional<double> ScoreTable::find(const ScoreKey& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

double ScoreTable::at(const ScoreKey& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw Error(ErrorCode::not_found, "missing score entry for " + describe(key));
    }
    return it->second;
}

std::vector<std::string> ScoreTable::metric_names() const {
    std::set<std::string> names;
    for (const auto& [key, score] : entries_) names.insert(key.metric);
    return {names.begin(), names.end()};
}

std::vector<std::string> ScoreTable::prediction_ids(std::string_view metric, RefRole role) const {
    std::vector<std::string> ids;
    for (const auto& [key, score] : entries_) {
        if (key.metric == metric && key.role == role) ids.push_back(key.prediction_id);
    }
    return ids;  // already sorted: map is ordered by prediction_id first
}

ScoreTable ScoreTable::from_csv(std::istream& in, const std::string& source_name) {
    ScoreTable table;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!saw_header) {
            if (line != "prediction_id,reference_role,metric_name,score") {
                throw Error(ErrorCode::parse_error,
                            source_name + ":1: expected header "
                            "'prediction_id,reference_role,metric_name,score'");
            }
            saw_header = true;
            continue;
        }
        if (line.empty()) continue;
        const auto where = source_name + ":" + std::to_string(line_no);
        const auto fields = split_csv_line(line);
        if (fields.size() != 4) {
            throw Error(ErrorCode::parse_error,
                        where + ": expected 4 fields, got " + std::to_string(fields.size()));
        }
        const auto role = parse_ref_role(fields[1]);
        if (!role) {
            throw Error(ErrorCode::parse_error,
                        where + ": unknown reference_role '" + fields[1] + "'");
        }
        errno = 0;
        char* end = nullptr;
        const double score = std::strtod(fields[3].c_str(), &end);
        if (end == fields[3].c_str() || *end != '\0' || errno == ERANGE) {
            throw Error(ErrorCode::parse_error, where + ": malformed score '" + fields[3] + "'");
        }
        try {
            table.insert({fields[0], *role, fields[2]}, score);
        } catch (const Error& e) {
            throw Error(e.code(), where + ": " + e.what());
        }
    }
    if (!saw_header) {
        throw Error(ErrorCode::parse_error, source_name + ": empty score file");
    }
    return table;
}

void ScoreTable::write_csv(std::ostream& out) const {
    out << "prediction_id,reference_role,metric_name,score\n";
    for (const auto& [key, score] : entries_) {
        out << csv_field(key.prediction_id) << ',' << to_string(key.role) << ','
            << csv_field(key.metric) << ',' << fmt_double(score) << '\n';
    }
}

}  // namespace ctxeval

#include "ctxeval/meta_eval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>

#include "ctxeval/error.hpp"
#include "ctxeval/io.hpp"
#include "ctxeval/metrics.hpp"
#include "ctxeval/mfr.hpp"

namespace ctxeval {

namespace {

bool is_constant(const std::vector<double>& v) {
    for (const double x : v) {
        if (x != v.front()) return false;
    }
    return true;
}

std::string list_ids(const std::vector<std::string>& ids) {
    constexpr std::size_t kMax = 10;
    std::string out;
    for (std::size_t i = 0; i < ids.size() && i < kMax; ++i) {
        if (i > 0) out += ", ";
        out += ids[i];
    }
    if (ids.size() > kMax) {
        out += ", and " + std::to_string(ids.size() - kMax) + " more";
    }
    return out;
}

// Symmetric-difference check between a vector keyed by id and the label
// set; throws listing the offenders.
template <typename GetId, typename Seq>
void require_id_alignment(const Seq& seq, GetId get_id, const HumanLabelSet& labels,
                          const std::string& what) {
    std::set<std::string> seq_ids;
    for (const auto& item : seq) {
        if (!seq_ids.insert(get_id(item)).second) {
            throw Error(ErrorCode::invalid_argument,
                        what + ": duplicate prediction id '" + get_id(item) + "'");
        }
    }
    std::vector<std::string> unlabeled;
    for (const auto& id : seq_ids) {
        if (!labels.labels.count(id)) unlabeled.push_back(id);
    }
    std::vector<std::string> extra;
    for (const auto& [id, label] : labels.labels) {
        if (!seq_ids.count(id)) extra.push_back(id);
    }
    if (!unlabeled.empty() || !extra.empty()) {
        std::string message = what + ": id mismatch with labels";
        if (!unlabeled.empty()) message += "; missing labels for: " + list_ids(unlabeled);
        if (!extra.empty()) message += "; labels without entries: " + list_ids(extra);
        throw Error(ErrorCode::invalid_argument, message);
    }
}

std::optional<double> correlation_or_missing(const std::vector<double>& x,
                                             const std::vector<double>& y) {
    if (is_constant(x) || is_constant(y)) return std::nullopt;
    return pearson(x, y);
}

}  // namespace

double HumanLabelSet::positive_rate() const {
    if (labels.empty()) {
        throw Error(ErrorCode::invalid_argument, "positive_rate: empty label set");
    }
    double sum = 0.0;
    for (const auto& [id, label] : labels) sum += label;
    return sum / static_cast<double>(labels.size());
}

HumanLabelSet HumanLabelSet::from_csv(std::istream& in, const std::string& source_name) {
    HumanLabelSet set;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!saw_header) {
            if (line != "prediction_id,label") {
                throw Error(ErrorCode::parse_error,
                            source_name + ":1: expected header 'prediction_id,label'");
            }
            saw_header = true;
            continue;
        }
        if (line.empty()) continue;
        const std::string where = source_name + ":" + std::to_string(line_no);
        const auto fields = split_csv_line(line);
        if (fields.size() != 2) {
            throw Error(ErrorCode::parse_error,
                        where + ": expected 2 fields, got " + std::to_string(fields.size()));
        }
        int label = 0;
        if (fields[1] == "0") label = 0;
        else if (fields[1] == "1") label = 1;
        else throw Error(ErrorCode::parse_error, where + ": label must be 0 or 1, got '" + fields[1] + "'");
        if (!set.labels.emplace(fields[0], label).second) {
            throw Error(ErrorCode::parse_error, where + ": duplicate prediction id '" + fields[0] + "'");
        }
    }
    if (!saw_header) {
        throw Error(ErrorCode::parse_error, source_name + ": empty label file");
    }
    return set;
}

SweepResult margin_sweep(const std::vector<PhiPair>& phi_pairs, const HumanLabelSet& labels,
                         double m_min, double m_max, double step) {
    if (!(step > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "margin_sweep: step must be > 0");
    }
    if (m_min > m_max) {
        throw Error(ErrorCode::invalid_argument, "margin_sweep: m_min must be <= m_max");
    }
    if (m_min < 1.0) {
        throw Error(ErrorCode::invalid_argument, "margin_sweep: margins below 1.0 are not valid");
    }
    if (phi_pairs.size() < 2) {
        throw Error(ErrorCode::invalid_argument, "margin_sweep: need at least two predictions");
    }
    require_id_alignment(phi_pairs, [](const PhiPair& p) { return p.id; }, labels, "margin_sweep");

    std::vector<PhiPair> sorted = phi_pairs;
    std::sort(sorted.begin(), sorted.end(),
              [](const PhiPair& a, const PhiPair& b) { return a.id < b.id; });
    std::vector<double> label_vec;
    label_vec.reserve(sorted.size());
    for (const auto& pair : sorted) label_vec.push_back(labels.labels.at(pair.id));

    const auto n_steps = std::llround((m_max - m_min) / step);
    SweepResult result;
    result.points.reserve(static_cast<std::size_t>(n_steps) + 1);
    std::vector<double> flags(sorted.size());
    for (long long i = 0; i <= n_steps; ++i) {
        const double margin = m_min + static_cast<double>(i) * step;
        for (std::size_t j = 0; j < sorted.size(); ++j) {
            flags[j] = margin_failure(sorted[j].phi_train, sorted[j].phi_test, margin);
        }
        SweepPoint point;
        point.margin = margin;
        point.r = correlation_or_missing(flags, label_vec);
        if (point.r && (!result.best || *point.r > *result.best->r)) {
            result.best = point;
        }
        result.points.push_back(point);
    }
    return result;
}

CorrelationMatrix metric_correlation_matrix(const std::vector<NamedFlags>& mf_vectors,
                                            const HumanLabelSet& labels) {
    if (labels.labels.size() < 2) {
        throw Error(ErrorCode::invalid_argument,
                    "metric_correlation_matrix: need at least two labeled predictions");
    }
    std::set<std::string> seen_names;
    for (const auto& metric : mf_vectors) {
        if (metric.name == "human" || !seen_names.insert(metric.name).second) {
            throw Error(ErrorCode::invalid_argument,
                        "metric_correlation_matrix: metric name '" + metric.name +
                            "' is reserved or repeated");
        }
        std::vector<std::pair<std::string, int>> items(metric.flags.begin(), metric.flags.end());
        require_id_alignment(items, [](const auto& kv) { return kv.first; }, labels,
                             "metric_correlation_matrix: metric '" + metric.name + "'");
    }

    // Vectors aligned on the sorted id order of the label set; human
    // labels enter as the final row/column.
    std::vector<std::vector<double>> vectors;
    CorrelationMatrix matrix;
    for (const auto& metric : mf_vectors) {
        std::vector<double> v;
        v.reserve(labels.labels.size());
        for (const auto& [id, label] : labels.labels) v.push_back(metric.flags.at(id));
        vectors.push_back(std::move(v));
        matrix.names.push_back(metric.name);
    }
    {
        std::vector<double> v;
        v.reserve(labels.labels.size());
        for (const auto& [id, label] : labels.labels) v.push_back(label);
        vectors.push_back(std::move(v));
        matrix.names.push_back("human");
    }

    const std::size_t n = vectors.size();
    matrix.values.assign(n, std::vector<std::optional<double>>(n));
    for (std::size_t i = 0; i < n; ++i) {
        matrix.values[i][i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto r = correlation_or_missing(vectors[i], vectors[j]);
            matrix.values[i][j] = r;
            matrix.values[j][i] = r;
        }
    }
    return matrix;
}

}  // namespace ctxeval

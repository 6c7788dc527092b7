#include "ctxeval/mfr.hpp"

#include <cmath>

#include "ctxeval/error.hpp"
#include "ctxeval/io.hpp"

namespace ctxeval {

int margin_failure(double phi_train, double phi_test, double margin) {
    if (!std::isfinite(phi_train) || phi_train < 0.0) {
        throw Error(ErrorCode::invalid_argument,
                    "margin_failure: phi_train must be finite and non-negative, got " +
                        fmt_double(phi_train));
    }
    if (!std::isfinite(phi_test) || phi_test < 0.0) {
        throw Error(ErrorCode::invalid_argument,
                    "margin_failure: phi_test must be finite and non-negative, got " +
                        fmt_double(phi_test));
    }
    if (!std::isfinite(margin) || margin < 1.0) {
        throw Error(ErrorCode::invalid_argument,
                    "margin_failure: margin must be finite and >= 1, got " + fmt_double(margin));
    }
    return phi_train > margin * phi_test ? 1 : 0;
}

MFRecord compute_mf(const std::string& prediction_id, const std::string& prediction_text,
                    const ReferenceSet& train_refs, const ReferenceSet& test_refs,
                    const MetricFn& metric, double margin) {
    if (train_refs.role != RefRole::train || test_refs.role != RefRole::test) {
        throw Error(ErrorCode::invalid_argument, "compute_mf: reference roles are swapped");
    }
    const Tokens prediction = tokenize(prediction_text);
    auto max_phi = [&](const ReferenceSet& refs) {
        if (refs.texts.empty()) {
            throw Error(ErrorCode::invalid_argument,
                        "compute_mf: empty " + std::string(to_string(refs.role)) +
                            " reference set for prediction '" + prediction_id + "'");
        }
        std::vector<Tokens> tokenized;
        tokenized.reserve(refs.texts.size());
        for (const auto& text : refs.texts) tokenized.push_back(tokenize(text));
        return max_over_refs(metric, prediction, tokenized);
    };

    MFRecord record;
    record.prediction_id = prediction_id;
    record.phi_train = max_phi(train_refs);
    record.phi_test = max_phi(test_refs);
    record.margin = margin;
    record.flag = margin_failure(record.phi_train, record.phi_test, margin);
    return record;
}

MFRecord compute_mf_from_table(const ScoreTable& table, const std::string& prediction_id,
                               const std::string& metric_name, double margin) {
    MFRecord record;
    record.prediction_id = prediction_id;
    record.phi_train = table.at({prediction_id, RefRole::train, metric_name});
    record.phi_test = table.at({prediction_id, RefRole::test, metric_name});
    record.margin = margin;
    record.flag = margin_failure(record.phi_train, record.phi_test, margin);
    return record;
}

double compute_mfr(const std::vector<MFRecord>& records) {
    if (records.empty()) {
        throw Error(ErrorCode::invalid_argument, "compute_mfr: no records");
    }
    double sum = 0.0;
    for (const auto& record : records) sum += record.flag;
    return sum / static_cast<double>(records.size());
}

std::vector<std::string> filter_candidates(const std::vector<CandidatePrediction>& predictions,
                                           double threshold_display) {
    if (threshold_display < 0.0 || threshold_display > 100.0) {
        throw Error(ErrorCode::invalid_argument,
                    "filter_candidates: threshold must be in [0,100], got " +
                        fmt_double(threshold_display));
    }
    const double threshold = threshold_display / 100.0;
    const MetricFn rouge1 = builtin_metric("rouge-1");
    std::vector<std::string> kept;
    for (const auto& p : predictions) {
        if (p.train_refs.empty()) {
            throw Error(ErrorCode::invalid_argument,
                        "filter_candidates: empty train reference set for '" + p.id + "'");
        }
        const Tokens candidate = tokenize(p.text);
        std::vector<Tokens> refs;
        refs.reserve(p.train_refs.size());
        for (const auto& text : p.train_refs) refs.push_back(tokenize(text));
        if (max_over_refs(rouge1, candidate, refs) > threshold) {
            kept.push_back(p.id);
        }
    }
    return kept;
}

}  // namespace ctxeval

#pragma once

#include <string>
#include <vector>

#include "ctxeval/metrics.hpp"
#include "ctxeval/score_table.hpp"
#include "ctxeval/text.hpp"

namespace ctxeval {

/// One prediction's margin grounding-failure evaluation.
struct MFRecord {
    std::string prediction_id;
    double phi_train = 0.0;
    double phi_test = 0.0;
    double margin = 1.0;
    int flag = 0;  // 1 iff phi_train > margin * phi_test
};

/// References for one role: either golden answers or contextual passages.
struct ReferenceSet {
    RefRole role = RefRole::train;
    MetricKind kind = MetricKind::answers;
    std::vector<std::string> texts;
};

/// 1 if phi_train > margin * phi_test, else 0. Equality sits on the
/// no-failure side. Inputs must be finite and non-negative, margin >= 1.
int margin_failure(double phi_train, double phi_test, double margin);

/// Scores the prediction against both reference sets (maximum over each
/// set) and applies the margin test.
MFRecord compute_mf(const std::string& prediction_id, const std::string& prediction_text,
                    const ReferenceSet& train_refs, const ReferenceSet& test_refs,
                    const MetricFn& metric, double margin);

/// Like compute_mf, but reads both phi values from a score table. Missing
/// entries are an error, never a silent zero.
MFRecord compute_mf_from_table(const ScoreTable& table, const std::string& prediction_id,
                               const std::string& metric_name, double margin);

/// Mean of the flags. Rejects an empty record list.
double compute_mfr(const std::vector<MFRecord>& records);

struct CandidatePrediction {
    std::string id;
    std::string text;
    std::vector<std::string> train_refs;
};

/// Ids whose best ROUGE-1 F1 against their training references exceeds the
/// threshold on the 0-100 display scale (strictly). Only these predictions
/// are plausible training-memory echoes worth labeling.
std::vector<std::string> filter_candidates(const std::vector<CandidatePrediction>& predictions,
                                           double threshold_display = 40.0);

}  // namespace ctxeval

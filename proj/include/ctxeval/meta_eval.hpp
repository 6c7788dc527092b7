#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ctxeval {

/// Binary human judgments keyed by prediction id (1 = memory
/// hallucination).
struct HumanLabelSet {
    std::map<std::string, int> labels;

    /// Mean label; rejects an empty set.
    double positive_rate() const;

    /// Parses `prediction_id,label` rows, label in {0,1}, ids unique.
    static HumanLabelSet from_csv(std::istream& in, const std::string& source_name);
};

struct PhiPair {
    std::string id;
    double phi_train = 0.0;
    double phi_test = 0.0;
};

struct SweepPoint {
    double margin = 0.0;
    /// Pearson r between the margin's flags and the human labels;
    /// missing when either vector is constant at this margin.
    std::optional<double> r;
};

struct SweepResult {
    std::vector<SweepPoint> points;  // margins strictly increasing
    /// Defined point maximizing r, ties broken by the smallest margin;
    /// absent when every point is undefined.
    std::optional<SweepPoint> best;
};

/// Evaluates the margin grid m_min + i*step (round((m_max-m_min)/step)+1
/// points, computed from integer indices so 101 steps cannot drift) and
/// correlates each margin's failure flags with the labels. The phi-pair
/// ids and the label ids must coincide exactly.
SweepResult margin_sweep(const std::vector<PhiPair>& phi_pairs, const HumanLabelSet& labels,
                         double m_min = 1.0, double m_max = 2.0, double step = 0.01);

/// Binary flag vector for one metric, keyed by prediction id.
struct NamedFlags {
    std::string name;
    std::map<std::string, int> flags;
};

/// Pairwise Pearson matrix over the metric flag vectors plus the human
/// labels (appended last under the name "human"). Unit diagonal; undefined
/// cells (zero variance) are missing.
struct CorrelationMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<std::optional<double>>> values;
};

CorrelationMatrix metric_correlation_matrix(const std::vector<NamedFlags>& mf_vectors,
                                            const HumanLabelSet& labels);

}  // namespace ctxeval

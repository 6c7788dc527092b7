#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "ctxeval/text.hpp"

namespace ctxeval {

struct MetricScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Clipped n-gram overlap: precision against the candidate's n-gram count,
/// recall against the reference's. 0/0 counts yield zero components.
MetricScore rouge_n(const Tokens& candidate, const Tokens& reference, int n);

/// Longest-common-subsequence F-measure.
MetricScore rouge_l(const Tokens& candidate, const Tokens& reference);

/// Average squared length of the greedy extractive fragment decomposition
/// of the candidate against the source, normalized by candidate length.
/// Unbounded above by the candidate length; 0 for an empty candidate.
double density(const Tokens& candidate, const Tokens& source);

/// A scalar similarity on the shared [0,1] scale (ROUGE F1, or density
/// rescaled by candidate length).
using MetricFn = std::function<double(const Tokens& candidate, const Tokens& reference)>;

/// Maximum metric value over a nonempty reference list.
double max_over_refs(const MetricFn& metric, const Tokens& candidate,
                     const std::vector<Tokens>& references);

/// Sample Pearson correlation coefficient, clamped into [-1, 1].
/// Rejects mismatched lengths, fewer than two points, non-finite values,
/// and zero variance (an undefined correlation).
double pearson(std::span<const double> x, std::span<const double> y);

/// Whether the reference side of a metric is drawn from golden answers or
/// from contextual passages.
enum class MetricKind { answers, contexts };

bool is_builtin_metric(std::string_view name);

/// Default reference kind: answers for the ROUGE metrics, contexts for
/// density.
MetricKind builtin_metric_default_kind(std::string_view name);

/// The [0,1]-scaled scorer for "rouge-1", "rouge-l" or "density".
/// Unknown names are rejected.
MetricFn builtin_metric(std::string_view name);

}  // namespace ctxeval

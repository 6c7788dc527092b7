#include "ctxeval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctxeval/error.hpp"

namespace ctxeval {

namespace {

double f_measure(double precision, double recall) {
    const double denom = precision + recall;
    return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

}  // namespace

MetricScore rouge_n(const Tokens& candidate, const Tokens& reference, int n) {
    if (n < 1) throw Error(ErrorCode::invalid_argument, "rouge_n: n must be >= 1");
    const auto cand_counts = ngram_counts(candidate, n);
    const auto ref_counts = ngram_counts(reference, n);

    long long cand_total = 0;
    for (const auto& [gram, count] : cand_counts) cand_total += count;
    long long ref_total = 0;
    for (const auto& [gram, count] : ref_counts) ref_total += count;

    long long overlap = 0;
    const auto& smaller = cand_counts.size() <= ref_counts.size() ? cand_counts : ref_counts;
    const auto& larger = cand_counts.size() <= ref_counts.size() ? ref_counts : cand_counts;
    for (const auto& [gram, count] : smaller) {
        auto it = larger.find(gram);
        if (it != larger.end()) overlap += std::min(count, it->second);
    }

    MetricScore score;
    score.precision = cand_total > 0 ? static_cast<double>(overlap) / static_cast<double>(cand_total) : 0.0;
    score.recall = ref_total > 0 ? static_cast<double>(overlap) / static_cast<double>(ref_total) : 0.0;
    score.f1 = f_measure(score.precision, score.recall);
    return score;
}

MetricScore rouge_l(const Tokens& candidate, const Tokens& reference) {
    MetricScore score;
    if (candidate.empty() || reference.empty()) return score;
    const double lcs = static_cast<double>(lcs_length(candidate, reference));
    score.precision = lcs / static_cast<double>(candidate.size());
    score.recall = lcs / static_cast<double>(reference.size());
    score.f1 = f_measure(score.precision, score.recall);
    return score;
}

double density(const Tokens& candidate, const Tokens& source) {
    if (candidate.empty()) return 0.0;
    double sum_sq = 0.0;
    std::size_t i = 0;
    while (i < candidate.size()) {
        // Longest contiguous match starting here; strict > keeps the
        // earliest source position on ties.
        std::size_t best = 0;
        for (std::size_t j = 0; j < source.size(); ++j) {
            if (source[j] != candidate[i]) continue;
            std::size_t len = 1;
            while (i + len < candidate.size() && j + len < source.size() &&
                   candidate[i + len] == source[j + len]) {
                ++len;
            }
            if (len > best) best = len;
        }
        if (best == 0) {
            ++i;
        } else {
            sum_sq += static_cast<double>(best) * static_cast<double>(best);
            i += best;
        }
    }
    return sum_sq / static_cast<double>(candidate.size());
}

double max_over_refs(const MetricFn& metric, const Tokens& candidate,
                     const std::vector<Tokens>& references) {
    if (references.empty()) {
        throw Error(ErrorCode::invalid_argument, "max_over_refs: empty reference list");
    }
    double best = metric(candidate, references.front());
    for (std::size_t i = 1; i < references.size(); ++i) {
        best = std::max(best, metric(candidate, references[i]));
    }
    return best;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw Error(ErrorCode::invalid_argument, "pearson: length mismatch (" +
                                                     std::to_string(x.size()) + " vs " +
                                                     std::to_string(y.size()) + ")");
    }
    if (x.size() < 2) {
        throw Error(ErrorCode::invalid_argument, "pearson: need at least two points");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            throw Error(ErrorCode::invalid_argument, "pearson: non-finite value at index " +
                                                         std::to_string(i));
        }
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw Error(ErrorCode::domain_error, "pearson: undefined correlation (zero variance)");
    }
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

bool is_builtin_metric(std::string_view name) {
    return name == "rouge-1" || name == "rouge-l" || name == "density";
}

MetricKind builtin_metric_default_kind(std::string_view name) {
    if (name == "density") return MetricKind::contexts;
    if (is_builtin_metric(name)) return MetricKind::answers;
    throw Error(ErrorCode::not_found, "unknown metric: " + std::string(name));
}

MetricFn builtin_metric(std::string_view name) {
    if (name == "rouge-1") {
        return [](const Tokens& c, const Tokens& r) { return rouge_n(c, r, 1).f1; };
    }
    if (name == "rouge-l") {
        return [](const Tokens& c, const Tokens& r) { return rouge_l(c, r).f1; };
    }
    if (name == "density") {
        // Rescaled by candidate length so the value fits the [0,1] score
        // scale; the margin test is unchanged because both reference roles
        // score the same candidate.
        return [](const Tokens& c, const Tokens& r) {
            return c.empty() ? 0.0 : density(c, r) / static_cast<double>(c.size());
        };
    }
    throw Error(ErrorCode::not_found, "unknown metric: " + std::string(name));
}

}  // namespace ctxeval

#pragma once

#include <compare>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctxeval {

/// Which split a reference set was taken from.
enum class RefRole { train, test };

std::string_view to_string(RefRole role);
std::optional<RefRole> parse_ref_role(std::string_view text);

struct ScoreKey {
    std::string prediction_id;
    RefRole role;
    std::string metric;

    auto operator<=>(const ScoreKey&) const = default;
};

/// Immutable-after-construction mapping (prediction, reference role,
/// metric) -> score in [0,1]. Built-in metric runs and externally computed
/// metrics (e.g. neural scorers) share this one carrier.
class ScoreTable {
public:
    /// Rejects duplicate keys and scores outside [0,1] or non-finite.
    void insert(ScoreKey key, double score);

    std::optional<double> find(const ScoreKey& key) const;

    /// Like find(), but a missing entry is an error naming the key.
    double at(const ScoreKey& key) const;

    std::size_t size() const { return entries_.size(); }
    const std::map<ScoreKey, double>& entries() const { return entries_; }

    /// Sorted unique metric names present in the table.
    std::vector<std::string> metric_names() const;

    /// Sorted prediction ids holding a given (metric, role) entry.
    std::vector<std::string> prediction_ids(std::string_view metric, RefRole role) const;

    /// Parses the external score format: header
    /// `prediction_id,reference_role,metric_name,score`, one entry per row.
    static ScoreTable from_csv(std::istream& in, const std::string& source_name);

    void write_csv(std::ostream& out) const;

private:
    std::map<ScoreKey, double> entries_;
};

}  // namespace ctxeval

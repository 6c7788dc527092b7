#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ctxeval {

/// Ordered list of lowercase word tokens. Produced by tokenize(); tokens
/// are never empty and never contain whitespace.
using Tokens = std::vector<std::string>;

/// Lowercases ASCII letters, collapses Unicode whitespace runs to a single
/// space, strips leading/trailing whitespace, and replaces every maximal
/// run of ASCII digits with the single character "#".
std::string normalize(std::string_view text);

/// normalize() followed by whitespace splitting. Punctuation characters
/// other than "#" are split off as their own tokens and then dropped,
/// except apostrophes and hyphens sitting between word characters
/// ("it's", "under-report"), which stay inside their token.
Tokens tokenize(std::string_view text);

/// Tokens joined with single spaces.
std::string join(const Tokens& tokens);

/// Character-level (Unicode codepoint) edit distance: minimum number of
/// single-character insertions, deletions and substitutions.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// True iff levenshtein(a, b) <= limit. Banded DP, O(limit * min-length)
/// time, so pairwise dedup scans stay affordable on large corpora.
bool levenshtein_at_most(std::string_view a, std::string_view b, std::size_t limit);

/// All contiguous n-token windows with multiplicities, keyed by the window
/// tokens joined with single spaces. Empty when n exceeds the sequence
/// length. n < 1 is rejected.
std::unordered_map<std::string, int> ngram_counts(const Tokens& seq, int n);

/// Length of the longest common (not necessarily contiguous) subsequence.
std::size_t lcs_length(const Tokens& a, const Tokens& b);

}  // namespace ctxeval

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ctxeval/bm25.hpp"
#include "ctxeval/dataset.hpp"

namespace ctxeval {

/// How negative contexts are attached to an example.
enum class NegMode { none_neg, hard_neg, rand_neg };

/// How the test side transfers contexts: swap only the positive context,
/// or additionally replace the negatives with fresh random draws.
enum class TransferVariant { transfer_pos, transfer_all };

std::string_view to_string(NegMode mode);
std::string_view to_string(TransferVariant variant);
std::optional<NegMode> parse_neg_mode(std::string_view text);
std::optional<TransferVariant> parse_transfer_variant(std::string_view text);

/// Key under which near-duplicates are detected:
/// normalize(question) + "\t" + normalize(answer).
std::string dedup_key(const QAExample& example);

/// Greedy first-kept-wins scan in input order: an example is dropped iff
/// its key is within edit distance < threshold of any already-kept key.
std::vector<QAExample> dedup(const std::vector<QAExample>& examples, int threshold = 4);

/// Partition by normalized question, groups ordered by first appearance.
std::vector<TransferGroup> group_by_question(const std::vector<QAExample>& examples);

/// The member whose answer has the largest mean character-level edit
/// distance to the other members' answers (normalized strings); ties go
/// to the ascending id. Rejects singleton groups.
const QAExample& select_dev(const TransferGroup& group);

/// BM25 index over every example's positive context, doc id = example id.
Bm25Index build_context_index(const std::vector<QAExample>& examples,
                              Bm25Params params = Bm25Params());

/// Populates negative_contexts. `exclude` must hold the example's own id
/// plus the ids of every same-question example, so a negative can never be
/// a valid positive for the question. Rejects pools smaller than n_neg.
QAExample assemble_contexts(const QAExample& example, NegMode mode, int n_neg,
                            const Bm25Index& index, std::uint64_t seed,
                            const std::unordered_set<std::string>& exclude);

/// Builds train/dev/test from the grouped corpus. Each multi-member group
/// contributes its most distinctive answer to dev; that member also acts
/// as the transfer member supplying the test example's new positive
/// context and reference answer, while the remaining members stay in
/// train. Singleton groups are train-only and reported via `notices`.
/// Output splits are sorted by example id.
BenchmarkSplit build_transfer_test(const std::vector<TransferGroup>& groups,
                                   TransferVariant variant, NegMode mode, int n_neg,
                                   const Bm25Index& index, std::uint64_t seed,
                                   std::vector<std::string>* notices = nullptr);

}  // namespace ctxeval

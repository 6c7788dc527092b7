#include "ctxeval/benchmark.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <random>

#include "ctxeval/error.hpp"
#include "ctxeval/io.hpp"
#include "ctxeval/text.hpp"

namespace ctxeval {

namespace {

constexpr std::uint64_t kAssembleDomain = 0x61;
constexpr std::uint64_t kTransferDomain = 0x74;

// Stream seed from (run seed, example id, purpose tag); splitmix64
// finalizer so nearby seeds do not produce correlated streams.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view id, std::uint64_t domain) {
    std::uint64_t z = fnv1a64(id) ^ (seed * 0x9E3779B97F4A7C15ULL) ^ (domain * 0xBF58476D1CE4E5B9ULL);
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

// mt19937_64 with hand-rolled rejection sampling; std::uniform_int_distribution
// is implementation-defined, which would break byte-identical builds across
// toolchains.
class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t r = (max % n + 1) % n;  // 2^64 mod n
        if (r == 0) return engine_() % n;
        const std::uint64_t cutoff = max - r;
        std::uint64_t v = engine_();
        while (v > cutoff) v = engine_();
        return v % n;
    }

private:
    std::mt19937_64 engine_;
};

std::vector<std::string> sample_without_replacement(std::vector<std::string> pool,
                                                    std::size_t n, DetRng& rng) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    return out;
}

std::vector<std::string> eligible_pool(const Bm25Index& index,
                                       const std::unordered_set<std::string>& exclude) {
    std::vector<std::string> pool = index.doc_ids_sorted();
    pool.erase(std::remove_if(pool.begin(), pool.end(),
                              [&](const std::string& id) { return exclude.count(id) > 0; }),
               pool.end());
    return pool;
}

// Extends the excluded id set with every document whose text duplicates an
// excluded document's text; an excluded passage must not reenter the
// negative pool under a different id.
std::unordered_set<std::string> close_under_text_duplicates(
    const Bm25Index& index, std::unordered_set<std::string> exclude) {
    std::unordered_set<std::string> texts;
    for (const auto& id : exclude) {
        if (index.has_doc(id)) texts.insert(index.doc_text(id));
    }
    for (const auto& id : index.doc_ids_sorted()) {
        if (!exclude.count(id) && texts.count(index.doc_text(id))) exclude.insert(id);
    }
    return exclude;
}

std::vector<std::string> random_negative_ids(const Bm25Index& index,
                                             const std::unordered_set<std::string>& exclude,
                                             int n_neg, DetRng& rng,
                                             const std::string& owner_id) {
    std::vector<std::string> pool = eligible_pool(index, exclude);
    if (pool.size() < static_cast<std::size_t>(n_neg)) {
        throw Error(ErrorCode::invalid_argument,
                    "negative pool too small for example '" + owner_id + "': " +
                        std::to_string(pool.size()) + " eligible, " + std::to_string(n_neg) +
                        " requested");
    }
    return sample_without_replacement(std::move(pool), static_cast<std::size_t>(n_neg), rng);
}

}  // namespace

std::string_view to_string(NegMode mode) {
    switch (mode) {
        case NegMode::none_neg: return "none-neg";
        case NegMode::hard_neg: return "hard-neg";
        case NegMode::rand_neg: return "rand-neg";
    }
    return "";
}

std::string_view to_string(TransferVariant variant) {
    return variant == TransferVariant::transfer_pos ? "transfer-pos" : "transfer-all";
}

std::optional<NegMode> parse_neg_mode(std::string_view text) {
    if (text == "none-neg") return NegMode::none_neg;
    if (text == "hard-neg") return NegMode::hard_neg;
    if (text == "rand-neg") return NegMode::rand_neg;
    return std::nullopt;
}

std::optional<TransferVariant> parse_transfer_variant(std::string_view text) {
    if (text == "transfer-pos") return TransferVariant::transfer_pos;
    if (text == "transfer-all") return TransferVariant::transfer_all;
    return std::nullopt;
}

std::string dedup_key(const QAExample& example) {
    return normalize(example.question) + "\t" + normalize(example.answer);
}

std::vector<QAExample> dedup(const std::vector<QAExample>& examples, int threshold) {
    if (threshold < 1) {
        throw Error(ErrorCode::invalid_argument, "dedup: threshold must be a positive integer");
    }
    const std::size_t limit = static_cast<std::size_t>(threshold) - 1;  // drop iff distance < threshold
    std::vector<QAExample> kept;
    std::vector<std::string> kept_keys;
    for (const auto& example : examples) {
        const std::string key = dedup_key(example);
        bool duplicate = false;
        for (const auto& kept_key : kept_keys) {
            if (levenshtein_at_most(key, kept_key, limit)) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) {
            kept.push_back(example);
            kept_keys.push_back(key);
        }
    }
    return kept;
}

std::vector<TransferGroup> group_by_question(const std::vector<QAExample>& examples) {
    std::vector<TransferGroup> groups;
    std::map<std::string, std::size_t> index_by_key;
    for (const auto& example : examples) {
        std::string key = normalize(example.question);
        auto it = index_by_key.find(key);
        if (it == index_by_key.end()) {
            index_by_key.emplace(key, groups.size());
            groups.push_back({std::move(key), {example}});
        } else {
            groups[it->second].members.push_back(example);
        }
    }
    return groups;
}

const QAExample& select_dev(const TransferGroup& group) {
    if (group.members.size() < 2) {
        throw Error(ErrorCode::invalid_argument,
                    "select_dev: group '" + group.question_key +
                        "' has a single member; no transfer possible");
    }
    std::vector<std::string> answers;
    answers.reserve(group.members.size());
    for (const auto& m : group.members) answers.push_back(normalize(m.answer));

    const QAExample* best = nullptr;
    std::size_t best_total = 0;
    for (std::size_t i = 0; i < group.members.size(); ++i) {
        std::size_t total = 0;
        for (std::size_t j = 0; j < group.members.size(); ++j) {
            if (j != i) total += levenshtein(answers[i], answers[j]);
        }
        // Mean distance maximization; the member count is constant, so the
        // total orders identically and stays exact.
        if (best == nullptr || total > best_total ||
            (total == best_total && group.members[i].id < best->id)) {
            best = &group.members[i];
            best_total = total;
        }
    }
    return *best;
}

Bm25Index build_context_index(const std::vector<QAExample>& examples, Bm25Params params) {
    std::vector<std::pair<std::string, std::string>> corpus;
    corpus.reserve(examples.size());
    for (const auto& e : examples) corpus.emplace_back(e.id, e.positive_context);
    return Bm25Index::build(corpus, params);
}

QAExample assemble_contexts(const QAExample& example, NegMode mode, int n_neg,
                            const Bm25Index& index, std::uint64_t seed,
                            const std::unordered_set<std::string>& exclude) {
    if (n_neg < 0) throw Error(ErrorCode::invalid_argument, "assemble_contexts: n_neg must be >= 0");
    QAExample out = example;
    out.negative_contexts.clear();
    if (mode == NegMode::none_neg || n_neg == 0) return out;

    std::unordered_set<std::string> excluded = exclude;
    excluded.insert(out.id);
    excluded = close_under_text_duplicates(index, std::move(excluded));

    std::vector<std::string> negative_ids;
    if (mode == NegMode::hard_neg) {
        negative_ids = index.top_k(tokenize(out.question), static_cast<std::size_t>(n_neg), excluded);
        if (negative_ids.size() < static_cast<std::size_t>(n_neg)) {
            throw Error(ErrorCode::invalid_argument,
                        "negative pool too small for example '" + out.id + "': " +
                            std::to_string(negative_ids.size()) + " eligible, " +
                            std::to_string(n_neg) + " requested");
        }
    } else {
        DetRng rng(derive_seed(seed, out.id, kAssembleDomain));
        negative_ids = random_negative_ids(index, excluded, n_neg, rng, out.id);
    }
    out.negative_contexts.reserve(negative_ids.size());
    for (const auto& id : negative_ids) out.negative_contexts.push_back(index.doc_text(id));
    return out;
}

BenchmarkSplit build_transfer_test(const std::vector<TransferGroup>& groups,
                                   TransferVariant variant, NegMode mode, int n_neg,
                                   const Bm25Index& index, std::uint64_t seed,
                                   std::vector<std::string>* notices) {
    BenchmarkSplit split;
    auto note = [&](std::string message) {
        if (notices) notices->push_back(std::move(message));
    };

    for (const auto& group : groups) {
        std::unordered_set<std::string> group_ids;
        for (const auto& m : group.members) group_ids.insert(m.id);

        if (group.members.size() < 2) {
            split.train.push_back(
                assemble_contexts(group.members.front(), mode, n_neg, index, seed, group_ids));
            note("group '" + group.question_key + "': single member, kept train-only");
            continue;
        }

        const QAExample& transfer = select_dev(group);
        std::vector<const QAExample*> train_members;
        for (const auto& m : group.members) {
            if (m.id != transfer.id) train_members.push_back(&m);
        }

        std::vector<QAExample> assembled;
        assembled.reserve(train_members.size());
        for (const QAExample* m : train_members) {
            assembled.push_back(assemble_contexts(*m, mode, n_neg, index, seed, group_ids));
        }
        split.dev.push_back(assemble_contexts(transfer, mode, n_neg, index, seed, group_ids));

        // The transferred positive context must actually be new for the
        // question; otherwise the group cannot appear in test.
        const std::string transfer_ctx = normalize(transfer.positive_context);
        bool context_clash = false;
        for (const QAExample* m : train_members) {
            if (normalize(m->positive_context) == transfer_ctx) {
                context_clash = true;
                break;
            }
        }

        if (!context_clash) {
            const QAExample& anchor = assembled.front();
            TestExample test;
            test.id = transfer.id;
            test.question = anchor.question;
            test.positive_context = transfer.positive_context;
            test.answer = transfer.answer;
            for (const QAExample* m : train_members) test.train_ref_answers.push_back(m->answer);
            if (variant == TransferVariant::transfer_pos) {
                test.negative_contexts = anchor.negative_contexts;
            } else if (mode != NegMode::none_neg && n_neg > 0) {
                DetRng rng(derive_seed(seed, test.id, kTransferDomain));
                const auto excluded = close_under_text_duplicates(index, group_ids);
                for (const auto& id : random_negative_ids(index, excluded, n_neg, rng, test.id)) {
                    test.negative_contexts.push_back(index.doc_text(id));
                }
            }
            split.test.push_back(std::move(test));
        } else {
            note("group '" + group.question_key +
                 "': transfer context equals a train context, skipped from test");
        }

        for (auto& m : assembled) split.train.push_back(std::move(m));
    }

    auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
    std::sort(split.train.begin(), split.train.end(), by_id);
    std::sort(split.dev.begin(), split.dev.end(), by_id);
    std::sort(split.test.begin(), split.test.end(), by_id);
    return split;
}

}  // namespace ctxeval

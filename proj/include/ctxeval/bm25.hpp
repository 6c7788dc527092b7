#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ctxeval/text.hpp"

namespace ctxeval {

/// Okapi BM25 index over a passage corpus. Construction is single-shot;
/// the built index is immutable and safe to query from many threads.
struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

class Bm25Index {
public:
    /// Rejects an empty corpus and duplicate doc ids. Documents are
    /// tokenized with the shared tokenizer.
    static Bm25Index build(const std::vector<std::pair<std::string, std::string>>& corpus,
                           Bm25Params params = Bm25Params());

    /// Sum over unique query terms of
    ///   idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len / avglen))
    /// with idf(t) = ln((N - df + 0.5) / (df + 0.5) + 1), never negative.
    /// Terms absent from the corpus contribute 0. Unknown doc ids are
    /// rejected.
    double score(const Tokens& query, const std::string& doc_id) const;

    /// The k highest-scoring documents not in `exclude`, descending by
    /// score with ties broken by ascending doc id. Returns fewer than k
    /// only when the eligible pool is smaller.
    std::vector<std::string> top_k(const Tokens& query, std::size_t k,
                                   const std::unordered_set<std::string>& exclude = {}) const;

    std::size_t size() const { return docs_.size(); }
    double average_document_length() const { return avgdl_; }
    const Bm25Params& params() const { return params_; }
    bool has_doc(const std::string& doc_id) const { return id_to_pos_.count(doc_id) > 0; }

    /// Document frequency of a term (0 when absent from the corpus).
    int doc_frequency(const std::string& term) const;

    /// Original (untokenized) text of a document.
    const std::string& doc_text(const std::string& doc_id) const;

    /// All doc ids in ascending order.
    std::vector<std::string> doc_ids_sorted() const;

private:
    struct Doc {
        std::string id;
        std::string text;
        std::size_t length = 0;  // token count
        std::unordered_map<std::string, int> term_freq;
    };

    double score_doc(const std::vector<std::string>& unique_terms, const Doc& doc) const;
    const Doc& doc_at(const std::string& doc_id) const;

    std::vector<Doc> docs_;
    std::unordered_map<std::string, std::size_t> id_to_pos_;
    std::unordered_map<std::string, int> doc_freq_;
    double avgdl_ = 0.0;
    Bm25Params params_;
};

}  // namespace ctxeval

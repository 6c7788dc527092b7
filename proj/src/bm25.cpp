#include "ctxeval/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ctxeval/error.hpp"

namespace ctxeval {

Bm25Index Bm25Index::build(const std::vector<std::pair<std::string, std::string>>& corpus,
                           Bm25Params params) {
    if (corpus.empty()) {
        throw Error(ErrorCode::invalid_argument, "bm25: empty corpus");
    }
    if (!(params.k1 > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "bm25: k1 must be > 0");
    }
    if (params.b < 0.0 || params.b > 1.0) {
        throw Error(ErrorCode::invalid_argument, "bm25: b must be in [0,1]");
    }

    Bm25Index index;
    index.params_ = params;
    index.docs_.reserve(corpus.size());
    std::size_t total_len = 0;
    for (const auto& [id, text] : corpus) {
        if (index.id_to_pos_.count(id)) {
            throw Error(ErrorCode::invalid_argument, "bm25: duplicate doc id '" + id + "'");
        }
        Doc doc;
        doc.id = id;
        doc.text = text;
        Tokens tokens = tokenize(text);
        doc.length = tokens.size();
        for (auto& token : tokens) {
            ++doc.term_freq[std::move(token)];
        }
        total_len += doc.length;
        index.id_to_pos_.emplace(id, index.docs_.size());
        index.docs_.push_back(std::move(doc));
    }
    for (const auto& doc : index.docs_) {
        for (const auto& [term, tf] : doc.term_freq) {
            ++index.doc_freq_[term];
        }
    }
    index.avgdl_ = static_cast<double>(total_len) / static_cast<double>(index.docs_.size());
    return index;
}

const Bm25Index::Doc& Bm25Index::doc_at(const std::string& doc_id) const {
    auto it = id_to_pos_.find(doc_id);
    if (it == id_to_pos_.end()) {
        throw Error(ErrorCode::not_found, "bm25: unknown doc id '" + doc_id + "'");
    }
    return docs_[it->second];
}

double Bm25Index::score_doc(const std::vector<std::string>& unique_terms, const Doc& doc) const {
    const double n_docs = static_cast<double>(docs_.size());
    double total = 0.0;
    for (const auto& term : unique_terms) {
        auto tf_it = doc.term_freq.find(term);
        if (tf_it == doc.term_freq.end()) continue;
        auto df_it = doc_freq_.find(term);
        if (df_it == doc_freq_.end()) continue;
        const double df = static_cast<double>(df_it->second);
        const double tf = static_cast<double>(tf_it->second);
        const double idf = std::log((n_docs - df + 0.5) / (df + 0.5) + 1.0);
        const double norm = params_.k1 * (1.0 - params_.b +
                                          params_.b * static_cast<double>(doc.length) / avgdl_);
        total += idf * tf * (params_.k1 + 1.0) / (tf + norm);
    }
    return total;
}

double Bm25Index::score(const Tokens& query, const std::string& doc_id) const {
    const Doc& doc = doc_at(doc_id);
    const std::set<std::string> term_set(query.begin(), query.end());
    const std::vector<std::string> unique_terms(term_set.begin(), term_set.end());
    return score_doc(unique_terms, doc);
}

std::vector<std::string> Bm25Index::top_k(const Tokens& query, std::size_t k,
                                          const std::unordered_set<std::string>& exclude) const {
    const std::set<std::string> term_set(query.begin(), query.end());
    const std::vector<std::string> unique_terms(term_set.begin(), term_set.end());

    std::vector<std::pair<double, const std::string*>> scored;
    scored.reserve(docs_.size());
    for (const auto& doc : docs_) {
        if (exclude.count(doc.id)) continue;
        scored.emplace_back(score_doc(unique_terms, doc), &doc.id);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return *a.second < *b.second;
    });
    if (scored.size() > k) scored.resize(k);

    std::vector<std::string> out;
    out.reserve(scored.size());
    for (const auto& [score, id] : scored) out.push_back(*id);
    return out;
}

int Bm25Index::doc_frequency(const std::string& term) const {
    auto it = doc_freq_.find(term);
    return it == doc_freq_.end() ? 0 : it->second;
}

const std::string& Bm25Index::doc_text(const std::string& doc_id) const {
    return doc_at(doc_id).text;
}

std::vector<std::string> Bm25Index::doc_ids_sorted() const {
    std::vector<std::string> ids;
    ids.reserve(docs_.size());
    for (const auto& doc : docs_) ids.push_back(doc.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace ctxeval

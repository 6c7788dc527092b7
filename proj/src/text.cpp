#include "ctxeval/text.hpp"

#include <algorithm>
#include <numeric>

#include "ctxeval/error.hpp"

namespace ctxeval {

namespace {

struct DecodedChar {
    char32_t cp;
    int len;  // bytes consumed
};

// Minimal UTF-8 decoder. Invalid bytes are passed through one at a time
// as their raw byte value, so arbitrary input never aborts a pipeline.
DecodedChar decode_utf8(std::string_view s, std::size_t i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) return {b0, 1};

    auto is_cont = [&](std::size_t k) {
        return k < s.size() && (byte(k) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0 && is_cont(i + 1)) {
        char32_t cp = ((b0 & 0x1Fu) << 6) | (byte(i + 1) & 0x3Fu);
        if (cp >= 0x80) return {cp, 2};
    } else if ((b0 & 0xF0) == 0xE0 && is_cont(i + 1) && is_cont(i + 2)) {
        char32_t cp = ((b0 & 0x0Fu) << 12) | ((byte(i + 1) & 0x3Fu) << 6) | (byte(i + 2) & 0x3Fu);
        if (cp >= 0x800) return {cp, 3};
    } else if ((b0 & 0xF8) == 0xF0 && is_cont(i + 1) && is_cont(i + 2) && is_cont(i + 3)) {
        char32_t cp = ((b0 & 0x07u) << 18) | ((byte(i + 1) & 0x3Fu) << 12) |
                      ((byte(i + 2) & 0x3Fu) << 6) | (byte(i + 3) & 0x3Fu);
        if (cp >= 0x10000 && cp <= 0x10FFFF) return {cp, 4};
    }
    return {b0, 1};
}

// Unicode White_Space property.
bool is_space_cp(char32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
        case 0x20: case 0x85: case 0xA0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

// Punctuation (category P*): exhaustive over ASCII plus the common
// beyond-ASCII marks that show up in web text. ASCII symbol characters
// ($ + < = > ^ ` | ~) are category S* and deliberately not listed.
bool is_punct_cp(char32_t cp) {
    if (cp < 0x80) {
        switch (cp) {
            case '!': case '"': case '#': case '%': case '&': case '\'':
            case '(': case ')': case '*': case ',': case '-': case '.':
            case '/': case ':': case ';': case '?': case '@': case '[':
            case '\\': case ']': case '_': case '{': case '}':
                return true;
            default:
                return false;
        }
    }
    switch (cp) {
        case 0xA1: case 0xAB: case 0xB7: case 0xBB: case 0xBF:
        case 0x2026: case 0x2039: case 0x203A:
            return true;
        default:
            return (cp >= 0x2010 && cp <= 0x2015) ||  // hyphens and dashes
                   (cp >= 0x2018 && cp <= 0x201F);    // quotation marks
    }
}

bool is_apostrophe(char32_t cp) { return cp == '\'' || cp == 0x2019; }
bool is_hyphen(char32_t cp) { return cp == '-' || cp == 0x2010 || cp == 0x2011; }

std::vector<char32_t> decode_all(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        auto [cp, len] = decode_utf8(s, i);
        out.push_back(cp);
        i += static_cast<std::size_t>(len);
    }
    return out;
}

}  // namespace

std::string normalize(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    bool in_digit_run = false;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto [cp, len] = decode_utf8(text, i);
        if (is_space_cp(cp)) {
            in_digit_run = false;
            if (!out.empty()) pending_space = true;
            i += static_cast<std::size_t>(len);
            continue;
        }
        if (cp >= '0' && cp <= '9') {
            if (!in_digit_run) {
                if (pending_space) {
                    out.push_back(' ');
                    pending_space = false;
                }
                out.push_back('#');
                in_digit_run = true;
            }
            i += static_cast<std::size_t>(len);
            continue;
        }
        in_digit_run = false;
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        if (cp >= 'A' && cp <= 'Z') {
            out.push_back(static_cast<char>(cp - 'A' + 'a'));
        } else {
            out.append(text.substr(i, static_cast<std::size_t>(len)));
        }
        i += static_cast<std::size_t>(len);
    }
    return out;
}

namespace {

void tokenize_chunk(std::string_view chunk, Tokens& out) {
    struct Cp {
        char32_t cp;
        std::size_t off;
        int len;
        bool punct;  // splittable punctuation ("#" exempt)
    };
    std::vector<Cp> cps;
    std::size_t i = 0;
    while (i < chunk.size()) {
        auto [cp, len] = decode_utf8(chunk, i);
        cps.push_back({cp, i, len, is_punct_cp(cp) && cp != '#'});
        i += static_cast<std::size_t>(len);
    }

    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
    };
    for (std::size_t k = 0; k < cps.size(); ++k) {
        const Cp& c = cps[k];
        if (c.punct) {
            const bool joiner = is_apostrophe(c.cp) || is_hyphen(c.cp);
            const bool intra_word = joiner && k > 0 && k + 1 < cps.size() &&
                                    !cps[k - 1].punct && !cps[k + 1].punct;
            if (!intra_word) {
                // Split off; a lone punctuation token is dropped outright.
                flush();
                continue;
            }
        }
        cur.append(chunk.substr(c.off, static_cast<std::size_t>(c.len)));
    }
    flush();
}

}  // namespace

Tokens tokenize(std::string_view text) {
    const std::string norm = normalize(text);
    Tokens out;
    std::size_t start = 0;
    while (start < norm.size()) {
        std::size_t end = norm.find(' ', start);
        if (end == std::string::npos) end = norm.size();
        if (end > start) tokenize_chunk(std::string_view(norm).substr(start, end - start), out);
        start = end + 1;
    }
    return out;
}

std::string join(const Tokens& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    std::vector<char32_t> longer = decode_all(a);
    std::vector<char32_t> shorter = decode_all(b);
    if (longer.size() < shorter.size()) std::swap(longer, shorter);
    if (shorter.empty()) return longer.size();

    // Two-row DP over the shorter string.
    std::vector<std::size_t> prev(shorter.size() + 1);
    std::vector<std::size_t> cur(shorter.size() + 1);
    std::iota(prev.begin(), prev.end(), std::size_t{0});
    for (std::size_t i = 1; i <= longer.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= shorter.size(); ++j) {
            const std::size_t subst = prev[j - 1] + (longer[i - 1] == shorter[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
        }
        std::swap(prev, cur);
    }
    return prev[shorter.size()];
}

bool levenshtein_at_most(std::string_view a, std::string_view b, std::size_t limit) {
    std::vector<char32_t> longer = decode_all(a);
    std::vector<char32_t> shorter = decode_all(b);
    if (longer.size() < shorter.size()) std::swap(longer, shorter);
    if (longer.size() - shorter.size() > limit) return false;
    if (shorter.empty()) return longer.size() <= limit;

    const std::size_t inf = limit + 1;
    const std::size_t m = shorter.size();
    std::vector<std::size_t> prev(m + 1, inf);
    std::vector<std::size_t> cur(m + 1, inf);
    for (std::size_t j = 0; j <= std::min(m, limit); ++j) prev[j] = j;

    for (std::size_t i = 1; i <= longer.size(); ++i) {
        const std::size_t jlo = i > limit ? i - limit : 1;
        const std::size_t jhi = std::min(m, i + limit);
        if (jlo > jhi) return false;
        std::fill(cur.begin(), cur.end(), inf);
        if (jlo == 1 && i <= limit) cur[0] = i;
        std::size_t row_min = inf;
        for (std::size_t j = jlo; j <= jhi; ++j) {
            const std::size_t subst = prev[j - 1] + (longer[i - 1] == shorter[j - 1] ? 0 : 1);
            const std::size_t del = prev[j] == inf ? inf : prev[j] + 1;
            const std::size_t ins = cur[j - 1] == inf ? inf : cur[j - 1] + 1;
            cur[j] = std::min({del, ins, subst, inf});
            row_min = std::min(row_min, cur[j]);
        }
        if (row_min > limit) return false;
        std::swap(prev, cur);
    }
    return prev[m] <= limit;
}

std::unordered_map<std::string, int> ngram_counts(const Tokens& seq, int n) {
    if (n < 1) throw Error(ErrorCode::invalid_argument, "ngram_counts: n must be >= 1");
    std::unordered_map<std::string, int> counts;
    const std::size_t un = static_cast<std::size_t>(n);
    if (un > seq.size()) return counts;
    for (std::size_t i = 0; i + un <= seq.size(); ++i) {
        std::string key = seq[i];
        for (std::size_t k = 1; k < un; ++k) {
            key.push_back(' ');
            key += seq[i + k];
        }
        ++counts[key];
    }
    return counts;
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
    if (a.empty() || b.empty()) return 0;
    const Tokens& rows = a;
    const Tokens& cols = b;
    std::vector<std::size_t> prev(cols.size() + 1, 0);
    std::vector<std::size_t> cur(cols.size() + 1, 0);
    for (std::size_t i = 1; i <= rows.size(); ++i) {
        for (std::size_t j = 1; j <= cols.size(); ++j) {
            if (rows[i - 1] == cols[j - 1]) {
                cur[j] = prev[j - 1] + 1;
            } else {
                cur[j] = std::max(prev[j], cur[j - 1]);
            }
        }
        std::swap(prev, cur);
    }
    return prev[cols.size()];
}

}  // namespace ctxeval

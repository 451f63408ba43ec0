#include "repeval/text.hpp"

#include <algorithm>
#include <cctype>

namespace repeval {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct(char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

std::string_view strip_punct(std::string_view piece) {
    size_t b = 0, e = piece.size();
    while (b < e && is_punct(piece[b])) ++b;
    while (e > b && is_punct(piece[e - 1])) --e;
    return piece.substr(b, e - b);
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string collapse_ws(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = true;  // leading whitespace dropped
    for (char c : s) {
        if (is_space(c)) {
            in_ws = true;
        } else {
            if (in_ws && !out.empty()) out.push_back(' ');
            out.push_back(c);
            in_ws = false;
        }
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> tokens;
    size_t i = 0;
    const size_t n = s.size();
    while (i < n) {
        while (i < n && is_space(s[i])) ++i;
        size_t start = i;
        while (i < n && !is_space(s[i])) ++i;
        if (i > start) {
            std::string_view piece = strip_punct(s.substr(start, i - start));
            if (!piece.empty()) tokens.emplace_back(piece);
        }
    }
    return tokens;
}

std::size_t count_tokens(std::string_view s) {
    std::size_t count = 0;
    size_t i = 0;
    const size_t n = s.size();
    while (i < n) {
        while (i < n && is_space(s[i])) ++i;
        size_t start = i;
        while (i < n && !is_space(s[i])) ++i;
        if (i > start && !strip_punct(s.substr(start, i - start)).empty()) ++count;
    }
    return count;
}

std::string normalize_for_dedup(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = true;
    for (char c : s) {
        if (is_punct(c)) continue;
        if (is_space(c)) {
            in_ws = true;
        } else {
            if (in_ws && !out.empty()) out.push_back(' ');
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            in_ws = false;
        }
    }
    return out;
}

const std::vector<std::string>& default_abbreviations() {
    static const std::vector<std::string> abbrevs = {
        "e.g.", "i.e.", "etc.", "vs.", "cf.", "al.", "fig.", "figs.", "eq.",
        "no.", "vol.", "pp.", "dr.", "mr.", "mrs.", "ms.", "prof.", "st.",
        "approx.", "dept.", "est.", "inc.", "ltd.", "jan.", "feb.", "mar.",
        "apr.", "jun.", "jul.", "aug.", "sep.", "sept.", "oct.", "nov.", "dec.",
    };
    return abbrevs;
}

namespace {

// True when the text ending at position `end` (exclusive) terminates with a
// listed abbreviation, compared case-insensitively.
bool ends_with_abbreviation(std::string_view text, size_t end,
                            const std::vector<std::string>& abbreviations) {
    for (const auto& abbr : abbreviations) {
        if (abbr.size() > end) continue;
        size_t start = end - abbr.size();
        if (start > 0 && !is_space(text[start - 1])) continue;
        bool match = true;
        for (size_t k = 0; k < abbr.size(); ++k) {
            char a = static_cast<char>(std::tolower(static_cast<unsigned char>(text[start + k])));
            if (a != abbr[k]) {
                match = false;
                break;
            }
        }
        if (match) return true;
    }
    return false;
}

// Consumes a run of "[123]" marker clusters starting at `i`; returns the
// position past the run (== i when there is none).
size_t skip_marker_cluster(std::string_view s, size_t i) {
    size_t pos = i;
    while (pos < s.size() && s[pos] == '[') {
        size_t j = pos + 1;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j == pos + 1 || j >= s.size() || s[j] != ']') break;
        pos = j + 1;
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t') && pos + 1 < s.size() &&
               s[pos + 1] == '[')
            ++pos;
    }
    return pos;
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view paragraph,
                                         const std::vector<std::string>& abbreviations) {
    std::vector<std::string> sentences;
    std::string text = collapse_ws(paragraph);
    if (text.empty()) return sentences;

    size_t start = 0;
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            size_t term_end = i + 1;
            while (term_end < n &&
                   (text[term_end] == '.' || text[term_end] == '!' || text[term_end] == '?' ||
                    text[term_end] == ')' || text[term_end] == '"' || text[term_end] == '\''))
                ++term_end;
            if (c == '.' && ends_with_abbreviation(text, i + 1, abbreviations)) {
                i = term_end;
                continue;
            }
            // Attach a trailing "[n]" cluster to the current sentence.
            size_t after = term_end;
            while (after < n && is_space(text[after])) ++after;
            bool had_ws = after > term_end;
            size_t post_markers = skip_marker_cluster(text, after);
            if (post_markers != after) {
                term_end = post_markers;
                after = term_end;
                while (after < n && is_space(text[after])) ++after;
                had_ws = after > term_end;
            }
            // A boundary needs whitespace (or end of text) after the
            // terminator; "4.5" must stay one token.
            bool boundary =
                after >= n ||
                (had_ws && (std::isupper(static_cast<unsigned char>(text[after])) ||
                            std::isdigit(static_cast<unsigned char>(text[after]))));
            if (boundary) {
                std::string sentence = trim(std::string_view(text).substr(start, term_end - start));
                if (!sentence.empty()) sentences.push_back(std::move(sentence));
                start = after;
                i = after;
                continue;
            }
            i = term_end;
            continue;
        }
        ++i;
    }
    if (start < n) {
        std::string tail = trim(std::string_view(text).substr(start));
        if (!tail.empty()) sentences.push_back(std::move(tail));
    }
    return sentences;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) !=
            std::tolower(static_cast<unsigned char>(prefix[i])))
            return false;
    }
    return true;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return true;
    if (haystack.size() < needle.size()) return false;
    for (size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        if (starts_with_ci(haystack.substr(i), needle)) return true;
    }
    return false;
}

}  // namespace repeval

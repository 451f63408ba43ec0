/// @file text.hpp
/// @brief Deterministic text primitives shared by the parser and feature code.
///
/// Tokenization rule: split on ASCII whitespace, strip leading/trailing
/// punctuation from each piece, drop pieces that become empty. Distinctness
/// comparisons are done on the lowercased token.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace repeval {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

/// Collapse any whitespace run to a single space and trim the ends.
std::string collapse_ws(std::string_view s);

/// Tokens of `s` under the documented rule (punctuation-stripped, non-empty).
std::vector<std::string> tokenize(std::string_view s);

/// Token count without materializing the tokens.
std::size_t count_tokens(std::string_view s);

/// Lowercased, whitespace-collapsed, punctuation-stripped form used for
/// claim deduplication keys.
std::string normalize_for_dedup(std::string_view s);

/// Sentence splitter: a sentence ends at terminal punctuation (. ! ?)
/// followed by whitespace and an uppercase letter or digit. A small
/// abbreviation list suppresses false boundaries. Citation marker clusters
/// such as "[3]" directly after the terminator stay with their sentence.
std::vector<std::string> split_sentences(std::string_view paragraph,
                                         const std::vector<std::string>& abbreviations);

/// Default abbreviation list shipped with the feature config.
const std::vector<std::string>& default_abbreviations();

bool starts_with_ci(std::string_view s, std::string_view prefix);
bool contains_ci(std::string_view haystack, std::string_view needle);

}  // namespace repeval

/// @file report.hpp
/// @brief Report parsing: citation maps, atomic claims, and multimodal items.
///
/// Parsing is total: any UTF-8 input yields a ReportDocument. Structural
/// defects (duplicate reference indices, dangling markers, malformed
/// reference lines) are recorded as data on the document or citation map,
/// never thrown.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace repeval {

/// One body paragraph plus the citation indices it carries, in order of
/// first appearance.
struct BodySegment {
    std::string text;
    std::vector<int> citation_indices;
};

struct ReferenceEntry {
    int index = 0;
    std::string url;
};

struct Heading {
    int level = 0;  // 1..6 for ATX headings, 0 for a bare "References:" line
    std::string title;
};

struct InlineImage {
    std::string locator;   // URL or bundle-relative path, never empty
    std::string caption;   // alt text, possibly empty
    std::optional<int> citation_index;
};

struct ReportDocument {
    std::string raw_text;
    std::vector<BodySegment> body_segments;
    std::vector<ReferenceEntry> references_block;  // in file order, duplicates kept
    std::vector<InlineImage> inline_images;
    std::vector<Heading> headings;
    std::size_t word_count = 0;
    bool has_references_heading = false;
    std::vector<std::string> flags;  // structural defects, e.g. "malformed reference line"
};

struct CitationMap {
    std::map<int, std::string> entries;  // index -> url, first definition wins
    std::vector<int> dangling_markers;   // cited in body, absent from entries
    std::vector<int> duplicate_indices;  // defined more than once in the block
};

struct AtomicClaim {
    std::string claim_text;           // sentence with citation markers removed
    std::size_t source_segment = 0;   // index into body_segments
    std::vector<int> cited_indices;   // exactly one index after pair expansion
    std::string dedup_key;            // normalized text + cited index
    bool dangling = false;            // cited index missing from the map
};

enum class MmItemKind { InlineImageBlock, ImageGroundedParagraph };

struct MmItem {
    std::string item_id;  // stable under re-parsing
    MmItemKind kind = MmItemKind::InlineImageBlock;
    std::string image_locator;
    std::string claim_text;
    std::optional<int> citation_index;
    bool locator_is_url = false;
};

const char* to_string(MmItemKind kind);

/// True for http(s) URLs with a non-empty host.
bool is_valid_http_url(std::string_view url);

/// Parse raw markdown into a document. Never throws; empty input yields an
/// empty document with word_count 0.
ReportDocument parse_report(std::string_view raw_text);

/// Build the index->URL map from a parsed document. First definition of an
/// index wins; later ones are recorded in duplicate_indices. Body markers
/// without an entry land in dangling_markers.
CitationMap build_citation_map(const ReportDocument& doc);

/// One claim per (cited sentence, marker) occurrence, deduplicated on the
/// normalized-text + index key.
std::vector<AtomicClaim> extract_claims(const ReportDocument& doc, const CitationMap& map);

/// Inline image blocks plus paragraphs that reference a figure and cite an
/// index resolving to an image URL.
std::vector<MmItem> extract_mm_items(const ReportDocument& doc);

/// Every citation marker occurrence in the body segments, in order,
/// duplicates preserved.
std::vector<int> body_marker_occurrences(const ReportDocument& doc);

}  // namespace repeval

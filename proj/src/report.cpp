#include "repeval/report.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "repeval/text.hpp"

namespace repeval {

namespace {

struct MarkerHit {
    int index;
    size_t begin;  // position of '['
    size_t end;    // position past ']'
};

// Bracketed integer citation markers "[12]". A marker immediately followed
// by '(' is a markdown link, not a citation.
std::vector<MarkerHit> find_markers(std::string_view text) {
    std::vector<MarkerHit> hits;
    const size_t n = text.size();
    for (size_t i = 0; i < n; ++i) {
        if (text[i] != '[') continue;
        size_t j = i + 1;
        while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        if (j == i + 1 || j >= n || text[j] != ']') continue;
        if (j + 1 < n && text[j + 1] == '(') {
            i = j;
            continue;
        }
        int value = 0;
        bool overflow = false;
        for (size_t k = i + 1; k < j; ++k) {
            if (value > 100000000) {
                overflow = true;
                break;
            }
            value = value * 10 + (text[k] - '0');
        }
        if (!overflow) hits.push_back({value, i, j + 1});
        i = j;
    }
    return hits;
}

std::string strip_markers(std::string_view text) {
    auto hits = find_markers(text);
    if (hits.empty()) return collapse_ws(text);
    std::string out;
    out.reserve(text.size());
    size_t pos = 0;
    for (const auto& h : hits) {
        out.append(text.substr(pos, h.begin - pos));
        pos = h.end;
    }
    out.append(text.substr(pos));
    return collapse_ws(out);
}

bool is_blank(std::string_view line) {
    for (char c : line)
        if (c != ' ' && c != '\t' && c != '\r') return false;
    return true;
}

// Recognizes "References" / "## References:" / "**References**" lines.
// Returns the ATX level (0 for a bare line) or -1 when it is not one.
int references_heading_level(std::string_view line) {
    std::string t = trim(line);
    int level = 0;
    while (!t.empty() && t.front() == '#') {
        t.erase(t.begin());
        ++level;
    }
    if (level > 6) return -1;
    std::string body = trim(t);
    while (!body.empty() && (body.front() == '*' || body.front() == '_')) body.erase(body.begin());
    while (!body.empty() && (body.back() == '*' || body.back() == '_')) body.pop_back();
    body = trim(body);
    if (!body.empty() && body.back() == ':') body.pop_back();
    if (to_lower(body) == "references") return level;
    return -1;
}

struct HeadingLine {
    int level;
    std::string title;
};

std::optional<HeadingLine> parse_atx_heading(std::string_view line) {
    std::string t = trim(line);
    if (t.empty() || t.front() != '#') return std::nullopt;
    int level = 0;
    size_t i = 0;
    while (i < t.size() && t[i] == '#') {
        ++level;
        ++i;
    }
    if (level > 6 || i >= t.size() || (t[i] != ' ' && t[i] != '\t')) return std::nullopt;
    std::string title = trim(t.substr(i));
    while (!title.empty() && title.back() == '#') title.pop_back();
    title = trim(title);
    if (title.empty()) return std::nullopt;
    return HeadingLine{level, title};
}

// "[n] URL" or "n. URL" reference entries.
std::optional<ReferenceEntry> parse_reference_line(std::string_view line) {
    std::string t = trim(line);
    if (t.empty()) return std::nullopt;
    size_t pos = 0;
    int index = 0;
    if (t[0] == '[') {
        size_t j = 1;
        while (j < t.size() && std::isdigit(static_cast<unsigned char>(t[j]))) ++j;
        if (j == 1 || j >= t.size() || t[j] != ']') return std::nullopt;
        index = std::stoi(t.substr(1, j - 1));
        pos = j + 1;
    } else if (std::isdigit(static_cast<unsigned char>(t[0]))) {
        size_t j = 0;
        while (j < t.size() && std::isdigit(static_cast<unsigned char>(t[j]))) ++j;
        if (j >= t.size() || t[j] != '.') return std::nullopt;
        index = std::stoi(t.substr(0, j));
        pos = j + 1;
    } else {
        return std::nullopt;
    }
    std::string rest = trim(t.substr(pos));
    if (rest.empty()) return std::nullopt;
    // URLs carry no spaces; keep the first token only.
    size_t space = rest.find_first_of(" \t");
    if (space != std::string::npos) rest = rest.substr(0, space);
    return ReferenceEntry{index, rest};
}

struct ImageHit {
    std::string alt;
    std::string locator;
    size_t begin;
    size_t end;  // past ')' and any attached "[n]" cluster
    std::optional<int> citation_index;
};

// Markdown images "![alt](locator)". A caption marker inside the alt text
// wins; otherwise a "[n]" cluster directly after the image is consumed.
std::vector<ImageHit> find_images(std::string_view text) {
    std::vector<ImageHit> hits;
    const size_t n = text.size();
    for (size_t i = 0; i + 1 < n; ++i) {
        if (text[i] != '!' || text[i + 1] != '[') continue;
        size_t alt_start = i + 2;
        int depth = 1;
        size_t j = alt_start;
        while (j < n && depth > 0) {
            if (text[j] == '[') ++depth;
            if (text[j] == ']') --depth;
            if (depth > 0) ++j;
        }
        if (j >= n || j + 1 >= n || text[j + 1] != '(') continue;
        size_t loc_start = j + 2;
        size_t k = loc_start;
        while (k < n && text[k] != ')') ++k;
        if (k >= n) continue;

        ImageHit hit;
        hit.alt = trim(text.substr(alt_start, j - alt_start));
        std::string locator = trim(text.substr(loc_start, k - loc_start));
        size_t space = locator.find_first_of(" \t");  // drop optional title
        if (space != std::string::npos) locator = trim(locator.substr(0, space));
        hit.locator = locator;
        hit.begin = i;
        hit.end = k + 1;

        auto alt_markers = find_markers(hit.alt);
        if (!alt_markers.empty()) {
            hit.citation_index = alt_markers.front().index;
        } else {
            size_t p = hit.end;
            while (p < n && (text[p] == ' ' || text[p] == '\t')) ++p;
            auto trailing = find_markers(text.substr(p));
            if (!trailing.empty() && trailing.front().begin == 0) {
                hit.citation_index = trailing.front().index;
                hit.end = p + trailing.front().end;
            }
        }
        if (!hit.locator.empty()) hits.push_back(std::move(hit));
        i = k;
    }
    return hits;
}

const std::vector<std::string>& figure_reference_cues() {
    static const std::vector<std::string> cues = {
        "figure", "fig.", "chart", "image", "diagram", "photo",
        "screenshot", "plot", "graph", "table",
    };
    return cues;
}

bool has_image_extension(std::string_view url) {
    std::string path = to_lower(url);
    size_t q = path.find_first_of("?#");
    if (q != std::string::npos) path = path.substr(0, q);
    static const char* exts[] = {".png", ".jpg",  ".jpeg", ".gif", ".svg",
                                 ".webp", ".bmp", ".tif",  ".tiff"};
    for (const char* ext : exts) {
        size_t len = std::char_traits<char>::length(ext);
        if (path.size() >= len && path.compare(path.size() - len, len, ext) == 0) return true;
    }
    return false;
}

}  // namespace

const char* to_string(MmItemKind kind) {
    switch (kind) {
        case MmItemKind::InlineImageBlock: return "inline-image-block";
        case MmItemKind::ImageGroundedParagraph: return "image-grounded-paragraph";
    }
    return "unknown";
}

bool is_valid_http_url(std::string_view url) {
    std::string lower = to_lower(url);
    size_t host_start = 0;
    if (lower.rfind("https://", 0) == 0) {
        host_start = 8;
    } else if (lower.rfind("http://", 0) == 0) {
        host_start = 7;
    } else {
        return false;
    }
    size_t host_end = url.find_first_of("/?#", host_start);
    std::string_view host = url.substr(host_start, (host_end == std::string::npos)
                                                       ? std::string::npos
                                                       : host_end - host_start);
    if (host.empty()) return false;
    for (char c : url) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return false;
        if (static_cast<unsigned char>(c) < 0x21) return false;
    }
    return host.find('.') != std::string::npos || host.find(':') != std::string::npos ||
           host == "localhost";
}

ReportDocument parse_report(std::string_view raw_text) {
    ReportDocument doc;
    doc.raw_text.assign(raw_text);
    doc.word_count = count_tokens(raw_text);
    if (raw_text.empty()) return doc;

    // Line split with \r\n tolerated.
    std::vector<std::string> lines;
    {
        std::string current;
        for (char c : raw_text) {
            if (c == '\n') {
                if (!current.empty() && current.back() == '\r') current.pop_back();
                lines.push_back(std::move(current));
                current.clear();
            } else {
                current.push_back(c);
            }
        }
        if (!current.empty() && current.back() == '\r') current.pop_back();
        lines.push_back(std::move(current));
    }

    bool in_references = false;
    std::vector<std::string> paragraph_lines;

    auto flush_paragraph = [&]() {
        if (paragraph_lines.empty()) return;
        std::string text;
        for (size_t i = 0; i < paragraph_lines.size(); ++i) {
            if (i) text.push_back('\n');
            text += paragraph_lines[i];
        }
        paragraph_lines.clear();

        auto images = find_images(text);
        std::string remainder;
        remainder.reserve(text.size());
        size_t pos = 0;
        for (const auto& img : images) {
            remainder.append(text.substr(pos, img.begin - pos));
            pos = img.end;
            doc.inline_images.push_back({img.locator, strip_markers(img.alt), img.citation_index});
        }
        remainder.append(text.substr(pos));
        std::string body = collapse_ws(remainder);
        if (body.empty()) return;

        BodySegment segment;
        segment.text = body;
        std::set<int> seen;
        for (const auto& hit : find_markers(body)) {
            if (seen.insert(hit.index).second) segment.citation_indices.push_back(hit.index);
        }
        doc.body_segments.push_back(std::move(segment));
    };

    for (const auto& line : lines) {
        int ref_level = references_heading_level(line);
        if (ref_level >= 0) {
            flush_paragraph();
            in_references = true;
            doc.has_references_heading = true;
            doc.headings.push_back({ref_level, "References"});
            continue;
        }
        if (auto heading = parse_atx_heading(line)) {
            flush_paragraph();
            in_references = false;
            doc.headings.push_back({heading->level, heading->title});
            continue;
        }
        if (in_references) {
            if (is_blank(line)) continue;
            if (auto entry = parse_reference_line(line)) {
                doc.references_block.push_back(*entry);
            } else {
                doc.flags.push_back("malformed reference line: " + collapse_ws(line));
            }
            continue;
        }
        if (is_blank(line)) {
            flush_paragraph();
            continue;
        }
        paragraph_lines.push_back(line);
    }
    flush_paragraph();
    return doc;
}

CitationMap build_citation_map(const ReportDocument& doc) {
    CitationMap map;
    std::set<int> duplicates;
    for (const auto& entry : doc.references_block) {
        auto [it, inserted] = map.entries.emplace(entry.index, entry.url);
        if (!inserted) duplicates.insert(entry.index);
    }
    map.duplicate_indices.assign(duplicates.begin(), duplicates.end());

    std::set<int> dangling;
    for (const auto& segment : doc.body_segments) {
        for (int idx : segment.citation_indices) {
            if (!map.entries.count(idx)) dangling.insert(idx);
        }
    }
    for (const auto& img : doc.inline_images) {
        if (img.citation_index && !map.entries.count(*img.citation_index))
            dangling.insert(*img.citation_index);
    }
    map.dangling_markers.assign(dangling.begin(), dangling.end());
    return map;
}

std::vector<AtomicClaim> extract_claims(const ReportDocument& doc, const CitationMap& map) {
    std::vector<AtomicClaim> claims;
    std::set<std::string> seen_keys;
    for (size_t seg_idx = 0; seg_idx < doc.body_segments.size(); ++seg_idx) {
        const auto& segment = doc.body_segments[seg_idx];
        for (const auto& sentence : split_sentences(segment.text, default_abbreviations())) {
            auto markers = find_markers(sentence);
            if (markers.empty()) continue;
            std::string claim_text = strip_markers(sentence);
            if (claim_text.empty()) continue;
            std::string norm = normalize_for_dedup(claim_text);
            std::set<int> marker_set;
            for (const auto& hit : markers) marker_set.insert(hit.index);
            for (int idx : marker_set) {
                std::string key = norm + "#" + std::to_string(idx);
                if (!seen_keys.insert(key).second) continue;
                AtomicClaim claim;
                claim.claim_text = claim_text;
                claim.source_segment = seg_idx;
                claim.cited_indices = {idx};
                claim.dedup_key = std::move(key);
                claim.dangling = map.entries.count(idx) == 0;
                claims.push_back(std::move(claim));
            }
        }
    }
    return claims;
}

std::vector<int> body_marker_occurrences(const ReportDocument& doc) {
    std::vector<int> occurrences;
    for (const auto& segment : doc.body_segments) {
        for (const auto& hit : find_markers(segment.text)) occurrences.push_back(hit.index);
    }
    return occurrences;
}

std::vector<MmItem> extract_mm_items(const ReportDocument& doc) {
    std::vector<MmItem> items;
    CitationMap map = build_citation_map(doc);

    for (size_t i = 0; i < doc.inline_images.size(); ++i) {
        const auto& img = doc.inline_images[i];
        if (img.locator.empty()) continue;
        MmItem item;
        item.item_id = "img-" + std::to_string(i + 1);
        item.kind = MmItemKind::InlineImageBlock;
        item.image_locator = img.locator;
        item.claim_text = img.caption;
        item.citation_index = img.citation_index;
        item.locator_is_url = is_valid_http_url(img.locator);
        items.push_back(std::move(item));
    }

    for (size_t seg_idx = 0; seg_idx < doc.body_segments.size(); ++seg_idx) {
        const auto& segment = doc.body_segments[seg_idx];
        bool mentions_figure = false;
        for (const auto& cue : figure_reference_cues()) {
            if (contains_ci(segment.text, cue)) {
                mentions_figure = true;
                break;
            }
        }
        if (!mentions_figure) continue;
        for (int idx : segment.citation_indices) {
            auto it = map.entries.find(idx);
            if (it == map.entries.end() || !has_image_extension(it->second)) continue;
            MmItem item;
            item.item_id = "gp-" + std::to_string(seg_idx + 1) + "-" + std::to_string(idx);
            item.kind = MmItemKind::ImageGroundedParagraph;
            item.image_locator = it->second;
            item.claim_text = strip_markers(segment.text);
            item.citation_index = idx;
            item.locator_is_url = is_valid_http_url(it->second);
            items.push_back(std::move(item));
        }
    }
    return items;
}

}  // namespace repeval

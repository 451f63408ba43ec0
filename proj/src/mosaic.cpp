#include "repeval/mosaic.hpp"

#include "repeval/text.hpp"

namespace repeval {

const char* to_string(VisualType type) {
    switch (type) {
        case VisualType::Photo: return "photo";
        case VisualType::Datachart: return "datachart";
        case VisualType::Ocrchart: return "ocrchart";
        case VisualType::Diagram: return "diagram";
    }
    return "unknown";
}

std::optional<VisualType> visual_type_from_string(const std::string& name) {
    static const std::pair<const char*, VisualType> table[] = {
        {"photo", VisualType::Photo},
        {"datachart", VisualType::Datachart},
        {"ocrchart", VisualType::Ocrchart},
        {"diagram", VisualType::Diagram},
    };
    for (const auto& [key, value] : table)
        if (name == key) return value;
    return std::nullopt;
}

const std::vector<RouterRule>& router_rules_v1() {
    // Ordered; first match wins. Flowchart cues precede the generic chart
    // keyword so they land on diagram.
    static const std::vector<RouterRule> rules = {
        {"flowchart", VisualType::Diagram},
        {"flow chart", VisualType::Diagram},
        // Chart keywords and axis-label cues.
        {"y-axis", VisualType::Datachart},
        {"x-axis", VisualType::Datachart},
        {"axis", VisualType::Datachart},
        {"chart", VisualType::Datachart},
        {"histogram", VisualType::Datachart},
        {"scatter", VisualType::Datachart},
        {"time series", VisualType::Datachart},
        {"trend line", VisualType::Datachart},
        {"plot", VisualType::Datachart},
        {"graph", VisualType::Datachart},
        // Dense embedded text cues.
        {"screenshot", VisualType::Ocrchart},
        {"table", VisualType::Ocrchart},
        {"spreadsheet", VisualType::Ocrchart},
        {"interface", VisualType::Ocrchart},
        {"settings page", VisualType::Ocrchart},
        {"menu", VisualType::Ocrchart},
        {"document scan", VisualType::Ocrchart},
        {"receipt", VisualType::Ocrchart},
        {"invoice", VisualType::Ocrchart},
        {"on-screen text", VisualType::Ocrchart},
        // Schematic and flow cues.
        {"diagram", VisualType::Diagram},
        {"schematic", VisualType::Diagram},
        {"architecture", VisualType::Diagram},
        {"workflow", VisualType::Diagram},
        {"pipeline", VisualType::Diagram},
        {"uml", VisualType::Diagram},
        {"circuit", VisualType::Diagram},
    };
    return rules;
}

std::string router_rules_to_string() {
    std::string out = "version = ";
    out += kRouterVersion;
    out += "\ndefault -> photo\n";
    for (const auto& rule : router_rules_v1()) {
        out += rule.cue;
        out += " -> ";
        out += to_string(rule.type);
        out += "\n";
    }
    return out;
}

namespace {

bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

// Whole-word cue match over lowercased text: "graph" must not fire inside
// "photograph".
bool cue_matches(const std::string& haystack, const std::string& cue) {
    size_t pos = 0;
    while ((pos = haystack.find(cue, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
        size_t end = pos + cue.size();
        bool right_ok = end >= haystack.size() || !is_word_char(haystack[end]);
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

bool locator_resolves(const MmItem& item, const std::vector<std::string>& task_images) {
    if (item.locator_is_url) return true;
    for (const auto& image : task_images) {
        if (item.image_locator == image) return true;
        // Bundle-relative path may be cited by filename alone.
        if (image.size() > item.image_locator.size() &&
            image.compare(image.size() - item.image_locator.size(), std::string::npos,
                          item.image_locator) == 0)
            return true;
        if (item.image_locator.size() > image.size() &&
            item.image_locator.compare(item.image_locator.size() - image.size(),
                                       std::string::npos, image) == 0)
            return true;
    }
    return false;
}

}  // namespace

Result<VisualType> route_item(const MmItem& item, const std::vector<std::string>& task_images) {
    if (item.image_locator.empty() || !locator_resolves(item, task_images))
        return Result<VisualType>::fail("unresolvable image locator: " + item.image_locator);
    std::string haystack = to_lower(item.claim_text) + " " + to_lower(item.image_locator);
    for (const auto& rule : router_rules_v1()) {
        if (cue_matches(haystack, rule.cue)) return Result<VisualType>::ok(rule.type);
    }
    return Result<VisualType>::ok(VisualType::Photo);
}

double item_score(const ItemJudgment& j) {
    switch (j.visual_type) {
        case VisualType::Datachart:
        case VisualType::Ocrchart:
            return j.f * (0.9 * j.acc + 0.1 * j.vqa);
        case VisualType::Photo:
            return j.f * (0.5 * j.sem + 0.5 * j.vqa);
        case VisualType::Diagram:
            return j.f * (0.5 * j.vqa + 0.5 * (1.0 - j.h.value_or(0.0)));
    }
    return 0.0;
}

Result<ItemJudgment> judge_item(JudgeGateway& gateway, const MmItem& item, VisualType type,
                                const std::string& task_text) {
    const bool diagram = type == VisualType::Diagram;
    Bindings bindings = {
        {"TASK_TEXT", task_text},
        {"VISUAL_TYPE", to_string(type)},
        {"IMAGE_REF", item.image_locator},
        {"CLAIM_TEXT", item.claim_text},
        {"DIAGRAM_RULE",
         diagram ? " Also score h (hallucination factor) in [0,1], higher when the statement "
                   "invents structure not present in the diagram."
                 : ""},
        {"DIAGRAM_KEYS", diagram ? ", h" : ""},
    };
    ValidationContext ctx;
    ctx.expects_hallucination_factor = diagram;
    auto verdict = gateway.invoke(TemplateId::MosaicItem, bindings, ctx);
    if (!verdict) return Result<ItemJudgment>::fail(verdict.error());

    const auto& payload = verdict.value().parsed_payload;
    ItemJudgment judgment;
    judgment.item_id = item.item_id;
    judgment.visual_type = type;
    judgment.sem = payload["sem"].get<double>();
    judgment.acc = payload["acc"].get<double>();
    judgment.vqa = payload["vqa"].get<double>();
    judgment.f = payload["f"].get<double>();
    if (diagram) judgment.h = payload["h"].get<double>();
    return Result<ItemJudgment>::ok(std::move(judgment));
}

MosaicBreakdown mosaic_score(const std::vector<ItemJudgment>& judgments, bool gate_open) {
    MosaicBreakdown breakdown;
    if (!gate_open) {
        breakdown.gated_out = true;
        return breakdown;
    }
    if (judgments.empty()) {
        breakdown.no_items = true;
        return breakdown;
    }
    double sum = 0.0;
    for (const auto& judgment : judgments) {
        double s = item_score(judgment);
        breakdown.item_scores.emplace_back(judgment.item_id, s);
        sum += s;
    }
    breakdown.score = 100.0 * sum / static_cast<double>(judgments.size());
    return breakdown;
}

}  // namespace repeval

/// @file mosaic.hpp
/// @brief Text-image consistency stage: visual-type routing, type-specific
/// item judging and scoring, and the gated module aggregate.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "repeval/common.hpp"
#include "repeval/judge.hpp"
#include "repeval/report.hpp"

namespace repeval {

inline constexpr const char* kRouterVersion = "v1";

enum class VisualType { Photo, Datachart, Ocrchart, Diagram };

const char* to_string(VisualType type);
std::optional<VisualType> visual_type_from_string(const std::string& name);

/// One ordered routing rule: case-insensitive cue substring -> type.
struct RouterRule {
    std::string cue;
    VisualType type;
};

/// The published v1 rule cascade. First match wins; no match means photo.
const std::vector<RouterRule>& router_rules_v1();

/// Export form of the rule table ("cue -> type" per line, version header),
/// as shipped under share/router/.
std::string router_rules_to_string();

/// Deterministic routing over caption and claim text. Fails with a
/// routing-failure signal when the image locator cannot be resolved against
/// a URL or the task's image list.
Result<VisualType> route_item(const MmItem& item, const std::vector<std::string>& task_images);

struct ItemJudgment {
    std::string item_id;
    VisualType visual_type = VisualType::Photo;
    double sem = 0.0;
    double acc = 0.0;
    double vqa = 0.0;
    double f = 0.0;                 // formatting and integration factor
    std::optional<double> h;        // hallucination factor, diagrams only
};

/// Type-specific item score:
///   datachart/ocrchart: f * (0.9*acc + 0.1*vqa)
///   photo:              f * (0.5*sem + 0.5*vqa)
///   diagram:            f * (0.5*vqa + 0.5*(1-h))
double item_score(const ItemJudgment& judgment);

/// Judge one routed item; diagram payloads must carry h.
Result<ItemJudgment> judge_item(JudgeGateway& gateway, const MmItem& item, VisualType type,
                                const std::string& task_text);

struct MosaicBreakdown {
    std::vector<std::pair<std::string, double>> item_scores;  // (item_id, s_i)
    double score = 0.0;    // 0..100
    bool gated_out = false;
    bool no_items = false;  // gate open but nothing to score (N/A-eligible)
};

/// Gate closed: score 0, no items recorded. Gate open: 100 * mean(s_i);
/// zero items yield score 0 with the no_items flag set.
MosaicBreakdown mosaic_score(const std::vector<ItemJudgment>& judgments, bool gate_open);

}  // namespace repeval

#include "repeval/trace.hpp"

#include <cmath>
#include <set>

namespace repeval {

const char* to_string(SupportLabel label) {
    switch (label) {
        case SupportLabel::Supported: return "supported";
        case SupportLabel::Partial: return "partial";
        case SupportLabel::MissingEvidence: return "missing_evidence";
        case SupportLabel::Contradicted: return "contradicted";
        case SupportLabel::OverSpecific: return "over_specific";
        case SupportLabel::CausalInversion: return "causal_inversion";
        case SupportLabel::Inaccessible: return "inaccessible";
    }
    return "unknown";
}

std::optional<SupportLabel> support_label_from_string(const std::string& name) {
    static const std::pair<const char*, SupportLabel> table[] = {
        {"supported", SupportLabel::Supported},
        {"partial", SupportLabel::Partial},
        {"missing_evidence", SupportLabel::MissingEvidence},
        {"contradicted", SupportLabel::Contradicted},
        {"over_specific", SupportLabel::OverSpecific},
        {"causal_inversion", SupportLabel::CausalInversion},
        {"inaccessible", SupportLabel::Inaccessible},
    };
    for (const auto& [key, value] : table)
        if (name == key) return value;
    return std::nullopt;
}

VefResult make_vef_result(int raw_score, bool raw_verdict_pass, std::string reason,
                          std::string gt_version) {
    VefResult result;
    result.raw_score = raw_score;
    result.raw_verdict_pass = raw_verdict_pass;
    result.reason = std::move(reason);
    result.gt_version = std::move(gt_version);
    result.final_pass = raw_verdict_pass && raw_score >= kVefThreshold;
    result.forced_fail = raw_verdict_pass && raw_score < kVefThreshold;
    return result;
}

TraceTriple aggregate_citation_metrics(const std::vector<ClaimUrlPair>& pairs) {
    std::size_t judged = 0;
    std::size_t supported = 0;
    std::size_t fid_errors = 0;  // contradicted + over_specific + causal_inversion
    std::set<std::string> all_claims;
    std::set<std::string> covered_claims;

    for (const auto& pair : pairs) {
        all_claims.insert(pair.claim_key);
        if (pair.accessible) covered_claims.insert(pair.claim_key);
        if (!pair.accessible || pair.label == SupportLabel::Inaccessible) continue;
        ++judged;
        switch (pair.label) {
            case SupportLabel::Supported: ++supported; break;
            case SupportLabel::Contradicted:
            case SupportLabel::OverSpecific:
            case SupportLabel::CausalInversion: ++fid_errors; break;
            default: break;  // partial / missing_evidence count only as judged
        }
    }

    TraceTriple metrics{};
    if (judged > 0)
        metrics[0] = static_cast<double>(supported) / static_cast<double>(judged);
    if (!all_claims.empty())
        metrics[1] =
            static_cast<double>(covered_claims.size()) / static_cast<double>(all_claims.size());
    if (judged > 0) {
        std::size_t denom = supported + fid_errors;
        metrics[2] = denom == 0 ? 1.0
                                : static_cast<double>(supported) / static_cast<double>(denom);
    }
    return metrics;
}

TraceBreakdown trace_score(const TraceTriple& metrics, const TraceTriple& weights,
                           bool weights_fallback, const VefResult& vef, double lambda_vef) {
    TraceBreakdown breakdown;
    breakdown.metrics = metrics;
    breakdown.weights = weights;
    breakdown.weights_fallback = weights_fallback;
    breakdown.vef = vef;
    breakdown.lambda_vef = lambda_vef;
    double weighted = 0.0;
    for (size_t k = 0; k < 3; ++k) weighted += weights[k] * metrics[k];
    double indicator = vef.final_pass ? 1.0 : 0.0;
    breakdown.score = 100.0 * (lambda_vef * indicator + (1.0 - lambda_vef) * weighted);
    return breakdown;
}

Result<SupportJudgment> judge_pair_support(JudgeGateway& gateway, const std::string& claim_text,
                                           const std::string& url,
                                           const std::string& evidence_text) {
    auto verdict = gateway.invoke(TemplateId::TraceSupport, {{"CLAIM_TEXT", claim_text},
                                                             {"URL", url},
                                                             {"EVIDENCE_TEXT", evidence_text}});
    if (!verdict) return Result<SupportJudgment>::fail(verdict.error());
    const auto& payload = verdict.value().parsed_payload;
    SupportJudgment judgment;
    judgment.label = *support_label_from_string(payload["label"].get<std::string>());
    judgment.rationale = payload["rationale"].get<std::string>();
    return Result<SupportJudgment>::ok(std::move(judgment));
}

Result<VefResult> vef_check(JudgeGateway& gateway, const std::string& segment,
                            const std::string& task_text, const std::string& visual_gt,
                            const std::string& report_text, const std::string& gt_version) {
    auto verdict = gateway.invoke(TemplateId::VefCheck, {{"SEGMENT", segment},
                                                         {"TASK_TEXT", task_text},
                                                         {"VEF_GT", visual_gt},
                                                         {"REPORT_TEXT", report_text}});
    if (!verdict) return Result<VefResult>::fail(verdict.error());
    const auto& payload = verdict.value().parsed_payload;
    return Result<VefResult>::ok(make_vef_result(payload["score"].get<int>(),
                                                 payload["verdict"].get<std::string>() == "PASS",
                                                 payload["reason"].get<std::string>(),
                                                 gt_version));
}

TraceTriple task_citation_weights(JudgeGateway& gateway, const std::string& task_text,
                                  const std::string& report_text, bool* fallback_used) {
    if (fallback_used) *fallback_used = false;
    auto verdict = gateway.invoke(TemplateId::TraceWeights,
                                  {{"TASK_TEXT", task_text}, {"REPORT_TEXT", report_text}});
    if (!verdict) {
        if (fallback_used) *fallback_used = true;
        return TraceTriple{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    }
    const auto& payload = verdict.value().parsed_payload;
    return TraceTriple{payload["w_con"].get<double>(), payload["w_cov"].get<double>(),
                       payload["w_fid"].get<double>()};
}

Result<double> vef_pass_rate(const std::vector<VefResult>& results) {
    if (results.empty())
        return Result<double>::fail("vef_pass_rate: empty result list");
    std::size_t passes = 0;
    for (const auto& r : results)
        if (r.final_pass) ++passes;
    double rate = 100.0 * static_cast<double>(passes) / static_cast<double>(results.size());
    return Result<double>::ok(std::round(rate * 100.0) / 100.0);
}

}  // namespace repeval

/// @file trace.hpp
/// @brief Evidence stage: claim-URL support judging, Con/Cov/Fid aggregation,
/// the strict visual-evidence gate, and the 0-100 TRACE score.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "repeval/common.hpp"
#include "repeval/fetch.hpp"
#include "repeval/judge.hpp"
#include "repeval/report.hpp"

namespace repeval {

/// Forced-FAIL threshold for the visual evidence check.
inline constexpr int kVefThreshold = 6;

enum class SupportLabel {
    Supported,
    Partial,
    MissingEvidence,
    Contradicted,
    OverSpecific,
    CausalInversion,
    Inaccessible,  // assigned from fetch status only, never by the judge
};

const char* to_string(SupportLabel label);
std::optional<SupportLabel> support_label_from_string(const std::string& name);

struct SupportJudgment {
    SupportLabel label = SupportLabel::MissingEvidence;
    std::string rationale;
};

/// One atomic claim aligned to one cited URL, with its fetch outcome and
/// support judgment. claim_key groups pairs belonging to the same claim.
struct ClaimUrlPair {
    std::string claim_text;
    std::string claim_key;
    int citation_index = 0;
    std::string url;  // empty when the cited index has no reference entry
    FetchStatus fetch_status = FetchStatus::Dead;
    bool accessible = false;
    SupportLabel label = SupportLabel::Inaccessible;
    std::string rationale;
};

struct VefResult {
    int raw_score = 0;
    bool raw_verdict_pass = false;
    bool forced_fail = false;  // threshold overrode a raw PASS
    bool final_pass = false;   // the binary indicator entering the score
    std::string reason;
    std::string gt_version;
};

/// Applies the threshold rule: raw_score < 6 forces FAIL regardless of the
/// raw verdict; a pass requires both.
VefResult make_vef_result(int raw_score, bool raw_verdict_pass, std::string reason,
                          std::string gt_version);

/// Metric order everywhere: con, cov, fid.
using TraceTriple = std::array<double, 3>;

/// Con = supported / judged; Cov = claims with an accessible source / all
/// claims; Fid = supported / (supported + contradicted + over_specific +
/// causal_inversion), 1 when that denominator is 0 but something was judged.
TraceTriple aggregate_citation_metrics(const std::vector<ClaimUrlPair>& pairs);

struct TraceBreakdown {
    TraceTriple metrics{};  // E_k
    TraceTriple weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    bool weights_fallback = false;
    VefResult vef;
    double lambda_vef = 0.4;
    int pair_count = 0;
    int accessible_pair_count = 0;
    double score = 0.0;  // 0..100
    std::vector<ClaimUrlPair> pairs;  // per-pair audit substrate
};

/// score = 100 * (lambda * pass_indicator + (1 - lambda) * sum_k W_k E_k).
TraceBreakdown trace_score(const TraceTriple& metrics, const TraceTriple& weights,
                           bool weights_fallback, const VefResult& vef, double lambda_vef);

/// Judge one accessible pair. Precondition: the evidence text came from an
/// ok fetch; inaccessible pairs never reach the judge.
Result<SupportJudgment> judge_pair_support(JudgeGateway& gateway, const std::string& claim_text,
                                           const std::string& url,
                                           const std::string& evidence_text);

/// Strict visual-evidence check against the task's textualized visual ground
/// truth. `segment` carries the image-referencing portion of the report.
Result<VefResult> vef_check(JudgeGateway& gateway, const std::string& segment,
                            const std::string& task_text, const std::string& visual_gt,
                            const std::string& report_text, const std::string& gt_version);

/// Task-adaptive weights over Con/Cov/Fid; uniform fallback on judge failure.
TraceTriple task_citation_weights(JudgeGateway& gateway, const std::string& task_text,
                                  const std::string& report_text, bool* fallback_used);

/// 100 * passes / total, reported to two decimals. Empty input is an error.
Result<double> vef_pass_rate(const std::vector<VefResult>& results);

}  // namespace repeval

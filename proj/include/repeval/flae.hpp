/// @file flae.hpp
/// @brief Report-quality stage: formula channel from text features, judge
/// channel, adaptive fusion, and the weighted 0-100 aggregate.

#pragma once

#include <array>
#include <map>
#include <string>

#include "repeval/common.hpp"
#include "repeval/features.hpp"
#include "repeval/judge.hpp"
#include "repeval/report.hpp"

namespace repeval {

/// Dimension order everywhere: read, insh, stru.
using DimTriple = std::array<double, 3>;

enum class AlphaSource { Judge, Deterministic };
const char* to_string(AlphaSource source);

/// Per-dimension linear coefficients over named feature fields plus a bias.
/// Shipped as a frozen, versioned constant set; identical version_id means
/// identical coefficients.
struct FormulaCoefficients {
    std::string version_id;
    std::array<std::map<std::string, double>, 3> coefficients;  // read/insh/stru
    std::array<double, 3> bias{};
};

/// The frozen v1 set.
const FormulaCoefficients& formula_coefficients_v1();

/// Key-value file form: "version = v1", "read.lexical_diversity = 2.6",
/// "read.bias = -0.8", ...
Result<FormulaCoefficients> parse_formula_coefficients(const std::string& file_body);
Result<FormulaCoefficients> load_formula_coefficients(const std::string& path);
std::string formula_coefficients_to_string(const FormulaCoefficients& coeffs);

/// s_d = clip(sigmoid(beta_d . phi_d + bias_d)) per dimension. Pure; fails
/// only when a coefficient names an unknown feature field.
Result<DimTriple> formula_scores(const FeatureVector& features,
                                 const FormulaCoefficients& coeffs);

/// Observable compliance signals in [0,1], derived from the feature vector
/// and citation map.
struct ComplianceSignals {
    double length_completeness = 0.0;   // L
    double heading_coverage = 0.0;      // H
    double citation_compliance = 0.0;   // C: resolved body markers / all body markers
    double reference_validity = 0.0;    // R_ref: 1 clean, 0.5 defective, 0 absent
};

ComplianceSignals compute_compliance_signals(const ReportDocument& doc, const CitationMap& map,
                                             const FeatureVector& features);

/// alpha_det = clip(1 - (0.35 L + 0.35 H + 0.20 C + 0.10 R_ref)).
double deterministic_alpha(const ComplianceSignals& signals);

struct FlaeBreakdown {
    DimTriple s_form{};
    DimTriple s_judge{};
    double alpha = 1.0;
    AlphaSource alpha_source = AlphaSource::Deterministic;
    DimTriple s_fused{};
    DimTriple weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    bool weights_fallback = false;  // judge weights unavailable, uniform used
    double score = 0.0;             // 0..100
};

/// Fuse channels and aggregate: s_fused = a*s_form + (1-a)*s_judge,
/// score = 100 * sum_d weights[d] * s_fused[d].
FlaeBreakdown flae_score(const DimTriple& s_form, const DimTriple& s_judge, double alpha,
                         AlphaSource alpha_source, const DimTriple& weights,
                         bool weights_fallback);

/// Judge-channel calls. Each returns the validated payload or the judge
/// failure signal for N/A handling.
Result<DimTriple> judge_dim_scores(JudgeGateway& gateway, const std::string& task_text,
                                   const std::string& report_text);
Result<double> judge_alpha(JudgeGateway& gateway, const std::string& task_text,
                           const std::string& report_text);
/// Falls back to uniform weights on judge failure (never fails).
DimTriple task_dim_weights(JudgeGateway& gateway, const std::string& task_text,
                           const std::string& report_text, bool* fallback_used);

}  // namespace repeval

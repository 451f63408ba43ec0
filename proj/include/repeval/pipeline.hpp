/// @file pipeline.hpp
/// @brief Per-report orchestration: gating, reason-aware N/A handling, and
/// the overall score.

#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "repeval/fetch.hpp"
#include "repeval/flae.hpp"
#include "repeval/judge.hpp"
#include "repeval/mosaic.hpp"
#include "repeval/task.hpp"
#include "repeval/trace.hpp"

namespace repeval {

inline constexpr int kRecordSchemaVersion = 1;

enum class NaStage { Flae, Trace, Mosaic, Generation };
enum class NaBucket {
    ModelFailure,
    PipelineFailure,
    SystemProviderFailure,
    DataAccessibilityFailure,
};

const char* to_string(NaStage stage);
const char* to_string(NaBucket bucket);
std::optional<NaStage> na_stage_from_string(const std::string& name);
std::optional<NaBucket> na_bucket_from_string(const std::string& name);

/// Fixed validity weight per bucket: model 0.0, pipeline 0.5,
/// system/provider 0.8, data accessibility 0.9.
double validity_weight(NaBucket bucket);

struct NaRecord {
    NaStage stage = NaStage::Generation;
    NaBucket bucket = NaBucket::ModelFailure;
    double validity_weight = 0.0;
    std::vector<std::string> evidence;
};

/// First-match priority over the signal list:
///   1. explicit API/infrastructure errors        -> system/provider (0.8)
///   2. blocked/paywalled/removed/non-extractable -> data accessibility (0.9)
///   3. internal exceptions, schema failures,
///      missing artifacts, module crashes         -> pipeline (0.5)
///   4. residual unusable output                  -> model (0.0)
/// Empty signal lists are a contract violation.
Result<NaRecord> assign_na_reason(NaStage stage, const std::vector<std::string>& signals);

enum class AlphaMode { Judge, Deterministic };

struct PipelineConfig {
    std::array<double, 3> module_weights{0.2, 0.5, 0.3};  // w_F, w_T, w_M
    double tau_f = 0.0;
    double tau_t = 0.0;
    double lambda_vef = 0.4;
    FormulaCoefficients coefficients = formula_coefficients_v1();
    FeatureConfig feature_config;
    JudgeBackendConfig judge_config;
    FetchPolicy fetch_policy;
    AlphaMode alpha_mode = AlphaMode::Judge;
    bool alpha_fallback = true;             // deterministic fallback on judge failure
    std::optional<double> alpha_override;   // pin alpha (fusion-endpoint runs)
    int workers = 1;
};

/// Weights must sum to 1 within 1e-9 and thresholds must be non-negative.
Result<bool> validate_config(const PipelineConfig& config);

/// Hash over every versioned input (prompts, coefficients, router rules,
/// feature config, judge backend, fetch mode, alpha mode, thresholds).
/// Module weights are deliberately excluded so reweighting runs stay
/// comparable.
std::string config_fingerprint(const PipelineConfig& config);

struct EvaluationRecord {
    std::string task_id;
    std::string report_id;
    std::string system_id;
    std::string gt_version;
    std::optional<FlaeBreakdown> flae;    // absent == N/A
    std::optional<TraceBreakdown> trace;  // absent == N/A
    std::optional<MosaicBreakdown> mosaic;
    std::vector<NaRecord> na_records;
    std::array<double, 3> module_weights{0.2, 0.5, 0.3};
    double overall = 0.0;
    std::string config_fingerprint;
};

/// Stage scores with N/A contributing zero.
double stage_score_flae(const EvaluationRecord& record);
double stage_score_trace(const EvaluationRecord& record);
double stage_score_mosaic(const EvaluationRecord& record);

/// w_F*S_F + w_T*S_T + w_M*S_M.
double overall_score(double s_f, double s_t, double s_m, const std::array<double, 3>& weights);

struct ReportJob {
    const TaskBundle* task;
    std::string system_id;
    std::string report_id;
    std::string raw_report;
};

class Pipeline {
public:
    Pipeline(PipelineConfig config, std::shared_ptr<JudgeBackend> backend);

    EvaluationRecord evaluate_report(const TaskBundle& task, const std::string& system_id,
                                     const std::string& report_id, const std::string& raw_report);

    /// Evaluates jobs with up to config.workers threads; output order matches
    /// input order regardless of scheduling.
    std::vector<EvaluationRecord> evaluate_set(const std::vector<ReportJob>& jobs);

    const PipelineConfig& config() const { return config_; }
    const std::string& fingerprint() const { return fingerprint_; }
    EvidenceFetcher& fetcher() { return fetcher_; }
    JudgeGateway& gateway() { return gateway_; }

private:
    PipelineConfig config_;
    JudgeGateway gateway_;
    EvidenceFetcher fetcher_;
    std::string fingerprint_;
};

}  // namespace repeval

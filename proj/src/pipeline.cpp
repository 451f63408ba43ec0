#include "repeval/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "repeval/text.hpp"

namespace repeval {

const char* to_string(NaStage stage) {
    switch (stage) {
        case NaStage::Flae: return "flae";
        case NaStage::Trace: return "trace";
        case NaStage::Mosaic: return "mosaic";
        case NaStage::Generation: return "generation";
    }
    return "unknown";
}

const char* to_string(NaBucket bucket) {
    switch (bucket) {
        case NaBucket::ModelFailure: return "model_failure";
        case NaBucket::PipelineFailure: return "pipeline_failure";
        case NaBucket::SystemProviderFailure: return "system_provider_failure";
        case NaBucket::DataAccessibilityFailure: return "data_accessibility_failure";
    }
    return "unknown";
}

std::optional<NaStage> na_stage_from_string(const std::string& name) {
    static const std::pair<const char*, NaStage> table[] = {
        {"flae", NaStage::Flae},
        {"trace", NaStage::Trace},
        {"mosaic", NaStage::Mosaic},
        {"generation", NaStage::Generation},
    };
    for (const auto& [key, value] : table)
        if (name == key) return value;
    return std::nullopt;
}

std::optional<NaBucket> na_bucket_from_string(const std::string& name) {
    static const std::pair<const char*, NaBucket> table[] = {
        {"model_failure", NaBucket::ModelFailure},
        {"pipeline_failure", NaBucket::PipelineFailure},
        {"system_provider_failure", NaBucket::SystemProviderFailure},
        {"data_accessibility_failure", NaBucket::DataAccessibilityFailure},
    };
    for (const auto& [key, value] : table)
        if (name == key) return value;
    return std::nullopt;
}

double validity_weight(NaBucket bucket) {
    switch (bucket) {
        case NaBucket::ModelFailure: return 0.0;
        case NaBucket::PipelineFailure: return 0.5;
        case NaBucket::SystemProviderFailure: return 0.8;
        case NaBucket::DataAccessibilityFailure: return 0.9;
    }
    return 0.0;
}

namespace {

// Keyword matchers for the priority rules, checked in order.
const char* kProviderKeywords[] = {"api error",        "api or infrastructure",
                                   "infrastructure",   "rate limit",
                                   "rate-limit",       "overload",
                                   "timeout",          "connection reset",
                                   "connection refused", "auth",
                                   "misconfigur",      "judge failure",
                                   "provider error",   "service unavailable"};

const char* kDataKeywords[] = {"dead link",      "blocked",        "paywall",
                               "region-restricted", "removed",     "non-extractable",
                               "non_extractable",  "expired url",  "requires login",
                               "login required",   "unreachable",  "unresolvable image",
                               "inaccessible"};

const char* kPipelineKeywords[] = {"exception",       "schema",          "parse failure",
                                   "parsing failure", "missing artifact", "module crash",
                                   "router failure",  "internal error",   "crash"};

bool any_signal_matches(const std::vector<std::string>& signals, const char* const* keywords,
                        size_t count) {
    for (const auto& signal : signals) {
        for (size_t i = 0; i < count; ++i) {
            if (contains_ci(signal, keywords[i])) return true;
        }
    }
    return false;
}

}  // namespace

Result<NaRecord> assign_na_reason(NaStage stage, const std::vector<std::string>& signals) {
    if (signals.empty())
        return Result<NaRecord>::fail("assign_na_reason: empty signal list");
    NaRecord record;
    record.stage = stage;
    record.evidence = signals;
    if (any_signal_matches(signals, kProviderKeywords, std::size(kProviderKeywords))) {
        record.bucket = NaBucket::SystemProviderFailure;
    } else if (any_signal_matches(signals, kDataKeywords, std::size(kDataKeywords))) {
        record.bucket = NaBucket::DataAccessibilityFailure;
    } else if (any_signal_matches(signals, kPipelineKeywords, std::size(kPipelineKeywords))) {
        record.bucket = NaBucket::PipelineFailure;
    } else {
        record.bucket = NaBucket::ModelFailure;
    }
    record.validity_weight = validity_weight(record.bucket);
    return Result<NaRecord>::ok(std::move(record));
}

Result<bool> validate_config(const PipelineConfig& config) {
    double sum = config.module_weights[0] + config.module_weights[1] + config.module_weights[2];
    if (std::abs(sum - 1.0) > 1e-9)
        return Result<bool>::fail("config: module weights must sum to 1");
    for (double w : config.module_weights)
        if (w < 0.0) return Result<bool>::fail("config: module weights must be non-negative");
    if (config.tau_f < 0.0 || config.tau_t < 0.0)
        return Result<bool>::fail("config: thresholds must be non-negative");
    if (config.lambda_vef < 0.0 || config.lambda_vef > 1.0)
        return Result<bool>::fail("config: lambda_vef must lie in [0,1]");
    if (config.alpha_override && (*config.alpha_override < 0.0 || *config.alpha_override > 1.0))
        return Result<bool>::fail("config: alpha override must lie in [0,1]");
    if (config.workers < 1) return Result<bool>::fail("config: workers must be >= 1");
    return Result<bool>::ok(true);
}

std::string config_fingerprint(const PipelineConfig& config) {
    std::string blob;
    blob += "prompts=" + std::string(kPromptVersion) + ";";
    blob += "router=" + std::string(kRouterVersion) + ";";
    blob += "schema=" + std::to_string(kRecordSchemaVersion) + ";";
    blob += "coeffs=" + config.coefficients.version_id + ";";
    blob += formula_coefficients_to_string(config.coefficients) + ";";
    blob += feature_config_to_string(config.feature_config) + ";";
    blob += "tau_f=" + std::to_string(config.tau_f) + ";";
    blob += "tau_t=" + std::to_string(config.tau_t) + ";";
    blob += "lambda=" + std::to_string(config.lambda_vef) + ";";
    blob += "alpha_mode=" + std::string(config.alpha_mode == AlphaMode::Judge ? "judge"
                                                                              : "deterministic") + ";";
    blob += "alpha_fallback=" + std::to_string(config.alpha_fallback) + ";";
    if (config.alpha_override) blob += "alpha_override=" + std::to_string(*config.alpha_override) + ";";
    blob += "backend=" + config.judge_config.backend_id + ";";
    blob += "model=" + config.judge_config.model_identifier + ";";
    blob += "temperature=" + std::to_string(config.judge_config.temperature) + ";";
    blob += "offline=" + std::to_string(config.fetch_policy.offline) + ";";
    return hex64(fnv1a64(blob));
}

double stage_score_flae(const EvaluationRecord& record) {
    return record.flae ? record.flae->score : 0.0;
}
double stage_score_trace(const EvaluationRecord& record) {
    return record.trace ? record.trace->score : 0.0;
}
double stage_score_mosaic(const EvaluationRecord& record) {
    return record.mosaic ? record.mosaic->score : 0.0;
}

double overall_score(double s_f, double s_t, double s_m, const std::array<double, 3>& weights) {
    return weights[0] * s_f + weights[1] * s_t + weights[2] * s_m;
}

// =============================================================================
// Pipeline
// =============================================================================

Pipeline::Pipeline(PipelineConfig config, std::shared_ptr<JudgeBackend> backend)
    : config_(std::move(config)),
      gateway_(std::move(backend), config_.judge_config),
      fetcher_(config_.fetch_policy),
      fingerprint_(repeval::config_fingerprint(config_)) {}

EvaluationRecord Pipeline::evaluate_report(const TaskBundle& task, const std::string& system_id,
                                           const std::string& report_id,
                                           const std::string& raw_report) {
    EvaluationRecord record;
    record.task_id = task.task_id;
    record.report_id = report_id;
    record.system_id = system_id;
    record.gt_version = task.gt_version;
    record.module_weights = config_.module_weights;
    record.config_fingerprint = fingerprint_;

    ReportDocument doc = parse_report(raw_report);
    CitationMap map = build_citation_map(doc);
    FeatureVector features = compute_text_features(doc, config_.feature_config);
    ComplianceSignals signals = compute_compliance_signals(doc, map, features);

    // The image-referencing portion of the report, bound into the visual
    // evidence check as the segment under scrutiny.
    std::vector<MmItem> mm_items = extract_mm_items(doc);
    std::string mm_segment;
    for (const auto& item : mm_items) {
        if (item.claim_text.empty()) continue;
        if (!mm_segment.empty()) mm_segment += "\n";
        mm_segment += item.claim_text;
    }
    if (mm_segment.empty()) mm_segment = "(no image-referencing statements)";

    // ---- FLAE -------------------------------------------------------------
    {
        std::vector<std::string> stage_signals;
        bool stage_ok = true;

        DimTriple s_form{};
        auto formula = formula_scores(features, config_.coefficients);
        if (formula) {
            s_form = formula.value();
        } else {
            stage_signals.push_back("internal error: " + formula.error());
            stage_ok = false;
        }

        double alpha = 1.0;
        AlphaSource alpha_source = AlphaSource::Deterministic;
        if (stage_ok) {
            if (config_.alpha_override) {
                alpha = *config_.alpha_override;
            } else if (config_.alpha_mode == AlphaMode::Judge) {
                auto judged = judge_alpha(gateway_, task.query, raw_report);
                if (judged) {
                    alpha = judged.value();
                    alpha_source = AlphaSource::Judge;
                } else if (config_.alpha_fallback) {
                    alpha = deterministic_alpha(signals);
                } else {
                    stage_signals.push_back(judged.error());
                    stage_ok = false;
                }
            } else {
                alpha = deterministic_alpha(signals);
            }
        }

        DimTriple s_judge{};
        if (stage_ok && alpha < 1.0) {
            auto judged = judge_dim_scores(gateway_, task.query, raw_report);
            if (judged) {
                s_judge = judged.value();
            } else {
                stage_signals.push_back(judged.error());
                stage_ok = false;
            }
        }

        if (stage_ok) {
            bool weights_fallback = false;
            DimTriple weights =
                task_dim_weights(gateway_, task.query, raw_report, &weights_fallback);
            record.flae =
                flae_score(s_form, s_judge, alpha, alpha_source, weights, weights_fallback);
        } else {
            auto na = assign_na_reason(NaStage::Flae, stage_signals);
            if (na) record.na_records.push_back(na.take());
        }
    }

    // ---- TRACE ------------------------------------------------------------
    {
        std::vector<std::string> stage_signals;
        bool stage_ok = true;

        if (doc.word_count == 0) {
            stage_signals.push_back("empty report");
            stage_ok = false;
        }

        std::vector<ClaimUrlPair> pairs;
        if (stage_ok) {
            auto claims = extract_claims(doc, map);
            for (const auto& claim : claims) {
                ClaimUrlPair pair;
                pair.claim_text = claim.claim_text;
                pair.claim_key = normalize_for_dedup(claim.claim_text);
                pair.citation_index = claim.cited_indices.front();
                auto it = map.entries.find(pair.citation_index);
                if (it == map.entries.end()) {
                    pair.url.clear();
                    pair.fetch_status = FetchStatus::Dead;
                    pair.accessible = false;
                    pair.label = SupportLabel::Inaccessible;
                    pair.rationale = "citation index has no reference entry";
                    pairs.push_back(std::move(pair));
                    continue;
                }
                pair.url = it->second;
                FetchRecord fetched = fetcher_.fetch(pair.url);
                pair.fetch_status = fetched.status;
                pair.accessible = fetched.status == FetchStatus::Ok;
                if (!pair.accessible) {
                    pair.label = SupportLabel::Inaccessible;
                    pair.rationale = std::string("fetch status: ") + to_string(fetched.status);
                    pairs.push_back(std::move(pair));
                    continue;
                }
                auto judgment = judge_pair_support(gateway_, pair.claim_text, pair.url,
                                                   *fetched.extracted_text);
                if (!judgment) {
                    stage_signals.push_back(judgment.error());
                    stage_ok = false;
                    break;
                }
                pair.label = judgment.value().label;
                pair.rationale = judgment.value().rationale;
                pairs.push_back(std::move(pair));
            }
        }

        std::optional<VefResult> vef;
        if (stage_ok) {
            auto checked = vef_check(gateway_, mm_segment, task.query, task.visual_gt,
                                     raw_report, task.gt_version);
            if (checked) {
                vef = checked.take();
            } else {
                stage_signals.push_back(checked.error());
                stage_ok = false;
            }
        }

        if (stage_ok) {
            TraceTriple metrics = aggregate_citation_metrics(pairs);
            bool weights_fallback = false;
            TraceTriple weights =
                task_citation_weights(gateway_, task.query, raw_report, &weights_fallback);
            TraceBreakdown breakdown =
                trace_score(metrics, weights, weights_fallback, *vef, config_.lambda_vef);
            breakdown.pair_count = static_cast<int>(pairs.size());
            breakdown.accessible_pair_count = static_cast<int>(
                std::count_if(pairs.begin(), pairs.end(),
                              [](const ClaimUrlPair& p) { return p.accessible; }));
            breakdown.pairs = std::move(pairs);
            record.trace = std::move(breakdown);
        } else {
            auto na = assign_na_reason(NaStage::Trace, stage_signals);
            if (na) record.na_records.push_back(na.take());
        }
    }

    // ---- Gate & MOSAIC ----------------------------------------------------
    const double s_f = stage_score_flae(record);
    const double s_t = stage_score_trace(record);
    const bool gate_open = record.flae.has_value() && record.trace.has_value() &&
                           s_f >= config_.tau_f && s_t >= config_.tau_t;

    if (!gate_open) {
        record.mosaic = mosaic_score({}, false);
    } else {
        std::vector<std::string> stage_signals;
        bool stage_ok = true;
        std::vector<ItemJudgment> judgments;
        for (const auto& item : mm_items) {
            auto routed = route_item(item, task.images);
            if (!routed) {
                stage_signals.push_back(routed.error());
                continue;  // unresolvable item; remaining items still count
            }
            auto judged = judge_item(gateway_, item, routed.value(), task.query);
            if (!judged) {
                stage_signals.push_back(judged.error());
                stage_ok = false;
                break;
            }
            judgments.push_back(judged.take());
        }

        if (!stage_ok || (judgments.empty() && !stage_signals.empty())) {
            auto na = assign_na_reason(NaStage::Mosaic, stage_signals);
            if (na) record.na_records.push_back(na.take());
            if (stage_ok) record.mosaic = mosaic_score({}, true);  // all items unresolvable
        } else {
            record.mosaic = mosaic_score(judgments, true);
            if (record.mosaic->no_items) {
                auto na = assign_na_reason(NaStage::Mosaic, {"no multimodal items extracted"});
                if (na) record.na_records.push_back(na.take());
            } else if (!stage_signals.empty()) {
                auto na = assign_na_reason(NaStage::Mosaic, stage_signals);
                if (na) record.na_records.push_back(na.take());
            }
        }
    }

    record.overall = overall_score(s_f, s_t, stage_score_mosaic(record), config_.module_weights);
    return record;
}

std::vector<EvaluationRecord> Pipeline::evaluate_set(const std::vector<ReportJob>& jobs) {
    std::vector<EvaluationRecord> records(jobs.size());
    const int workers = std::min<int>(config_.workers, static_cast<int>(jobs.size()));
    if (workers <= 1) {
        for (size_t i = 0; i < jobs.size(); ++i) {
            records[i] = evaluate_report(*jobs[i].task, jobs[i].system_id, jobs[i].report_id,
                                         jobs[i].raw_report);
        }
        return records;
    }
    std::atomic<size_t> next{0};
    auto worker = [&] {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            records[i] = evaluate_report(*jobs[i].task, jobs[i].system_id, jobs[i].report_id,
                                         jobs[i].raw_report);
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(workers));
    for (int i = 0; i < workers; ++i) threads.emplace_back(worker);
    for (auto& thread : threads) thread.join();
    return records;
}

}  // namespace repeval

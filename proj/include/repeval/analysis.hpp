/// @file analysis.hpp
/// @brief Robustness and consistency tooling over stored records: weight
/// sweeps, domain breakdowns, and evaluator-human agreement metrics.

#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "repeval/common.hpp"
#include "repeval/pipeline.hpp"
#include "repeval/task.hpp"

namespace repeval {

/// Per-system mean overall under one weight triple, with the descending
/// ranking (ties broken by system id).
struct RankingRow {
    std::array<int, 3> triple{};          // integer weights, e.g. (2,5,3)
    std::array<double, 3> weights{};      // triple / sum
    std::vector<std::string> ranking;     // best first
    std::map<std::string, double> mean_overall;
};

/// All non-negative integer triples summing to `total` (default 10).
std::vector<std::array<int, 3>> integer_weight_triples(int total = 10);

/// Recompute per-system mean overall from stored stage scores (no
/// re-judging) for one weight vector.
Result<RankingRow> rank_systems(const std::vector<EvaluationRecord>& records,
                                const std::array<double, 3>& weights);

struct SweepResult {
    std::vector<RankingRow> rows;
    std::string default_top;             // top system under the records' weights
    std::vector<std::array<int, 3>> top_flips;      // triples whose top differs
    std::vector<std::array<int, 3>> ranking_flips;  // triples whose full ranking differs
};

/// Requires that all records share one config fingerprint (module weights
/// excluded from the fingerprint by construction).
Result<SweepResult> weight_sweep(const std::vector<EvaluationRecord>& records,
                                 const std::vector<std::array<int, 3>>& grid);

struct BreakdownRow {
    std::string domain;
    std::string regime;
    std::size_t count = 0;
    double mean_overall = 0.0;
    double mean_flae = 0.0;
    double mean_trace = 0.0;
    double mean_mosaic = 0.0;
};

/// Mean scores grouped by (domain, regime); empty groups never appear.
/// A record whose task_id is not in `tasks` is a contract violation.
/// `regime_filter` empty means all regimes.
Result<std::vector<BreakdownRow>> domain_breakdown(const std::vector<EvaluationRecord>& records,
                                                   const std::vector<TaskBundle>& tasks,
                                                   const std::string& regime_filter = "");

struct PairPreference {
    std::string pair_id;
    std::string winner;
};

/// PAR: 100 * matching preferences / total pairs. The two lists must cover
/// the same pair ids.
Result<double> pairwise_agreement(const std::vector<PairPreference>& evaluator,
                                  const std::vector<PairPreference>& human);

/// Pearson correlation; zero variance or fewer than two points is an error.
Result<double> pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);

struct AgreementResult {
    double par = 0.0;  // percentage
    double opc = 0.0;  // Pearson in [-1,1]
};

/// Score maps are keyed by system id and aligned by key; both metrics
/// computed together.
Result<AgreementResult> agreement_metrics(const std::vector<PairPreference>& evaluator_prefs,
                                          const std::vector<PairPreference>& human_prefs,
                                          const std::map<std::string, double>& evaluator_scores,
                                          const std::map<std::string, double>& human_scores);

}  // namespace repeval

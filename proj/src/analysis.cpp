#include "repeval/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace repeval {

std::vector<std::array<int, 3>> integer_weight_triples(int total) {
    std::vector<std::array<int, 3>> triples;
    for (int a = 0; a <= total; ++a) {
        for (int b = 0; a + b <= total; ++b) {
            triples.push_back({a, b, total - a - b});
        }
    }
    return triples;
}

Result<RankingRow> rank_systems(const std::vector<EvaluationRecord>& records,
                                const std::array<double, 3>& weights) {
    if (records.empty()) return Result<RankingRow>::fail("rank_systems: no records");

    std::map<std::string, std::pair<double, std::size_t>> totals;  // system -> (sum, count)
    for (const auto& record : records) {
        double overall = overall_score(stage_score_flae(record), stage_score_trace(record),
                                       stage_score_mosaic(record), weights);
        auto& slot = totals[record.system_id];
        slot.first += overall;
        slot.second += 1;
    }

    RankingRow row;
    row.weights = weights;
    for (const auto& [system, sum_count] : totals)
        row.mean_overall[system] = sum_count.first / static_cast<double>(sum_count.second);
    for (const auto& [system, mean] : row.mean_overall) {
        (void)mean;
        row.ranking.push_back(system);
    }
    std::sort(row.ranking.begin(), row.ranking.end(),
              [&](const std::string& a, const std::string& b) {
                  double ma = row.mean_overall[a];
                  double mb = row.mean_overall[b];
                  if (ma != mb) return ma > mb;
                  return a < b;
              });
    return Result<RankingRow>::ok(std::move(row));
}

Result<SweepResult> weight_sweep(const std::vector<EvaluationRecord>& records,
                                 const std::vector<std::array<int, 3>>& grid) {
    if (records.empty()) return Result<SweepResult>::fail("weight_sweep: no records");
    const std::string& fingerprint = records.front().config_fingerprint;
    for (const auto& record : records) {
        if (record.config_fingerprint != fingerprint)
            return Result<SweepResult>::fail(
                "weight_sweep: records span multiple config fingerprints");
    }

    auto default_row = rank_systems(records, records.front().module_weights);
    if (!default_row) return Result<SweepResult>::fail(default_row.error());

    SweepResult result;
    result.default_top = default_row.value().ranking.front();
    for (const auto& triple : grid) {
        int total = triple[0] + triple[1] + triple[2];
        if (total <= 0) return Result<SweepResult>::fail("weight_sweep: zero-sum triple");
        std::array<double, 3> weights = {static_cast<double>(triple[0]) / total,
                                         static_cast<double>(triple[1]) / total,
                                         static_cast<double>(triple[2]) / total};
        auto row = rank_systems(records, weights);
        if (!row) return Result<SweepResult>::fail(row.error());
        row.value().triple = triple;
        if (row.value().ranking.front() != result.default_top) result.top_flips.push_back(triple);
        if (row.value().ranking != default_row.value().ranking)
            result.ranking_flips.push_back(triple);
        result.rows.push_back(row.take());
    }
    return Result<SweepResult>::ok(std::move(result));
}

Result<std::vector<BreakdownRow>> domain_breakdown(const std::vector<EvaluationRecord>& records,
                                                   const std::vector<TaskBundle>& tasks,
                                                   const std::string& regime_filter) {
    std::map<std::string, std::pair<std::string, std::string>> meta;  // id -> (domain, regime)
    for (const auto& task : tasks) meta[task.task_id] = {task.domain, task.regime};

    struct Accum {
        std::size_t count = 0;
        double overall = 0, flae = 0, trace = 0, mosaic = 0;
    };
    std::map<std::pair<std::string, std::string>, Accum> groups;

    for (const auto& record : records) {
        auto it = meta.find(record.task_id);
        if (it == meta.end())
            return Result<std::vector<BreakdownRow>>::fail(
                "domain_breakdown: unknown task_id " + record.task_id);
        const auto& [domain, regime] = it->second;
        if (!regime_filter.empty() && regime != regime_filter) continue;
        auto& accum = groups[{domain, regime}];
        accum.count += 1;
        accum.overall += record.overall;
        accum.flae += stage_score_flae(record);
        accum.trace += stage_score_trace(record);
        accum.mosaic += stage_score_mosaic(record);
    }

    std::vector<BreakdownRow> rows;
    for (const auto& [key, accum] : groups) {
        BreakdownRow row;
        row.domain = key.first;
        row.regime = key.second;
        row.count = accum.count;
        double n = static_cast<double>(accum.count);
        row.mean_overall = accum.overall / n;
        row.mean_flae = accum.flae / n;
        row.mean_trace = accum.trace / n;
        row.mean_mosaic = accum.mosaic / n;
        rows.push_back(std::move(row));
    }
    return Result<std::vector<BreakdownRow>>::ok(std::move(rows));
}

Result<double> pairwise_agreement(const std::vector<PairPreference>& evaluator,
                                  const std::vector<PairPreference>& human) {
    if (evaluator.empty() || human.empty())
        return Result<double>::fail("pairwise_agreement: empty preference list");

    std::map<std::string, std::string> human_by_id;
    for (const auto& pref : human) {
        if (!human_by_id.emplace(pref.pair_id, pref.winner).second)
            return Result<double>::fail("pairwise_agreement: duplicate pair id " + pref.pair_id);
    }
    std::set<std::string> eval_ids;
    std::size_t matches = 0;
    for (const auto& pref : evaluator) {
        if (!eval_ids.insert(pref.pair_id).second)
            return Result<double>::fail("pairwise_agreement: duplicate pair id " + pref.pair_id);
        auto it = human_by_id.find(pref.pair_id);
        if (it == human_by_id.end())
            return Result<double>::fail("pairwise_agreement: pair id " + pref.pair_id +
                                        " missing from human list");
        if (it->second == pref.winner) ++matches;
    }
    if (eval_ids.size() != human_by_id.size())
        return Result<double>::fail("pairwise_agreement: preference lists are not aligned");
    return Result<double>::ok(100.0 * static_cast<double>(matches) /
                              static_cast<double>(evaluator.size()));
}

Result<double> pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        return Result<double>::fail("pearson: vectors differ in length");
    if (x.size() < 2) return Result<double>::fail("pearson: need at least two points");
    const double n = static_cast<double>(x.size());
    double mean_x = 0, mean_y = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= n;
    mean_y /= n;
    double cov = 0, var_x = 0, var_y = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mean_x;
        double dy = y[i] - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if (var_x == 0.0 || var_y == 0.0)
        return Result<double>::fail("pearson: zero-variance input");
    return Result<double>::ok(cov / std::sqrt(var_x * var_y));
}

Result<AgreementResult> agreement_metrics(const std::vector<PairPreference>& evaluator_prefs,
                                          const std::vector<PairPreference>& human_prefs,
                                          const std::map<std::string, double>& evaluator_scores,
                                          const std::map<std::string, double>& human_scores) {
    auto par = pairwise_agreement(evaluator_prefs, human_prefs);
    if (!par) return Result<AgreementResult>::fail(par.error());

    if (evaluator_scores.size() != human_scores.size())
        return Result<AgreementResult>::fail("agreement: score maps are not aligned");
    std::vector<double> x, y;
    for (const auto& [system, score] : evaluator_scores) {
        auto it = human_scores.find(system);
        if (it == human_scores.end())
            return Result<AgreementResult>::fail("agreement: system " + system +
                                                 " missing from human scores");
        x.push_back(score);
        y.push_back(it->second);
    }
    auto opc = pearson_correlation(x, y);
    if (!opc) return Result<AgreementResult>::fail(opc.error());

    AgreementResult result;
    result.par = par.value();
    result.opc = opc.value();
    return Result<AgreementResult>::ok(result);
}

}  // namespace repeval

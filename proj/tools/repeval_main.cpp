/// @file repeval_main.cpp
/// @brief CLI: evaluate, rescore, sweep, breakdown, agree, audit-export.
///
/// Exit codes: 0 success, 1 validation error, 2 configuration error.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "repeval/analysis.hpp"
#include "repeval/pipeline.hpp"
#include "repeval/records.hpp"
#include "repeval/task.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace repeval;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConfiguration = 2;

int fail_validation(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return kExitValidation;
}

int fail_configuration(const std::string& message) {
    std::cerr << "configuration error: " << message << "\n";
    return kExitConfiguration;
}

Result<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return Result<std::string>::fail("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return Result<std::string>::ok(buffer.str());
}

bool parse_weight_list(const std::string& text, std::array<double, 3>* out) {
    std::istringstream in(text);
    std::string piece;
    size_t i = 0;
    while (std::getline(in, piece, ',')) {
        if (i >= 3) return false;
        try {
            (*out)[i++] = std::stod(piece);
        } catch (...) {
            return false;
        }
    }
    return i == 3;
}

/// Reports live at <reports>/<system_id>/<task_id>.md (or .txt).
struct ReportFile {
    std::string system_id;
    std::string task_id;
    std::string path;
};

std::vector<ReportFile> discover_reports(const std::string& reports_dir) {
    std::vector<ReportFile> found;
    std::error_code ec;
    for (const auto& system_entry : fs::directory_iterator(reports_dir, ec)) {
        if (!system_entry.is_directory()) continue;
        for (const auto& report_entry : fs::directory_iterator(system_entry.path(), ec)) {
            if (!report_entry.is_regular_file()) continue;
            auto ext = report_entry.path().extension().string();
            if (ext != ".md" && ext != ".txt") continue;
            found.push_back({system_entry.path().filename().string(),
                             report_entry.path().stem().string(),
                             report_entry.path().string()});
        }
    }
    std::sort(found.begin(), found.end(), [](const ReportFile& a, const ReportFile& b) {
        if (a.system_id != b.system_id) return a.system_id < b.system_id;
        return a.task_id < b.task_id;
    });
    return found;
}

Result<std::vector<PairPreference>> read_preferences(const std::string& path) {
    auto body = read_file(path);
    if (!body) return Result<std::vector<PairPreference>>::fail(body.error());
    std::vector<PairPreference> prefs;
    std::istringstream in(body.value());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("pair_id") || !j.contains("winner"))
            return Result<std::vector<PairPreference>>::fail(
                "preference lines need pair_id and winner: " + path);
        prefs.push_back({j["pair_id"].get<std::string>(), j["winner"].get<std::string>()});
    }
    return Result<std::vector<PairPreference>>::ok(std::move(prefs));
}

Result<std::map<std::string, double>> read_scores(const std::string& path) {
    auto body = read_file(path);
    if (!body) return Result<std::map<std::string, double>>::fail(body.error());
    std::map<std::string, double> scores;
    std::istringstream in(body.value());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("system_id") || !j.contains("score"))
            return Result<std::map<std::string, double>>::fail(
                "score lines need system_id and score: " + path);
        scores[j["system_id"].get<std::string>()] = j["score"].get<double>();
    }
    return Result<std::map<std::string, double>>::ok(std::move(scores));
}

void print_ranking(const RankingRow& row) {
    std::cout << std::fixed << std::setprecision(4);
    for (size_t i = 0; i < row.ranking.size(); ++i) {
        const auto& system = row.ranking[i];
        std::cout << (i + 1) << ". " << system << "  " << row.mean_overall.at(system) << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multimodal research-report evaluation engine"};
    app.require_subcommand(1);

    // ---- evaluate -----------------------------------------------------------
    auto* evaluate = app.add_subcommand("evaluate", "Score reports against task bundles");
    std::string tasks_dir, reports_dir, out_path, audit_path;
    std::string judge_kind = "mock", alpha_flag = "judge", coeffs_path, feature_config_path;
    std::string cache_dir, weights_flag;
    std::uint64_t mock_seed = 7;
    bool offline = false;
    double timeout_s = 10.0;
    int max_retries = 1, workers = 1;
    evaluate->add_option("--tasks", tasks_dir, "Task bundle directory")->required();
    evaluate->add_option("--reports", reports_dir,
                         "Reports directory (<system>/<task_id>.md)")->required();
    evaluate->add_option("--out", out_path, "Records file to write")->required();
    evaluate->add_option("--audit", audit_path, "Also write the per-pair audit log here");
    evaluate->add_option("--judge", judge_kind, "Judge backend: mock | http");
    evaluate->add_option("--mock-seed", mock_seed, "Seed for the mock judge");
    evaluate->add_option("--alpha", alpha_flag,
                         "Fusion coefficient: judge | deterministic | number in [0,1]");
    std::string coeff_version = "v1";
    evaluate->add_option("--coeffs", coeffs_path, "Formula coefficients file");
    evaluate->add_option("--coeff-version", coeff_version,
                         "Shipped coefficient set to use (default v1)");
    evaluate->add_option("--feature-config", feature_config_path, "Feature config file");
    evaluate->add_option("--weights", weights_flag,
                         "Module weights wF,wT,wM (default 0.2,0.5,0.3)");
    evaluate->add_option("--cache-dir", cache_dir, "Evidence cache directory");
    evaluate->add_flag("--offline", offline, "Cache-only mode; misses become timeouts");
    evaluate->add_option("--timeout", timeout_s, "Fetch timeout in seconds");
    evaluate->add_option("--max-retries", max_retries, "Fetch retry count");
    evaluate->add_option("--workers", workers, "Concurrent report evaluations");

    // ---- rescore ------------------------------------------------------------
    auto* rescore = app.add_subcommand("rescore", "Re-rank stored records under new weights");
    std::string rescore_records, rescore_weights;
    rescore->add_option("--records", rescore_records, "Records file")->required();
    rescore->add_option("--weights", rescore_weights, "Module weights wF,wT,wM")->required();

    // ---- sweep ----------------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "Rank stability over integer weight triples");
    std::string sweep_records;
    int sweep_total = 10;
    sweep->add_option("--records", sweep_records, "Records file")->required();
    sweep->add_option("--sum", sweep_total, "Integer triple total (default 10)");

    // ---- breakdown ------------------------------------------------------------
    auto* breakdown = app.add_subcommand("breakdown", "Per-domain / per-regime mean scores");
    std::string breakdown_records, breakdown_tasks, regime_filter;
    breakdown->add_option("--records", breakdown_records, "Records file")->required();
    breakdown->add_option("--tasks", breakdown_tasks, "Task bundle directory")->required();
    breakdown->add_option("--regime", regime_filter, "Restrict to one regime");

    // ---- agree ----------------------------------------------------------------
    auto* agree = app.add_subcommand("agree", "Evaluator-human agreement (PAR / OPC)");
    std::string eval_prefs_path, human_prefs_path, eval_scores_path, human_scores_path;
    agree->add_option("--eval-prefs", eval_prefs_path, "Evaluator preferences JSONL")->required();
    agree->add_option("--human-prefs", human_prefs_path, "Human preferences JSONL")->required();
    agree->add_option("--eval-scores", eval_scores_path, "Evaluator system scores JSONL")
        ->required();
    agree->add_option("--human-scores", human_scores_path, "Human system scores JSONL")
        ->required();

    // ---- audit-export ----------------------------------------------------------
    auto* audit_export = app.add_subcommand("audit-export", "Per-pair audit log from records");
    std::string audit_records, audit_out;
    audit_export->add_option("--records", audit_records, "Records file")->required();
    audit_export->add_option("--out", audit_out, "Audit JSONL to write")->required();

    CLI11_PARSE(app, argc, argv);

    if (evaluate->parsed()) {
        PipelineConfig config;
        if (!weights_flag.empty() && !parse_weight_list(weights_flag, &config.module_weights))
            return fail_configuration("--weights expects three comma-separated numbers");
        if (!coeffs_path.empty()) {
            auto coeffs = load_formula_coefficients(coeffs_path);
            if (!coeffs) return fail_configuration(coeffs.error());
            config.coefficients = coeffs.take();
        } else if (coeff_version == "v1") {
            config.coefficients = formula_coefficients_v1();
        } else {
            return fail_configuration("unknown coefficient version: " + coeff_version);
        }
        if (!feature_config_path.empty()) {
            auto feature_config = load_feature_config(feature_config_path);
            if (!feature_config) return fail_configuration(feature_config.error());
            config.feature_config = feature_config.take();
        }
        if (alpha_flag == "judge") {
            config.alpha_mode = AlphaMode::Judge;
        } else if (alpha_flag == "deterministic") {
            config.alpha_mode = AlphaMode::Deterministic;
        } else {
            try {
                config.alpha_override = std::stod(alpha_flag);
            } catch (...) {
                return fail_configuration("--alpha expects judge, deterministic, or a number");
            }
        }
        config.fetch_policy.cache_dir = cache_dir;
        config.fetch_policy.offline = offline;
        config.fetch_policy.timeout_s = timeout_s;
        config.fetch_policy.max_retries = max_retries;
        config.workers = workers;

        std::shared_ptr<JudgeBackend> backend;
        if (judge_kind == "mock") {
            config.judge_config.backend_id = "mock";
            backend = std::make_shared<MockJudge>(mock_seed);
            config.judge_config.model_identifier = backend->id();
        } else if (judge_kind == "http") {
            config.judge_config.backend_id = "http";
            backend = make_http_judge(config.judge_config);
        } else {
            return fail_configuration("--judge expects mock or http");
        }
        if (auto valid = validate_config(config); !valid)
            return fail_configuration(valid.error());

        auto tasks = load_task_set(tasks_dir);
        if (!tasks) return fail_validation(tasks.error());
        std::map<std::string, const TaskBundle*> by_id;
        for (const auto& task : tasks.value()) by_id[task.task_id] = &task;

        auto reports = discover_reports(reports_dir);
        if (reports.empty()) return fail_validation("no reports found under " + reports_dir);

        std::vector<ReportJob> jobs;
        for (const auto& report : reports) {
            auto it = by_id.find(report.task_id);
            if (it == by_id.end())
                return fail_validation("report " + report.path + " names unknown task " +
                                       report.task_id);
            auto body = read_file(report.path);
            if (!body) return fail_validation(body.error());
            jobs.push_back({it->second, report.system_id,
                            report.system_id + "/" + report.task_id, body.take()});
        }

        Pipeline pipeline(config, backend);
        auto records = pipeline.evaluate_set(jobs);
        if (auto written = write_records_file(out_path, records); !written)
            return fail_validation(written.error());
        if (!audit_path.empty()) {
            if (auto written = write_audit_file(audit_path, records); !written)
                return fail_validation(written.error());
        }
        std::cout << "wrote " << records.size() << " records to " << out_path << "\n";
        return kExitOk;
    }

    if (rescore->parsed()) {
        std::array<double, 3> weights{};
        if (!parse_weight_list(rescore_weights, &weights))
            return fail_configuration("--weights expects three comma-separated numbers");
        auto records = read_records_file(rescore_records);
        if (!records) return fail_validation(records.error());
        auto row = rank_systems(records.value(), weights);
        if (!row) return fail_validation(row.error());
        print_ranking(row.value());
        return kExitOk;
    }

    if (sweep->parsed()) {
        auto records = read_records_file(sweep_records);
        if (!records) return fail_validation(records.error());
        auto result = weight_sweep(records.value(), integer_weight_triples(sweep_total));
        if (!result) return fail_validation(result.error());
        std::cout << "default top system: " << result.value().default_top << "\n";
        std::cout << std::fixed << std::setprecision(4);
        for (const auto& row : result.value().rows) {
            std::cout << "(" << row.triple[0] << "," << row.triple[1] << "," << row.triple[2]
                      << ")";
            for (const auto& system : row.ranking)
                std::cout << " " << system << "=" << row.mean_overall.at(system);
            std::cout << "\n";
        }
        std::cout << "top flips: " << result.value().top_flips.size()
                  << ", ranking flips: " << result.value().ranking_flips.size() << "\n";
        return kExitOk;
    }

    if (breakdown->parsed()) {
        auto records = read_records_file(breakdown_records);
        if (!records) return fail_validation(records.error());
        auto tasks = load_task_set(breakdown_tasks);
        if (!tasks) return fail_validation(tasks.error());
        auto rows = domain_breakdown(records.value(), tasks.value(), regime_filter);
        if (!rows) return fail_validation(rows.error());
        std::cout << std::fixed << std::setprecision(2);
        for (const auto& row : rows.value()) {
            std::cout << row.domain << " / " << row.regime << " (n=" << row.count
                      << "): overall " << row.mean_overall << ", flae " << row.mean_flae
                      << ", trace " << row.mean_trace << ", mosaic " << row.mean_mosaic << "\n";
        }
        return kExitOk;
    }

    if (agree->parsed()) {
        auto eval_prefs = read_preferences(eval_prefs_path);
        if (!eval_prefs) return fail_validation(eval_prefs.error());
        auto human_prefs = read_preferences(human_prefs_path);
        if (!human_prefs) return fail_validation(human_prefs.error());
        auto eval_scores = read_scores(eval_scores_path);
        if (!eval_scores) return fail_validation(eval_scores.error());
        auto human_scores = read_scores(human_scores_path);
        if (!human_scores) return fail_validation(human_scores.error());
        auto result = agreement_metrics(eval_prefs.value(), human_prefs.value(),
                                        eval_scores.value(), human_scores.value());
        if (!result) return fail_validation(result.error());
        std::cout << std::fixed << std::setprecision(4) << "PAR " << result.value().par
                  << "\nOPC " << result.value().opc << "\n";
        return kExitOk;
    }

    if (audit_export->parsed()) {
        auto records = read_records_file(audit_records);
        if (!records) return fail_validation(records.error());
        if (auto written = write_audit_file(audit_out, records.value()); !written)
            return fail_validation(written.error());
        std::cout << "wrote audit log to " << audit_out << "\n";
        return kExitOk;
    }

    return kExitConfiguration;
}

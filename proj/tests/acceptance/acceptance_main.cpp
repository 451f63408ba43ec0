// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "repeval/analysis.hpp"
#include "repeval/records.hpp"
#include "../support/corpus.hpp"

using namespace repeval;
using repeval::testsupport::compare_to_golden;
using repeval::testsupport::corpus_fixture_paths;
using repeval::testsupport::golden_path_for;
using repeval::testsupport::preseed_evidence_cache;
using repeval::testsupport::slurp;

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

struct Criterion {
    std::string name;
    bool ok = true;
    std::string detail;

    void require(bool condition, const std::string& what) {
        if (!condition && ok) {
            ok = false;
            detail = what;
        } else if (!condition) {
            detail += "; " + what;
        }
    }
    void finish() const {
        if (ok) {
            std::printf("[PASS] %s\n", name.c_str());
        } else {
            std::printf("[FAIL] %s: %s\n", name.c_str(), detail.c_str());
            ++g_failures;
        }
        std::fflush(stdout);
    }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::mt19937_64 rng(20250808);

double unit() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("repeval_acc_" + tag + "_" +
                                            std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

// ---------------------------------------------------------------------------
// C1: equation oracles, exact within 1e-9, >= 50 randomized inputs each.
// ---------------------------------------------------------------------------
void criterion_equation_oracles() {
    Criterion c;
    c.name = "C1 equation oracles (fusion aggregate, evidence score, item scores, "
                "overall, deterministic alpha)";
    auto start = std::chrono::steady_clock::now();

    // Weighted fused aggregate.
    for (int i = 0; i < 60; ++i) {
        DimTriple form{unit(), unit(), unit()};
        DimTriple judge{unit(), unit(), unit()};
        double alpha = unit();
        double a = unit() + 0.01, b = unit() + 0.01, d = unit() + 0.01;
        double total = a + b + d;
        DimTriple weights{a / total, b / total, d / total};
        auto breakdown = flae_score(form, judge, alpha, AlphaSource::Judge, weights, false);
        long double expected = 0.0L;
        for (size_t k = 0; k < 3; ++k)
            expected += static_cast<long double>(weights[k]) *
                        (static_cast<long double>(alpha) * form[k] +
                         (1.0L - static_cast<long double>(alpha)) * judge[k]);
        c.require(near(breakdown.score, static_cast<double>(100.0L * expected), 1e-9),
                  "fused aggregate mismatch");
    }

    // Evidence score with the fixed-share gate term.
    for (int i = 0; i < 60; ++i) {
        TraceTriple metrics{unit(), unit(), unit()};
        double a = unit() + 0.01, b = unit() + 0.01, d = unit() + 0.01;
        double total = a + b + d;
        TraceTriple weights{a / total, b / total, d / total};
        double lambda = unit();
        bool pass = rng() % 2 == 0;
        auto vef = make_vef_result(pass ? 10 : 0, pass, "", "g");
        auto breakdown = trace_score(metrics, weights, false, vef, lambda);
        long double weighted = 0.0L;
        for (size_t k = 0; k < 3; ++k)
            weighted += static_cast<long double>(weights[k]) * metrics[k];
        long double expected = 100.0L * (static_cast<long double>(lambda) * (pass ? 1 : 0) +
                                         (1.0L - static_cast<long double>(lambda)) * weighted);
        c.require(near(breakdown.score, static_cast<double>(expected), 1e-9),
                  "evidence score mismatch");
    }

    // Item scores per routed type.
    for (int i = 0; i < 60; ++i) {
        ItemJudgment j;
        j.sem = unit();
        j.acc = unit();
        j.vqa = unit();
        j.f = unit();
        j.visual_type = VisualType::Datachart;
        c.require(near(item_score(j), j.f * (0.9 * j.acc + 0.1 * j.vqa), 1e-9), "datachart row");
        j.visual_type = VisualType::Ocrchart;
        c.require(near(item_score(j), j.f * (0.9 * j.acc + 0.1 * j.vqa), 1e-9), "ocrchart row");
        j.visual_type = VisualType::Photo;
        c.require(near(item_score(j), j.f * (0.5 * j.sem + 0.5 * j.vqa), 1e-9), "photo row");
        j.visual_type = VisualType::Diagram;
        j.h = unit();
        c.require(near(item_score(j), j.f * (0.5 * j.vqa + 0.5 * (1.0 - *j.h)), 1e-9),
                  "diagram row");
    }

    // Overall weighting.
    for (int i = 0; i < 60; ++i) {
        double f = 100 * unit(), t = 100 * unit(), m = 100 * unit();
        double a = unit() + 0.01, b = unit() + 0.01, d = unit() + 0.01;
        double total = a + b + d;
        std::array<double, 3> weights{a / total, b / total, d / total};
        long double expected = static_cast<long double>(weights[0]) * f +
                               static_cast<long double>(weights[1]) * t +
                               static_cast<long double>(weights[2]) * m;
        c.require(near(overall_score(f, t, m, weights), static_cast<double>(expected), 1e-9),
                  "overall mismatch");
    }

    // Deterministic alpha.
    for (int i = 0; i < 60; ++i) {
        ComplianceSignals s{unit(), unit(), unit(), unit()};
        long double expected = 1.0L - (0.35L * s.length_completeness +
                                       0.35L * s.heading_coverage +
                                       0.20L * s.citation_compliance +
                                       0.10L * s.reference_validity);
        if (expected < 0) expected = 0;
        if (expected > 1) expected = 1;
        c.require(near(deterministic_alpha(s), static_cast<double>(expected), 1e-9),
                  "alpha_det mismatch");
    }

    // Pinned closed-form values.
    c.require(near(deterministic_alpha({0.5, 0.5, 1.0, 1.0}), 0.35, 1e-9), "pinned 0.35");
    c.require(near(trace_score({0.5, 0.5, 0.5}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, false,
                               make_vef_result(0, false, "", "g"), 0.4)
                       .score,
                   30.0, 1e-9),
              "pinned 30");
    c.require(near(trace_score({0, 0, 0}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, false,
                               make_vef_result(10, true, "", "g"), 0.4)
                       .score,
                   40.0, 1e-9),
              "pinned 40");
    {
        ItemJudgment j;
        j.f = 1.0;
        j.acc = 1.0;
        j.vqa = 0.0;
        j.visual_type = VisualType::Datachart;
        c.require(near(item_score(j), 0.9, 1e-9), "pinned 0.9");
        ItemJudgment p;
        p.f = 1.0;
        p.sem = 0.8;
        p.vqa = 0.6;
        p.visual_type = VisualType::Photo;
        c.require(near(item_score(p), 0.7, 1e-9), "pinned 0.7");
        ItemJudgment d;
        d.f = 1.0;
        d.vqa = 1.0;
        d.h = 1.0;
        d.visual_type = VisualType::Diagram;
        c.require(near(item_score(d), 0.5, 1e-9), "pinned 0.5");
    }
    c.require(near(overall_score(50, 40, 30, {0.2, 0.5, 0.3}), 39.0, 1e-9), "pinned 39.0");

    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    c.require(elapsed.count() < 1.0, "oracle block exceeded 1 s");
    c.finish();
}

// ---------------------------------------------------------------------------
// C2: paper-stated constants from shipped configuration, exact.
// ---------------------------------------------------------------------------
void criterion_constants() {
    Criterion c;
    c.name = "C2 shipped constants (module weights, thresholds, vef share)";
    PipelineConfig config;
    c.require(config.module_weights[0] == 0.2, "w_F default");
    c.require(config.module_weights[1] == 0.5, "w_T default");
    c.require(config.module_weights[2] == 0.3, "w_M default");
    c.require(config.tau_f == 0.0, "tau_F default");
    c.require(config.tau_t == 0.0, "tau_T default");
    c.require(config.lambda_vef == 0.4, "lambda_vef default");
    c.require(config.module_weights[1] * config.lambda_vef == 0.2,
              "overall visual-check share w_T * lambda");
    c.require(kVefThreshold == 6, "vef threshold");
    c.require(config.judge_config.temperature == 0.2, "judge temperature default");
    c.finish();
}

// ---------------------------------------------------------------------------
// C3: strict visual check rule table and the 140-task pass-rate example.
// ---------------------------------------------------------------------------
void criterion_vef_rule_table() {
    Criterion c;
    c.name = "C3 strict visual-check rule table and pass-rate 38.57";
    int combos = 0;
    for (int score = 0; score <= 10; ++score) {
        for (bool pass : {false, true}) {
            ++combos;
            auto result = make_vef_result(score, pass, "", "g");
            c.require(result.final_pass == (score >= 6 && pass),
                      "combo score=" + std::to_string(score));
            c.require(result.forced_fail == (pass && score < 6), "forced-fail flag");
        }
    }
    c.require(combos == 22, "combination count");

    std::vector<VefResult> fixture;
    for (int i = 0; i < 140; ++i) fixture.push_back(make_vef_result(i < 54 ? 9 : 3, true, "", "g"));
    auto rate = vef_pass_rate(fixture);
    c.require(rate.has_value() && near(rate.value(), 38.57, 0.005), "pass-rate 54/140");
    c.finish();
}

// ---------------------------------------------------------------------------
// C4: gating fixtures.
// ---------------------------------------------------------------------------
void criterion_gating() {
    Criterion c;
    c.name = "C4 gating (invalid text stage closes; valid stages activate)";
    TempDir tmp("gate");
    PipelineConfig config;
    config.fetch_policy.offline = true;
    config.fetch_policy.cache_dir = (tmp.path / "cache").string();
    config.alpha_mode = AlphaMode::Judge;

    TaskBundle task;
    task.task_id = "gate";
    task.query = "q";
    task.domain = "d";
    task.regime = "Research";
    task.gt_version = "gt-v1";
    task.visual_gt = "gt";
    task.images = {"images/x.png"};

    // Empty report: TRACE is N/A, so the gate must close.
    {
        Pipeline pipeline(config, std::make_shared<MockJudge>(1, MockProfile::AllOnes));
        auto record = pipeline.evaluate_report(task, "sys", "r1", "");
        c.require(!record.trace.has_value(), "trace should be N/A for the empty report");
        c.require(record.mosaic.has_value() && record.mosaic->gated_out,
                  "mosaic must be gated out");
        c.require(record.mosaic->score == 0.0, "gated mosaic scores 0");
        bool na_found = false;
        for (const auto& na : record.na_records)
            if (na.stage == NaStage::Trace) na_found = true;
        c.require(na_found, "trace N/A record present");
    }

    // Valid report with an image: both stages valid, mosaic activates.
    {
        Pipeline pipeline(config, std::make_shared<MockJudge>(1, MockProfile::AllOnes));
        const char* report =
            "# R\n\nClaim here [1].\n\n![chart of output](images/x.png)\n\n"
            "References:\n[1] https://evidence.example/e01\n";
        auto record = pipeline.evaluate_report(task, "sys", "r2", report);
        c.require(record.flae.has_value() && record.flae->score > 0, "valid flae");
        c.require(record.trace.has_value() && record.trace->score > 0, "valid trace");
        c.require(record.mosaic.has_value() && !record.mosaic->gated_out, "mosaic activated");
        c.require(!record.mosaic->item_scores.empty(), "mosaic scored items");
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// C5: reason-aware N/A priority table.
// ---------------------------------------------------------------------------
void criterion_na_priority() {
    Criterion c;
    c.name = "C5 N/A priority rules and validity weights";
    struct Row {
        std::vector<std::string> signals;
        NaBucket bucket;
        double weight;
    };
    const Row rows[] = {
        {{"API error: HTTP 429", "dead link"}, NaBucket::SystemProviderFailure, 0.8},
        {{"rate limit raised by provider"}, NaBucket::SystemProviderFailure, 0.8},
        {{"judge failure (flae_dims): transport"}, NaBucket::SystemProviderFailure, 0.8},
        {{"request timeout during generation"}, NaBucket::SystemProviderFailure, 0.8},
        {{"auth rejected"}, NaBucket::SystemProviderFailure, 0.8},
        {{"overload reported upstream", "paywalled URL"}, NaBucket::SystemProviderFailure, 0.8},
        {{"paywalled URL"}, NaBucket::DataAccessibilityFailure, 0.9},
        {{"dead link"}, NaBucket::DataAccessibilityFailure, 0.9},
        {{"region-restricted content", "schema mismatch"},
         NaBucket::DataAccessibilityFailure, 0.9},
        {{"page removed", "parser exception"}, NaBucket::DataAccessibilityFailure, 0.9},
        {{"content non-extractable within budget"}, NaBucket::DataAccessibilityFailure, 0.9},
        {{"schema mismatch in verdict"}, NaBucket::PipelineFailure, 0.5},
        {{"parser exception in module"}, NaBucket::PipelineFailure, 0.5},
        {{"missing artifact: router table"}, NaBucket::PipelineFailure, 0.5},
        {{"empty report", "no usable output"}, NaBucket::ModelFailure, 0.0},
        {{"unusable output format"}, NaBucket::ModelFailure, 0.0},
    };
    int count = 0;
    for (const auto& row : rows) {
        ++count;
        auto record = assign_na_reason(NaStage::Trace, row.signals);
        c.require(record.has_value(), "assignment failed");
        if (!record) continue;
        c.require(record.value().bucket == row.bucket,
                  "bucket mismatch for '" + row.signals.front() + "'");
        c.require(record.value().validity_weight == row.weight,
                  "weight mismatch for '" + row.signals.front() + "'");
    }
    c.require(count >= 12, "needs >= 12 combinations");
    c.require(!assign_na_reason(NaStage::Flae, {}).has_value(), "empty signals rejected");
    c.finish();
}

// ---------------------------------------------------------------------------
// C6: parser corpus goldens + mutation totality.
// ---------------------------------------------------------------------------
void criterion_parser_corpus() {
    Criterion c;
    c.name = "C6 parser corpus goldens and 1000-mutant totality";
    auto paths = corpus_fixture_paths();
    c.require(paths.size() >= 30, "corpus must hold >= 30 fixtures");
    std::vector<std::string> bodies;
    for (const auto& path : paths) {
        std::string raw = slurp(path);
        bodies.push_back(raw);
        auto golden = nlohmann::json::parse(slurp(golden_path_for(path)));
        auto issues = compare_to_golden(raw, golden);
        for (const auto& issue : issues) c.require(false, fs::path(path).filename().string() +
                                                              ": " + issue);
    }

    std::mt19937_64 mutation_rng(7);
    int mutants = 0;
    try {
        for (int round = 0; mutants < 1000; ++round) {
            std::string text = bodies[static_cast<size_t>(round) % bodies.size()];
            for (int step = 0; step < 4 && mutants < 1000; ++step) {
                // Mutate: splice, delete, marker injection, byte flip.
                if (text.empty()) text = "x";
                std::uniform_int_distribution<size_t> pos_dist(0, text.size() - 1);
                switch (mutation_rng() % 5) {
                    case 0: text.insert(pos_dist(mutation_rng), "[12]"); break;
                    case 1: text.insert(pos_dist(mutation_rng), "\nReferences:\n[1] x\n"); break;
                    case 2: text.erase(pos_dist(mutation_rng),
                                       std::min<size_t>(7, text.size())); break;
                    case 3: text[pos_dist(mutation_rng)] =
                                static_cast<char>(mutation_rng() % 256); break;
                    case 4: text += text.substr(text.size() / 2); break;
                }
                ++mutants;
                auto doc = parse_report(text);
                auto map = build_citation_map(doc);
                auto claims = extract_claims(doc, map);
                (void)extract_mm_items(doc);
                // Conservation: claims never exceed (sentence, marker) occurrences,
                // and no cited index is lost.
                std::size_t occurrences = 0;
                for (const auto& segment : doc.body_segments) {
                    for (const auto& sentence :
                         split_sentences(segment.text, default_abbreviations())) {
                        std::set<int> markers;
                        ReportDocument sentence_doc = parse_report(sentence);
                        for (const auto& seg : sentence_doc.body_segments)
                            for (int idx : seg.citation_indices) markers.insert(idx);
                        occurrences += markers.size();
                    }
                }
                c.require(occurrences >= claims.size(), "claims exceed marker occurrences");
                std::set<std::string> keys;
                for (const auto& claim : claims) {
                    keys.insert(claim.dedup_key);
                    int idx = claim.cited_indices.front();
                    bool tracked = map.entries.count(idx) ||
                                   std::find(map.dangling_markers.begin(),
                                             map.dangling_markers.end(),
                                             idx) != map.dangling_markers.end();
                    c.require(tracked, "marker lost after mutation");
                }
                c.require(keys.size() == claims.size(), "dedup keys not unique");
                if (text.size() > 60000) text.resize(8192);
            }
        }
    } catch (const std::exception& e) {
        c.require(false, std::string("parser threw: ") + e.what());
    } catch (...) {
        c.require(false, "parser threw a non-standard exception");
    }
    c.require(mutants == 1000, "mutant count");
    c.finish();
}

// ---------------------------------------------------------------------------
// C7: end-to-end determinism through the CLI, < 30 s.
// ---------------------------------------------------------------------------
void criterion_determinism() {
    Criterion c;
    c.name = "C7 end-to-end determinism (CLI, mock seed 7, warm cache)";
    auto start = std::chrono::steady_clock::now();
    TempDir tmp("e2e");

    std::string cache_dir = (tmp.path / "cache").string();
    {
        FetchPolicy policy;
        policy.cache_dir = cache_dir;
        EvidenceFetcher warm(policy);
        preseed_evidence_cache(warm);
    }

    std::string tasks = std::string(REPEVAL_FIXTURE_DIR) + "/tasks";
    std::string reports = std::string(REPEVAL_FIXTURE_DIR) + "/sysreports";
    auto run = [&](const std::string& out) {
        std::string command = std::string(REPEVAL_CLI_PATH) + " evaluate --tasks " + tasks +
                              " --reports " + reports + " --out " + out + " --cache-dir " +
                              cache_dir + " --offline --judge mock --mock-seed 7 --workers 2" +
                              " >/dev/null 2>&1";
        return std::system(command.c_str());
    };
    std::string first = (tmp.path / "run1.jsonl").string();
    std::string second = (tmp.path / "run2.jsonl").string();
    c.require(run(first) == 0, "first CLI run failed");
    c.require(run(second) == 0, "second CLI run failed");
    std::string body_a = slurp(first);
    std::string body_b = slurp(second);
    c.require(!body_a.empty(), "records file empty");
    c.require(body_a == body_b, "records files differ between runs");

    auto parsed = records_from_jsonl(body_a);
    c.require(parsed.has_value() && parsed.value().size() == 20, "expected 20 records");

    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    c.require(elapsed.count() < 30.0, "determinism block exceeded 30 s");
    c.finish();
}

// ---------------------------------------------------------------------------
// C8: fusion endpoints over the fixture set, exact.
// ---------------------------------------------------------------------------
void criterion_fusion_endpoints() {
    Criterion c;
    c.name = "C8 fusion endpoints (alpha 1 formula-only, alpha 0 judge-only)";
    TempDir tmp("fuse");

    auto tasks = load_task_set(std::string(REPEVAL_FIXTURE_DIR) + "/tasks");
    c.require(tasks.has_value(), "task fixtures load");
    if (!tasks) {
        c.finish();
        return;
    }

    auto run_with_alpha = [&](double alpha, const std::string& cache) {
        PipelineConfig config;
        config.fetch_policy.offline = true;
        config.fetch_policy.cache_dir = (tmp.path / cache).string();
        config.alpha_override = alpha;
        config.workers = 2;
        Pipeline pipeline(config, std::make_shared<MockJudge>(7));
        preseed_evidence_cache(pipeline.fetcher());
        std::vector<ReportJob> jobs;
        for (const auto& task : tasks.value()) {
            std::string path = std::string(REPEVAL_FIXTURE_DIR) + "/sysreports/nova/" +
                               task.task_id + ".md";
            jobs.push_back({&task, "nova", "nova/" + task.task_id, slurp(path)});
        }
        return pipeline.evaluate_set(jobs);
    };

    auto formula_records = run_with_alpha(1.0, "cache_a");
    auto judge_records = run_with_alpha(0.0, "cache_b");
    c.require(formula_records.size() == 10 && judge_records.size() == 10, "ten records each");
    for (size_t i = 0; i < formula_records.size(); ++i) {
        const auto& formula_flae = formula_records[i].flae;
        const auto& judge_flae = judge_records[i].flae;
        c.require(formula_flae.has_value() && judge_flae.has_value(), "flae valid");
        if (!formula_flae || !judge_flae) continue;
        c.require(formula_flae->s_fused == formula_flae->s_form, "alpha=1 formula-only");
        double formula_only = 0.0, judge_only = 0.0;
        for (size_t d = 0; d < 3; ++d) {
            formula_only += formula_flae->weights[d] * formula_flae->s_form[d];
            judge_only += judge_flae->weights[d] * judge_flae->s_judge[d];
        }
        c.require(formula_flae->score == 100.0 * formula_only, "alpha=1 score exact");
        c.require(judge_flae->s_fused == judge_flae->s_judge, "alpha=0 judge-only");
        c.require(judge_flae->score == 100.0 * judge_only, "alpha=0 score exact");
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// C9: weight sweep against a hand-rolled oracle on a 3-system fixture.
// ---------------------------------------------------------------------------
void criterion_weight_sweep() {
    Criterion c;
    c.name = "C9 weight sweep vs oracle and mosaic-ablation rank flip";

    struct SystemScores {
        std::string id;
        double f, t, m;
    };
    // texty leads on text stages, visual on the image stage; mixed in between.
    const SystemScores systems[] = {
        {"texty", 90, 90, 0},
        {"visual", 50, 50, 100},
        {"mixed", 70, 60, 55},
    };
    std::vector<EvaluationRecord> records;
    for (const auto& system : systems) {
        EvaluationRecord record;
        record.task_id = "t1";
        record.system_id = system.id;
        record.report_id = system.id + "/t1";
        record.module_weights = {0.2, 0.5, 0.3};
        record.config_fingerprint = "fp";
        FlaeBreakdown flae;
        flae.score = system.f;
        record.flae = flae;
        TraceBreakdown trace;
        trace.score = system.t;
        record.trace = trace;
        MosaicBreakdown mosaic;
        mosaic.score = system.m;
        record.mosaic = mosaic;
        record.overall = overall_score(system.f, system.t, system.m, record.module_weights);
        records.push_back(std::move(record));
    }

    auto grid = integer_weight_triples(10);
    c.require(grid.size() == 66, "66 feasible triples");
    auto sweep = weight_sweep(records, grid);
    c.require(sweep.has_value(), "sweep runs");
    if (!sweep) {
        c.finish();
        return;
    }

    // Oracle: recompute every ranking by brute force.
    bool flip_expected_somewhere = false;
    for (size_t row_idx = 0; row_idx < grid.size(); ++row_idx) {
        const auto& triple = grid[row_idx];
        const auto& row = sweep.value().rows[row_idx];
        std::vector<std::pair<double, std::string>> oracle;
        for (const auto& system : systems) {
            long double mean = (static_cast<long double>(triple[0]) * system.f +
                                static_cast<long double>(triple[1]) * system.t +
                                static_cast<long double>(triple[2]) * system.m) /
                               10.0L;
            oracle.push_back({static_cast<double>(mean), system.id});
        }
        std::sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (size_t k = 0; k < oracle.size(); ++k) {
            c.require(row.ranking[k] == oracle[k].second,
                      "ranking mismatch at triple (" + std::to_string(triple[0]) + "," +
                          std::to_string(triple[1]) + "," + std::to_string(triple[2]) + ")");
            c.require(near(row.mean_overall.at(oracle[k].second), oracle[k].first, 1e-9),
                      "mean mismatch");
        }
        if (triple[2] == 0 && oracle.front().second != sweep.value().default_top)
            flip_expected_somewhere = true;
    }
    c.require(sweep.value().default_top == "visual", "default top system");
    c.require(flip_expected_somewhere, "fixture must flip under ablation");
    bool flip_detected = false;
    for (const auto& triple : sweep.value().top_flips)
        if (triple[2] == 0) flip_detected = true;
    c.require(flip_detected, "mosaic-ablation rank flip detected");
    c.finish();
}

// ---------------------------------------------------------------------------
// C10: agreement metrics vs brute force.
// ---------------------------------------------------------------------------
void criterion_agreement() {
    Criterion c;
    c.name = "C10 agreement metrics vs brute force (PAR, score correlation)";

    // Randomized comparison.
    for (int trial = 0; trial < 50; ++trial) {
        size_t pairs = 3 + rng() % 20;
        std::vector<PairPreference> evaluator, human;
        int matches = 0;
        for (size_t i = 0; i < pairs; ++i) {
            std::string id = "p" + std::to_string(i);
            std::string a = rng() % 2 ? "A" : "B";
            std::string b = rng() % 2 ? "A" : "B";
            evaluator.push_back({id, a});
            human.push_back({id, b});
            if (a == b) ++matches;
        }
        auto par = pairwise_agreement(evaluator, human);
        c.require(par.has_value(), "par computes");
        if (par)
            c.require(near(par.value(), 100.0 * matches / static_cast<double>(pairs), 1e-9),
                      "par mismatch");

        size_t n = 2 + rng() % 8;
        std::vector<double> x(n), y(n);
        for (size_t i = 0; i < n; ++i) {
            x[i] = 100 * unit();
            y[i] = 100 * unit();
        }
        long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        for (size_t i = 0; i < n; ++i) {
            sx += x[i];
            sy += y[i];
            sxx += static_cast<long double>(x[i]) * x[i];
            syy += static_cast<long double>(y[i]) * y[i];
            sxy += static_cast<long double>(x[i]) * y[i];
        }
        long double nn = static_cast<long double>(n);
        long double den = std::sqrt((sxx - sx * sx / nn) * (syy - sy * sy / nn));
        if (den != 0) {
            auto r = pearson_correlation(x, y);
            c.require(r.has_value(), "pearson computes");
            if (r)
                c.require(near(r.value(), static_cast<double>((sxy - sx * sy / nn) / den), 1e-9),
                          "pearson mismatch");
        }
    }

    // Endpoints.
    std::vector<PairPreference> prefs = {{"p1", "A"}, {"p2", "B"}};
    std::map<std::string, double> scores = {{"a", 1}, {"b", 2}, {"c", 4}};
    std::map<std::string, double> negated = {{"a", -1}, {"b", -2}, {"c", -4}};
    auto identical = agreement_metrics(prefs, prefs, scores, scores);
    c.require(identical.has_value() && identical.value().par == 100.0, "PAR 100 endpoint");
    c.require(identical.has_value() && near(identical.value().opc, 1.0, 1e-9), "OPC 1 endpoint");
    auto anti = agreement_metrics(prefs, prefs, scores, negated);
    c.require(anti.has_value() && near(anti.value().opc, -1.0, 1e-9), "OPC -1 endpoint");
    c.finish();
}

}  // namespace

int main() {
    criterion_equation_oracles();
    criterion_constants();
    criterion_vef_rule_table();
    criterion_gating();
    criterion_na_priority();
    criterion_parser_corpus();
    criterion_determinism();
    criterion_fusion_endpoints();
    criterion_weight_sweep();
    criterion_agreement();
    if (g_failures > 0) {
        std::printf("%d criteria failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}

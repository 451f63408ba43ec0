#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "repeval/text.hpp"
#include "repeval/trace.hpp"

using namespace repeval;

namespace {

ClaimUrlPair make_pair(const std::string& claim, SupportLabel label, bool accessible = true,
                       int index = 1) {
    ClaimUrlPair pair;
    pair.claim_text = claim;
    pair.claim_key = normalize_for_dedup(claim);
    pair.citation_index = index;
    pair.url = "https://e.example/" + std::to_string(index);
    pair.accessible = accessible;
    pair.fetch_status = accessible ? FetchStatus::Ok : FetchStatus::Paywalled;
    pair.label = accessible ? label : SupportLabel::Inaccessible;
    return pair;
}

JudgeGateway scripted_gateway(std::vector<std::string> responses, int max_attempts = 1,
                              bool repeat = false) {
    JudgeBackendConfig config;
    config.max_attempts = max_attempts;
    return JudgeGateway(std::make_shared<ScriptedJudge>(std::move(responses), repeat), config);
}

}  // namespace

// ---- VEF rule ------------------------------------------------------------------

TEST_CASE("threshold dominance over every (score, verdict) combination") {
    for (int score = 0; score <= 10; ++score) {
        for (bool pass : {true, false}) {
            auto result = make_vef_result(score, pass, "r", "gt1");
            CHECK(result.final_pass == (score >= 6 && pass));
            CHECK(result.forced_fail == (pass && score < 6));
            if (result.final_pass) {
                CHECK(result.raw_score >= 6);
                CHECK(result.raw_verdict_pass);
            }
        }
    }
}

TEST_CASE("worked rule examples: 5/PASS forced fail, 6/PASS passes, 9/FAIL fails") {
    auto forced = make_vef_result(5, true, "", "g");
    CHECK_FALSE(forced.final_pass);
    CHECK(forced.forced_fail);
    auto boundary = make_vef_result(6, true, "", "g");
    CHECK(boundary.final_pass);
    CHECK_FALSE(boundary.forced_fail);
    auto identity_error = make_vef_result(9, false, "wrong entity", "g");
    CHECK_FALSE(identity_error.final_pass);
    CHECK_FALSE(identity_error.forced_fail);
}

TEST_CASE("pass rate: 54 of 140 reports 38.57") {
    std::vector<VefResult> results;
    for (int i = 0; i < 140; ++i) results.push_back(make_vef_result(i < 54 ? 10 : 0, true, "", "g"));
    auto rate = vef_pass_rate(results);
    REQUIRE(rate);
    CHECK(rate.value() == doctest::Approx(38.57).epsilon(1e-9));
}

TEST_CASE("pass rate endpoints and empty input") {
    std::vector<VefResult> all_fail(25, make_vef_result(0, false, "", "g"));
    CHECK(vef_pass_rate(all_fail).value() == 0.0);
    std::vector<VefResult> all_pass(140, make_vef_result(10, true, "", "g"));
    CHECK(vef_pass_rate(all_pass).value() == 100.0);
    CHECK_FALSE(vef_pass_rate({}));
}

// ---- aggregation -----------------------------------------------------------------

TEST_CASE("perfect case: all supported, all accessible") {
    std::vector<ClaimUrlPair> pairs;
    for (int i = 1; i <= 4; ++i)
        pairs.push_back(make_pair("claim " + std::to_string(i), SupportLabel::Supported, true, i));
    auto metrics = aggregate_citation_metrics(pairs);
    CHECK(metrics[0] == 1.0);
    CHECK(metrics[1] == 1.0);
    CHECK(metrics[2] == 1.0);
}

TEST_CASE("counting fixture: Con 0.5, Cov 0.8, Fid 0.5") {
    // 5 claims; claims 1-4 accessible (2 supported + 2 contradicted), claim 5 paywalled.
    std::vector<ClaimUrlPair> pairs;
    pairs.push_back(make_pair("claim one", SupportLabel::Supported, true, 1));
    pairs.push_back(make_pair("claim two", SupportLabel::Supported, true, 2));
    pairs.push_back(make_pair("claim three", SupportLabel::Contradicted, true, 3));
    pairs.push_back(make_pair("claim four", SupportLabel::Contradicted, true, 4));
    pairs.push_back(make_pair("claim five", SupportLabel::Supported, false, 5));
    auto metrics = aggregate_citation_metrics(pairs);
    CHECK(metrics[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(metrics[1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(metrics[2] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("no claims: the empty-report floor (0,0,0)") {
    auto metrics = aggregate_citation_metrics({});
    CHECK(metrics[0] == 0.0);
    CHECK(metrics[1] == 0.0);
    CHECK(metrics[2] == 0.0);
}

TEST_CASE("fid is 1 when judged pairs exist but none hit the error set") {
    std::vector<ClaimUrlPair> pairs;
    pairs.push_back(make_pair("a", SupportLabel::Partial, true, 1));
    pairs.push_back(make_pair("b", SupportLabel::MissingEvidence, true, 2));
    auto metrics = aggregate_citation_metrics(pairs);
    CHECK(metrics[0] == 0.0);  // nothing supported
    CHECK(metrics[2] == 1.0);  // error set empty
}

TEST_CASE("inaccessible pairs depress only coverage") {
    std::vector<ClaimUrlPair> accessible_only;
    accessible_only.push_back(make_pair("a", SupportLabel::Supported, true, 1));
    auto base = aggregate_citation_metrics(accessible_only);

    auto with_inaccessible = accessible_only;
    with_inaccessible.push_back(make_pair("b", SupportLabel::Supported, false, 2));
    auto metrics = aggregate_citation_metrics(with_inaccessible);
    CHECK(metrics[0] == base[0]);  // Con unchanged
    CHECK(metrics[2] == base[2]);  // Fid unchanged
    CHECK(metrics[1] < base[1]);   // Cov drops
}

TEST_CASE("monotonicity: contradicted -> supported never lowers Con or Fid") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<ClaimUrlPair> pairs;
        int n = 2 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) {
            SupportLabel label = (rng() % 2) ? SupportLabel::Supported
                                             : SupportLabel::Contradicted;
            pairs.push_back(make_pair("c" + std::to_string(i), label, true, i + 1));
        }
        auto before = aggregate_citation_metrics(pairs);
        for (auto& pair : pairs) {
            if (pair.label == SupportLabel::Contradicted) {
                pair.label = SupportLabel::Supported;
                break;
            }
        }
        auto after = aggregate_citation_metrics(pairs);
        CHECK(after[0] >= before[0] - 1e-12);
        CHECK(after[2] >= before[2] - 1e-12);
    }
}

// ---- trace score ------------------------------------------------------------------

TEST_CASE("perfect trace scores 100") {
    auto vef = make_vef_result(10, true, "", "g");
    auto breakdown = trace_score({1.0, 1.0, 1.0}, {0.2, 0.5, 0.3}, false, vef, 0.4);
    CHECK(breakdown.score == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("vef fail, uniform weights, E=0.5 scores 30 at lambda 0.4") {
    auto vef = make_vef_result(0, false, "", "g");
    auto breakdown = trace_score({0.5, 0.5, 0.5}, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, false, vef,
                                 0.4);
    CHECK(breakdown.score == doctest::Approx(30.0).epsilon(1e-9));
}

TEST_CASE("vef pass with zero metrics scores exactly 100*lambda") {
    auto vef = make_vef_result(8, true, "", "g");
    auto breakdown = trace_score({0.0, 0.0, 0.0}, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, false, vef,
                                 0.4);
    CHECK(breakdown.score == doctest::Approx(40.0).epsilon(1e-12));
}

TEST_CASE("score invariant on randomized inputs") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        TraceTriple metrics{unit(rng), unit(rng), unit(rng)};
        double a = unit(rng) + 0.01, b = unit(rng) + 0.01, c = unit(rng) + 0.01;
        double total = a + b + c;
        TraceTriple weights{a / total, b / total, c / total};
        double lambda = unit(rng);
        bool pass = rng() % 2 == 0;
        auto vef = make_vef_result(pass ? 10 : 0, pass, "", "g");
        auto breakdown = trace_score(metrics, weights, false, vef, lambda);
        long double weighted = 0.0L;
        for (size_t k = 0; k < 3; ++k)
            weighted += static_cast<long double>(weights[k]) * metrics[k];
        long double expected =
            100.0L * (static_cast<long double>(lambda) * (pass ? 1.0L : 0.0L) +
                      (1.0L - lambda) * weighted);
        CHECK(breakdown.score ==
              doctest::Approx(static_cast<double>(expected)).epsilon(1e-9));
        CHECK(breakdown.score >= 0.0);
        CHECK(breakdown.score <= 100.0);
    }
}

// ---- judge plumbing -----------------------------------------------------------------

TEST_CASE("pair support: mock containment profile labels supported") {
    JudgeBackendConfig config;
    auto gateway = JudgeGateway(std::make_shared<MockJudge>(7), config);
    auto supported = judge_pair_support(gateway, "sea levels rose in 2020",
                                        "https://e.example/",
                                        "Observations confirm sea levels rose in 2020 sharply.");
    REQUIRE(supported);
    CHECK(supported.value().label == SupportLabel::Supported);
}

TEST_CASE("pair support: scripted contradiction fixture") {
    auto gateway = scripted_gateway(
        {R"({"label":"contradicted","rationale":"evidence states the opposite"})"});
    auto judgment = judge_pair_support(gateway, "prices rose", "https://e.example/",
                                       "Prices in fact fell over the period.");
    REQUIRE(judgment);
    CHECK(judgment.value().label == SupportLabel::Contradicted);
    CHECK_FALSE(judgment.value().rationale.empty());
}

TEST_CASE("vef_check applies the forced-fail threshold to the payload") {
    auto gateway = scripted_gateway(
        {R"({"score":5,"reason":"minor gaps","verdict":"PASS"})"});
    auto result = vef_check(gateway, "seg", "task", "gt text", "report", "gt-v3");
    REQUIRE(result);
    CHECK_FALSE(result.value().final_pass);
    CHECK(result.value().forced_fail);
    CHECK(result.value().gt_version == "gt-v3");
}

TEST_CASE("citation weights: passthrough, renormalization, fallback") {
    bool fallback = false;
    auto passthrough = scripted_gateway({R"({"w_con":0.4,"w_cov":0.4,"w_fid":0.2})"});
    auto weights = task_citation_weights(passthrough, "t", "r", &fallback);
    CHECK_FALSE(fallback);
    CHECK(weights[0] == doctest::Approx(0.4));

    auto renorm = scripted_gateway({R"({"w_con":1,"w_cov":1,"w_fid":2})"});
    weights = task_citation_weights(renorm, "t", "r", &fallback);
    CHECK(weights[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(weights[2] == doctest::Approx(0.5).epsilon(1e-12));

    auto failing = scripted_gateway({});
    weights = task_citation_weights(failing, "t", "r", &fallback);
    CHECK(fallback);
    CHECK(weights == TraceTriple{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
}

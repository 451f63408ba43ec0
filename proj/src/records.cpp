#include "repeval/records.hpp"

#include <fstream>
#include <sstream>

#include "repeval/mosaic.hpp"
#include "repeval/text.hpp"

namespace repeval {

using nlohmann::json;

namespace {

json dims_to_json(const DimTriple& triple) {
    return json{{"read", triple[0]}, {"insh", triple[1]}, {"stru", triple[2]}};
}

DimTriple dims_from_json(const json& j) {
    return DimTriple{j.at("read").get<double>(), j.at("insh").get<double>(),
                     j.at("stru").get<double>()};
}

json trace_triple_to_json(const TraceTriple& triple) {
    return json{{"con", triple[0]}, {"cov", triple[1]}, {"fid", triple[2]}};
}

TraceTriple trace_triple_from_json(const json& j) {
    return TraceTriple{j.at("con").get<double>(), j.at("cov").get<double>(),
                       j.at("fid").get<double>()};
}

json flae_to_json(const FlaeBreakdown& b) {
    return json{{"alpha", b.alpha},
                {"alpha_source", to_string(b.alpha_source)},
                {"s_form", dims_to_json(b.s_form)},
                {"s_judge", dims_to_json(b.s_judge)},
                {"s_fused", dims_to_json(b.s_fused)},
                {"score", b.score},
                {"weights", dims_to_json(b.weights)},
                {"weights_fallback", b.weights_fallback}};
}

FlaeBreakdown flae_from_json(const json& j) {
    FlaeBreakdown b;
    b.alpha = j.at("alpha").get<double>();
    b.alpha_source = j.at("alpha_source").get<std::string>() == "judge" ? AlphaSource::Judge
                                                                        : AlphaSource::Deterministic;
    b.s_form = dims_from_json(j.at("s_form"));
    b.s_judge = dims_from_json(j.at("s_judge"));
    b.s_fused = dims_from_json(j.at("s_fused"));
    b.score = j.at("score").get<double>();
    b.weights = dims_from_json(j.at("weights"));
    b.weights_fallback = j.at("weights_fallback").get<bool>();
    return b;
}

json vef_to_json(const VefResult& v) {
    return json{{"raw_score", v.raw_score},
                {"raw_verdict", v.raw_verdict_pass ? "PASS" : "FAIL"},
                {"forced_fail", v.forced_fail},
                {"final_pass", v.final_pass},
                {"reason", v.reason},
                {"gt_version", v.gt_version}};
}

VefResult vef_from_json(const json& j) {
    VefResult v;
    v.raw_score = j.at("raw_score").get<int>();
    v.raw_verdict_pass = j.at("raw_verdict").get<std::string>() == "PASS";
    v.forced_fail = j.at("forced_fail").get<bool>();
    v.final_pass = j.at("final_pass").get<bool>();
    v.reason = j.at("reason").get<std::string>();
    v.gt_version = j.at("gt_version").get<std::string>();
    return v;
}

json pair_to_json(const ClaimUrlPair& p) {
    return json{{"accessible", p.accessible},
                {"citation_index", p.citation_index},
                {"claim", p.claim_text},
                {"fetch_status", to_string(p.fetch_status)},
                {"label", to_string(p.label)},
                {"rationale", p.rationale},
                {"url", p.url}};
}

ClaimUrlPair pair_from_json(const json& j) {
    ClaimUrlPair p;
    p.accessible = j.at("accessible").get<bool>();
    p.citation_index = j.at("citation_index").get<int>();
    p.claim_text = j.at("claim").get<std::string>();
    if (auto s = fetch_status_from_string(j.at("fetch_status").get<std::string>()))
        p.fetch_status = *s;
    if (auto l = support_label_from_string(j.at("label").get<std::string>())) p.label = *l;
    p.rationale = j.at("rationale").get<std::string>();
    p.url = j.at("url").get<std::string>();
    p.claim_key = normalize_for_dedup(p.claim_text);
    return p;
}

json trace_to_json(const TraceBreakdown& b) {
    json pairs = json::array();
    for (const auto& pair : b.pairs) pairs.push_back(pair_to_json(pair));
    return json{{"accessible_pair_count", b.accessible_pair_count},
                {"lambda_vef", b.lambda_vef},
                {"metrics", trace_triple_to_json(b.metrics)},
                {"pair_count", b.pair_count},
                {"pairs", pairs},
                {"score", b.score},
                {"vef", vef_to_json(b.vef)},
                {"weights", trace_triple_to_json(b.weights)},
                {"weights_fallback", b.weights_fallback}};
}

TraceBreakdown trace_from_json(const json& j) {
    TraceBreakdown b;
    b.accessible_pair_count = j.at("accessible_pair_count").get<int>();
    b.lambda_vef = j.at("lambda_vef").get<double>();
    b.metrics = trace_triple_from_json(j.at("metrics"));
    b.pair_count = j.at("pair_count").get<int>();
    for (const auto& pair : j.at("pairs")) b.pairs.push_back(pair_from_json(pair));
    b.score = j.at("score").get<double>();
    b.vef = vef_from_json(j.at("vef"));
    b.weights = trace_triple_from_json(j.at("weights"));
    b.weights_fallback = j.at("weights_fallback").get<bool>();
    return b;
}

json mosaic_to_json(const MosaicBreakdown& b) {
    json items = json::array();
    for (const auto& [item_id, score] : b.item_scores)
        items.push_back(json{{"item_id", item_id}, {"score", score}});
    return json{{"gated_out", b.gated_out},
                {"item_scores", items},
                {"no_items", b.no_items},
                {"score", b.score}};
}

MosaicBreakdown mosaic_from_json(const json& j) {
    MosaicBreakdown b;
    b.gated_out = j.at("gated_out").get<bool>();
    for (const auto& item : j.at("item_scores"))
        b.item_scores.emplace_back(item.at("item_id").get<std::string>(),
                                   item.at("score").get<double>());
    b.no_items = j.at("no_items").get<bool>();
    b.score = j.at("score").get<double>();
    return b;
}

json na_to_json(const NaRecord& r) {
    return json{{"stage", to_string(r.stage)},
                {"bucket", to_string(r.bucket)},
                {"validity_weight", r.validity_weight},
                {"evidence", r.evidence}};
}

NaRecord na_from_json(const json& j) {
    NaRecord r;
    if (auto s = na_stage_from_string(j.at("stage").get<std::string>())) r.stage = *s;
    if (auto b = na_bucket_from_string(j.at("bucket").get<std::string>())) r.bucket = *b;
    r.validity_weight = j.at("validity_weight").get<double>();
    for (const auto& e : j.at("evidence")) r.evidence.push_back(e.get<std::string>());
    return r;
}

}  // namespace

json record_to_json(const EvaluationRecord& record) {
    json na = json::array();
    for (const auto& r : record.na_records) na.push_back(na_to_json(r));
    json j = {{"schema_version", kRecordSchemaVersion},
              {"task_id", record.task_id},
              {"report_id", record.report_id},
              {"system_id", record.system_id},
              {"gt_version", record.gt_version},
              {"module_weights", record.module_weights},
              {"na_records", na},
              {"overall", record.overall},
              {"config_fingerprint", record.config_fingerprint}};
    j["flae"] = record.flae ? flae_to_json(*record.flae) : json(nullptr);
    j["trace"] = record.trace ? trace_to_json(*record.trace) : json(nullptr);
    j["mosaic"] = record.mosaic ? mosaic_to_json(*record.mosaic) : json(nullptr);
    return j;
}

Result<EvaluationRecord> record_from_json(const json& j) {
    try {
        EvaluationRecord record;
        record.task_id = j.at("task_id").get<std::string>();
        record.report_id = j.at("report_id").get<std::string>();
        record.system_id = j.at("system_id").get<std::string>();
        record.gt_version = j.value("gt_version", std::string());
        record.module_weights = {j.at("module_weights")[0].get<double>(),
                                 j.at("module_weights")[1].get<double>(),
                                 j.at("module_weights")[2].get<double>()};
        record.overall = j.at("overall").get<double>();
        record.config_fingerprint = j.at("config_fingerprint").get<std::string>();
        if (j.contains("flae") && !j["flae"].is_null()) record.flae = flae_from_json(j["flae"]);
        if (j.contains("trace") && !j["trace"].is_null())
            record.trace = trace_from_json(j["trace"]);
        if (j.contains("mosaic") && !j["mosaic"].is_null())
            record.mosaic = mosaic_from_json(j["mosaic"]);
        for (const auto& r : j.at("na_records")) record.na_records.push_back(na_from_json(r));
        return Result<EvaluationRecord>::ok(std::move(record));
    } catch (const std::exception& e) {
        return Result<EvaluationRecord>::fail(std::string("record parse: ") + e.what());
    }
}

std::string records_to_jsonl(const std::vector<EvaluationRecord>& records) {
    std::string out;
    for (const auto& record : records) {
        out += record_to_json(record).dump();
        out += "\n";
    }
    return out;
}

Result<std::vector<EvaluationRecord>> records_from_jsonl(const std::string& body) {
    std::vector<EvaluationRecord> records;
    std::istringstream in(body);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            return Result<std::vector<EvaluationRecord>>::fail(
                "records: invalid JSON at line " + std::to_string(line_no));
        auto record = record_from_json(j);
        if (!record)
            return Result<std::vector<EvaluationRecord>>::fail(
                record.error() + " (line " + std::to_string(line_no) + ")");
        records.push_back(record.take());
    }
    return Result<std::vector<EvaluationRecord>>::ok(std::move(records));
}

Result<bool> write_records_file(const std::string& path,
                                const std::vector<EvaluationRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return Result<bool>::fail("records: cannot open " + path + " for writing");
    out << records_to_jsonl(records);
    return Result<bool>::ok(true);
}

Result<std::vector<EvaluationRecord>> read_records_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return Result<std::vector<EvaluationRecord>>::fail("records: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return records_from_jsonl(buffer.str());
}

std::string audit_jsonl(const std::vector<EvaluationRecord>& records) {
    std::string out;
    for (const auto& record : records) {
        if (!record.trace) continue;
        for (const auto& pair : record.trace->pairs) {
            json j = {{"task_id", record.task_id},
                      {"system_id", record.system_id},
                      {"report_id", record.report_id},
                      {"claim", pair.claim_text},
                      {"url", pair.url},
                      {"citation_index", pair.citation_index},
                      {"fetch_status", to_string(pair.fetch_status)},
                      {"label", to_string(pair.label)},
                      {"rationale", pair.rationale}};
            out += j.dump();
            out += "\n";
        }
    }
    return out;
}

Result<bool> write_audit_file(const std::string& path,
                              const std::vector<EvaluationRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return Result<bool>::fail("audit: cannot open " + path + " for writing");
    out << audit_jsonl(records);
    return Result<bool>::ok(true);
}

}  // namespace repeval

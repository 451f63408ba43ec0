#include "repeval/judge.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdlib>

#include "repeval/text.hpp"

namespace repeval {

using nlohmann::json;

// =============================================================================
// Template ids and texts
// =============================================================================

const char* to_string(TemplateId id) {
    switch (id) {
        case TemplateId::FlaeDims: return "flae_dims";
        case TemplateId::FlaeWeights: return "flae_weights";
        case TemplateId::FlaeAlpha: return "flae_alpha";
        case TemplateId::VefCheck: return "vef_check";
        case TemplateId::TraceSupport: return "trace_support";
        case TemplateId::TraceWeights: return "trace_weights";
        case TemplateId::MosaicItem: return "mosaic_item";
    }
    return "unknown";
}

std::optional<TemplateId> template_id_from_string(const std::string& name) {
    for (TemplateId id : all_template_ids()) {
        if (name == to_string(id)) return id;
    }
    return std::nullopt;
}

const std::vector<TemplateId>& all_template_ids() {
    static const std::vector<TemplateId> ids = {
        TemplateId::FlaeDims,   TemplateId::FlaeWeights,  TemplateId::FlaeAlpha,
        TemplateId::VefCheck,   TemplateId::TraceSupport, TemplateId::TraceWeights,
        TemplateId::MosaicItem,
    };
    return ids;
}

namespace {

PromptTemplate make_template(TemplateId id, std::string system_text, std::string user_text,
                             std::vector<std::string> placeholders) {
    PromptTemplate t;
    t.id = id;
    t.system_text = std::move(system_text);
    t.user_text = std::move(user_text);
    t.placeholders = std::move(placeholders);
    return t;
}

const std::map<TemplateId, PromptTemplate>& template_table() {
    static const std::map<TemplateId, PromptTemplate> table = [] {
        std::map<TemplateId, PromptTemplate> m;

        m.emplace(TemplateId::FlaeDims, make_template(
            TemplateId::FlaeDims,
            "You are a careful evaluator of long-form deep research reports. "
            "Score strictly and consistently.\nReturn only valid JSON.",
            "Task:\n{TASK_TEXT}\nReport:\n{REPORT_TEXT}\n\n"
            "Score the report on three dimensions in [0,1]:\n"
            "(1) Read.: clarity, coherence, and ease of reading.\n"
            "(2) Insh.: depth beyond surface summary; synthesis, comparisons, or "
            "non-trivial reasoning.\n"
            "(3) Stru.: report completeness and organization (sections, references, "
            "and visual integration where applicable).\n\n"
            "Output JSON with keys: read, insh, stru.",
            {"TASK_TEXT", "REPORT_TEXT"}));

        m.emplace(TemplateId::FlaeWeights, make_template(
            TemplateId::FlaeWeights,
            "You set task-adaptive importance weights. Use only the task description "
            "and observable report properties.\nReturn only valid JSON.",
            "Task:\n{TASK_TEXT}\nReport (for observables only, do not score quality "
            "here):\n{REPORT_TEXT}\n\n"
            "Produce weights over {Read., Insh., Stru.} such that they sum to 1.\n"
            "Output JSON with keys: w_read, w_insh, w_stru.",
            {"TASK_TEXT", "REPORT_TEXT"}));

        m.emplace(TemplateId::FlaeAlpha, make_template(
            TemplateId::FlaeAlpha,
            "You set a fusion coefficient alpha in [0,1] using only observable signals "
            "(length, section presence, formatting compliance).\n"
            "Do not use any model identity or external metadata.\n"
            "Return only valid JSON.",
            "Task:\n{TASK_TEXT}\nReport:\n{REPORT_TEXT}\n\n"
            "Choose alpha so that when the report is short, poorly structured, or "
            "non-compliant, the formula channel gets higher weight (larger alpha); "
            "when the report is complete and well-formed, rely more on judge scoring "
            "(smaller alpha).\n"
            "Output JSON: {\"alpha\": number}.",
            {"TASK_TEXT", "REPORT_TEXT"}));

        m.emplace(TemplateId::VefCheck, make_template(
            TemplateId::VefCheck,
            "You are a STRICT QA Judge for Vef. Use the task, the provided visual "
            "ground truth, and the report.\nReturn only valid JSON.",
            "Segment:\n{SEGMENT}\nQuestion:\n{TASK_TEXT}\n"
            "Visual ground truth (text-form requirements):\n{VEF_GT}\n"
            "Report:\n{REPORT_TEXT}\n\n"
            "Rules: any wrong visual identity is FAIL; any false presence is FAIL; "
            "missing details allowed only if no wrong identities; score below 6 must "
            "be FAIL.\n"
            "Output JSON with keys: score, reason, verdict (PASS or FAIL).",
            {"SEGMENT", "TASK_TEXT", "VEF_GT", "REPORT_TEXT"}));

        m.emplace(TemplateId::TraceSupport, make_template(
            TemplateId::TraceSupport,
            "You verify whether a factual claim is supported by the text retrieved "
            "from its cited source. Judge only from the evidence given.\n"
            "Return only valid JSON.",
            "Claim:\n{CLAIM_TEXT}\nEvidence (extracted from {URL}):\n{EVIDENCE_TEXT}\n\n"
            "Label the claim against the evidence as one of: supported, partial, "
            "missing_evidence, contradicted, over_specific, causal_inversion.\n"
            "Output JSON with keys: label, rationale.",
            {"CLAIM_TEXT", "URL", "EVIDENCE_TEXT"}));

        m.emplace(TemplateId::TraceWeights, make_template(
            TemplateId::TraceWeights,
            "You set task-adaptive importance weights. Use only the task description "
            "and observable report properties.\nReturn only valid JSON.",
            "Task:\n{TASK_TEXT}\nReport (for observables only, do not score quality "
            "here):\n{REPORT_TEXT}\n\n"
            "Produce weights over {Con., Cov., Fid.} such that they sum to 1.\n"
            "Output JSON with keys: w_con, w_cov, w_fid.",
            {"TASK_TEXT", "REPORT_TEXT"}));

        m.emplace(TemplateId::MosaicItem, make_template(
            TemplateId::MosaicItem,
            "You judge whether an image-referencing statement in a report matches the "
            "referenced visual. Use checks appropriate to the visual type.\n"
            "Return only valid JSON.",
            "Task:\n{TASK_TEXT}\nVisual type: {VISUAL_TYPE}\nImage: {IMAGE_REF}\n"
            "Statement:\n{CLAIM_TEXT}\n\n"
            "Score in [0,1]: sem (visual-semantic alignment), acc (visual data "
            "interpretation accuracy), vqa (complex visual question answering "
            "quality), f (formatting and integration).{DIAGRAM_RULE}\n"
            "Output JSON with keys: sem, acc, vqa, f{DIAGRAM_KEYS}.",
            {"TASK_TEXT", "VISUAL_TYPE", "IMAGE_REF", "CLAIM_TEXT", "DIAGRAM_RULE",
             "DIAGRAM_KEYS"}));

        return m;
    }();
    return table;
}

// Placeholder slots are {ALL_CAPS_IDENTIFIER}; anything else in braces is
// literal text.
std::vector<std::string> scan_placeholders(const std::string& text) {
    std::vector<std::string> found;
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{') continue;
        size_t j = i + 1;
        while (j < text.size() &&
               ((text[j] >= 'A' && text[j] <= 'Z') || (text[j] >= '0' && text[j] <= '9') ||
                text[j] == '_'))
            ++j;
        if (j > i + 1 && j < text.size() && text[j] == '}' && text[i + 1] >= 'A' &&
            text[i + 1] <= 'Z') {
            found.emplace_back(text.substr(i + 1, j - i - 1));
            i = j;
        }
    }
    return found;
}

std::string substitute(const std::string& text, const Bindings& bindings) {
    std::string out;
    out.reserve(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '{') {
            size_t j = i + 1;
            while (j < text.size() &&
                   ((text[j] >= 'A' && text[j] <= 'Z') || (text[j] >= '0' && text[j] <= '9') ||
                    text[j] == '_'))
                ++j;
            if (j > i + 1 && j < text.size() && text[j] == '}' && text[i + 1] >= 'A' &&
                text[i + 1] <= 'Z') {
                auto it = bindings.find(text.substr(i + 1, j - i - 1));
                if (it != bindings.end()) {
                    out += it->second;
                    i = j;
                    continue;
                }
            }
        }
        out.push_back(text[i]);
    }
    return out;
}

}  // namespace

const PromptTemplate& prompt_template(TemplateId id) {
    return template_table().at(id);
}

Result<std::string> render_prompt(const PromptTemplate& tmpl, const Bindings& bindings) {
    auto required = scan_placeholders(tmpl.system_text);
    auto user_slots = scan_placeholders(tmpl.user_text);
    required.insert(required.end(), user_slots.begin(), user_slots.end());
    std::sort(required.begin(), required.end());
    required.erase(std::unique(required.begin(), required.end()), required.end());

    for (const auto& name : required) {
        if (!bindings.count(name))
            return Result<std::string>::fail(std::string("missing binding: ") + name);
    }
    for (const auto& [name, value] : bindings) {
        (void)value;
        if (!std::binary_search(required.begin(), required.end(), name))
            return Result<std::string>::fail(std::string("unexpected binding: ") + name);
    }

    std::string rendered = "SYSTEM:\n" + substitute(tmpl.system_text, bindings) +
                           "\n\nUSER:\n" + substitute(tmpl.user_text, bindings) + "\n";
    return Result<std::string>::ok(std::move(rendered));
}

std::string template_export_text(TemplateId id) {
    const auto& tmpl = prompt_template(id);
    return "SYSTEM:\n" + tmpl.system_text + "\n\nUSER:\n" + tmpl.user_text + "\n";
}

nlohmann::json response_schema_json(TemplateId id) {
    json unit = {{"type", "number"}, {"minimum", 0.0}, {"maximum", 1.0}};
    json schema = {{"template_id", to_string(id)}, {"type", "object"}};
    switch (id) {
        case TemplateId::FlaeDims:
            schema["required"] = {"read", "insh", "stru"};
            schema["properties"] = {{"read", unit}, {"insh", unit}, {"stru", unit}};
            break;
        case TemplateId::FlaeWeights:
            schema["required"] = {"w_read", "w_insh", "w_stru"};
            schema["properties"] = {{"w_read", {{"type", "number"}, {"minimum", 0.0}}},
                                    {"w_insh", {{"type", "number"}, {"minimum", 0.0}}},
                                    {"w_stru", {{"type", "number"}, {"minimum", 0.0}}}};
            schema["normalization"] = "weights are renormalized to sum to 1";
            break;
        case TemplateId::FlaeAlpha:
            schema["required"] = {"alpha"};
            schema["properties"] = {{"alpha", unit}};
            break;
        case TemplateId::VefCheck:
            schema["required"] = {"score", "reason", "verdict"};
            schema["properties"] = {
                {"score", {{"type", "integer"}, {"minimum", 0}, {"maximum", 10}}},
                {"reason", {{"type", "string"}}},
                {"verdict", {{"enum", {"PASS", "FAIL"}}}}};
            break;
        case TemplateId::TraceSupport:
            schema["required"] = {"label", "rationale"};
            schema["properties"] = {
                {"label",
                 {{"enum", {"supported", "partial", "missing_evidence", "contradicted",
                            "over_specific", "causal_inversion"}}}},
                {"rationale", {{"type", "string"}}}};
            break;
        case TemplateId::TraceWeights:
            schema["required"] = {"w_con", "w_cov", "w_fid"};
            schema["properties"] = {{"w_con", {{"type", "number"}, {"minimum", 0.0}}},
                                    {"w_cov", {{"type", "number"}, {"minimum", 0.0}}},
                                    {"w_fid", {{"type", "number"}, {"minimum", 0.0}}}};
            schema["normalization"] = "weights are renormalized to sum to 1";
            break;
        case TemplateId::MosaicItem:
            schema["required"] = {"sem", "acc", "vqa", "f"};
            schema["properties"] = {{"sem", unit}, {"acc", unit}, {"vqa", unit}, {"f", unit},
                                    {"h", unit}};
            schema["h_rule"] = "h is required iff the routed visual type is diagram";
            break;
    }
    return schema;
}

// =============================================================================
// Payload validation
// =============================================================================

namespace {

bool get_unit(const json& payload, const char* key, double* out) {
    auto it = payload.find(key);
    if (it == payload.end() || !it->is_number()) return false;
    double v = it->get<double>();
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) return false;
    *out = v;
    return true;
}

bool get_nonneg(const json& payload, const char* key, double* out) {
    auto it = payload.find(key);
    if (it == payload.end() || !it->is_number()) return false;
    double v = it->get<double>();
    if (!std::isfinite(v) || v < 0.0) return false;
    *out = v;
    return true;
}

Result<json> validate_weights(const json& payload, const char* k1, const char* k2,
                              const char* k3, bool* renormalized) {
    double a, b, c;
    if (!get_nonneg(payload, k1, &a) || !get_nonneg(payload, k2, &b) ||
        !get_nonneg(payload, k3, &c))
        return Result<json>::fail("weight payload: keys must be finite non-negative numbers");
    double sum = a + b + c;
    if (sum <= 0.0) return Result<json>::fail("weight payload: weights sum to zero");
    if (renormalized) *renormalized = std::abs(sum - 1.0) > 1e-9;
    return Result<json>::ok(json{{k1, a / sum}, {k2, b / sum}, {k3, c / sum}});
}

}  // namespace

Result<json> validate_payload(TemplateId id, const json& payload, const ValidationContext& ctx,
                              bool* renormalized) {
    if (renormalized) *renormalized = false;
    if (!payload.is_object()) return Result<json>::fail("payload is not a JSON object");

    switch (id) {
        case TemplateId::FlaeDims: {
            double r, i, s;
            if (!get_unit(payload, "read", &r) || !get_unit(payload, "insh", &i) ||
                !get_unit(payload, "stru", &s))
                return Result<json>::fail("flae_dims: read/insh/stru must be numbers in [0,1]");
            return Result<json>::ok(json{{"read", r}, {"insh", i}, {"stru", s}});
        }
        case TemplateId::FlaeWeights:
            return validate_weights(payload, "w_read", "w_insh", "w_stru", renormalized);
        case TemplateId::TraceWeights:
            return validate_weights(payload, "w_con", "w_cov", "w_fid", renormalized);
        case TemplateId::FlaeAlpha: {
            double a;
            if (!get_unit(payload, "alpha", &a))
                return Result<json>::fail("flae_alpha: alpha must be a number in [0,1]");
            return Result<json>::ok(json{{"alpha", a}});
        }
        case TemplateId::VefCheck: {
            auto score_it = payload.find("score");
            if (score_it == payload.end() || !score_it->is_number())
                return Result<json>::fail("vef_check: score must be an integer in 0..10");
            double raw = score_it->get<double>();
            if (!std::isfinite(raw) || raw != std::floor(raw) || raw < 0.0 || raw > 10.0)
                return Result<json>::fail("vef_check: score must be an integer in 0..10");
            auto verdict_it = payload.find("verdict");
            if (verdict_it == payload.end() || !verdict_it->is_string())
                return Result<json>::fail("vef_check: verdict must be PASS or FAIL");
            std::string verdict = verdict_it->get<std::string>();
            if (verdict != "PASS" && verdict != "FAIL")
                return Result<json>::fail("vef_check: verdict must be PASS or FAIL");
            std::string reason;
            if (auto it = payload.find("reason"); it != payload.end() && it->is_string())
                reason = it->get<std::string>();
            return Result<json>::ok(json{{"score", static_cast<int>(raw)},
                                         {"reason", reason},
                                         {"verdict", verdict}});
        }
        case TemplateId::TraceSupport: {
            auto label_it = payload.find("label");
            if (label_it == payload.end() || !label_it->is_string())
                return Result<json>::fail("trace_support: label missing");
            std::string label = label_it->get<std::string>();
            static const char* allowed[] = {"supported",     "partial",
                                            "missing_evidence", "contradicted",
                                            "over_specific", "causal_inversion"};
            bool ok = false;
            for (const char* a : allowed)
                if (label == a) ok = true;
            if (!ok) return Result<json>::fail("trace_support: unknown label: " + label);
            std::string rationale;
            if (auto it = payload.find("rationale"); it != payload.end() && it->is_string())
                rationale = it->get<std::string>();
            return Result<json>::ok(json{{"label", label}, {"rationale", rationale}});
        }
        case TemplateId::MosaicItem: {
            double sem, acc, vqa, f;
            if (!get_unit(payload, "sem", &sem) || !get_unit(payload, "acc", &acc) ||
                !get_unit(payload, "vqa", &vqa) || !get_unit(payload, "f", &f))
                return Result<json>::fail("mosaic_item: sem/acc/vqa/f must be numbers in [0,1]");
            json out = {{"sem", sem}, {"acc", acc}, {"vqa", vqa}, {"f", f}};
            bool has_h = payload.contains("h");
            if (ctx.expects_hallucination_factor) {
                double h;
                if (!get_unit(payload, "h", &h))
                    return Result<json>::fail(
                        "mosaic_item: diagram payload requires h in [0,1]");
                out["h"] = h;
            } else if (has_h) {
                return Result<json>::fail(
                    "mosaic_item: h is only valid for diagram items");
            }
            return Result<json>::ok(std::move(out));
        }
    }
    return Result<json>::fail("unknown template id");
}

Result<std::string> extract_json_object(const std::string& text) {
    size_t start = text.find('{');
    while (start != std::string::npos) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                --depth;
                if (depth == 0) return Result<std::string>::ok(text.substr(start, i - start + 1));
            }
        }
        start = text.find('{', start + 1);
    }
    return Result<std::string>::fail("no JSON object found in response");
}

// =============================================================================
// Mock backend
// =============================================================================

MockJudge::MockJudge(std::uint64_t seed)
    : MockJudge(seed, seed == 0 ? MockProfile::Strict : MockProfile::HashBased) {}

MockJudge::MockJudge(std::uint64_t seed, MockProfile profile) : seed_(seed), profile_(profile) {}

std::string MockJudge::id() const {
    const char* p = profile_ == MockProfile::AllOnes ? "all-ones"
                    : profile_ == MockProfile::Strict ? "strict"
                                                      : "hash";
    return "mock:" + std::to_string(seed_) + ":" + p;
}

namespace {

double unit_from(std::uint64_t& state) {
    double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    return std::round(u * 10000.0) / 10000.0;
}

std::string section_between(const std::string& text, const std::string& begin,
                            const std::string& end) {
    size_t b = text.find(begin);
    if (b == std::string::npos) return {};
    b += begin.size();
    size_t e = text.find(end, b);
    if (e == std::string::npos) return text.substr(b);
    return text.substr(b, e - b);
}

}  // namespace

Result<std::string> MockJudge::complete(const std::string& prompt, TemplateId id) {
    std::uint64_t state = fnv1a64(prompt, seed_ ^ fnv1a64(to_string(id)));
    const bool all_ones = profile_ == MockProfile::AllOnes;
    json out;
    switch (id) {
        case TemplateId::FlaeDims:
            out = all_ones ? json{{"read", 1.0}, {"insh", 1.0}, {"stru", 1.0}}
                           : json{{"read", unit_from(state)},
                                  {"insh", unit_from(state)},
                                  {"stru", unit_from(state)}};
            break;
        case TemplateId::FlaeWeights:
            out = all_ones ? json{{"w_read", 1.0}, {"w_insh", 1.0}, {"w_stru", 1.0}}
                           : json{{"w_read", 0.05 + unit_from(state)},
                                  {"w_insh", 0.05 + unit_from(state)},
                                  {"w_stru", 0.05 + unit_from(state)}};
            break;
        case TemplateId::TraceWeights:
            out = all_ones ? json{{"w_con", 1.0}, {"w_cov", 1.0}, {"w_fid", 1.0}}
                           : json{{"w_con", 0.05 + unit_from(state)},
                                  {"w_cov", 0.05 + unit_from(state)},
                                  {"w_fid", 0.05 + unit_from(state)}};
            break;
        case TemplateId::FlaeAlpha:
            out = all_ones ? json{{"alpha", 1.0}} : json{{"alpha", unit_from(state)}};
            break;
        case TemplateId::VefCheck: {
            if (profile_ == MockProfile::Strict) {
                out = json{{"score", 0}, {"reason", "strict profile"}, {"verdict", "FAIL"}};
            } else if (all_ones) {
                out = json{{"score", 10}, {"reason", "all-ones profile"}, {"verdict", "PASS"}};
            } else {
                int score = static_cast<int>(splitmix64(state) % 11);
                bool pass = unit_from(state) >= 0.5;
                out = json{{"score", score},
                           {"reason", "hash profile"},
                           {"verdict", pass ? "PASS" : "FAIL"}};
            }
            break;
        }
        case TemplateId::TraceSupport: {
            // String-containment profile: supported iff the normalized claim
            // text occurs in the normalized evidence text.
            std::string claim =
                section_between(prompt, "Claim:\n", "\nEvidence (extracted from ");
            std::string evidence = section_between(prompt, "):\n", "\n\nLabel the claim");
            std::string nc = normalize_for_dedup(claim);
            std::string ne = normalize_for_dedup(evidence);
            bool contained = !nc.empty() && ne.find(nc) != std::string::npos;
            out = json{{"label", contained ? "supported" : "missing_evidence"},
                       {"rationale", contained ? "claim text found in evidence"
                                               : "claim text not found in evidence"}};
            break;
        }
        case TemplateId::MosaicItem: {
            bool diagram = prompt.find("Visual type: diagram") != std::string::npos;
            if (all_ones) {
                out = json{{"sem", 1.0}, {"acc", 1.0}, {"vqa", 1.0}, {"f", 1.0}};
                if (diagram) out["h"] = 0.0;
            } else {
                out = json{{"sem", unit_from(state)},
                           {"acc", unit_from(state)},
                           {"vqa", unit_from(state)},
                           {"f", unit_from(state)}};
                if (diagram) out["h"] = unit_from(state);
            }
            break;
        }
    }
    return Result<std::string>::ok(out.dump());
}

std::unique_ptr<JudgeBackend> mock_judge(std::uint64_t seed) {
    return std::make_unique<MockJudge>(seed);
}

// =============================================================================
// Scripted backend
// =============================================================================

ScriptedJudge::ScriptedJudge(std::vector<std::string> responses, bool repeat_last)
    : responses_(std::move(responses)), repeat_last_(repeat_last) {}

Result<std::string> ScriptedJudge::complete(const std::string& prompt, TemplateId id) {
    (void)prompt;
    (void)id;
    std::lock_guard<std::mutex> lock(mutex_);
    if (next_ >= responses_.size()) {
        if (repeat_last_ && !responses_.empty())
            return Result<std::string>::ok(responses_.back());
        return Result<std::string>::fail("scripted backend exhausted");
    }
    return Result<std::string>::ok(responses_[next_++]);
}

// =============================================================================
// Gateway
// =============================================================================

JudgeGateway::JudgeGateway(std::shared_ptr<JudgeBackend> backend, JudgeBackendConfig config)
    : backend_(std::move(backend)),
      config_(std::move(config)),
      gate_(std::make_unique<InflightGate>(config_.max_inflight)) {}

std::vector<AttemptLogEntry> JudgeGateway::attempt_log() const {
    std::lock_guard<std::mutex> lock(log_mutex_);
    return log_;
}

Result<JudgeVerdict> JudgeGateway::invoke(TemplateId id, const Bindings& bindings,
                                          const ValidationContext& ctx) {
    auto rendered = render_prompt(prompt_template(id), bindings);
    if (!rendered)
        return Result<JudgeVerdict>::fail("configuration error: " + rendered.error());
    return invoke_with_prompt(rendered.value(), id, ctx);
}

Result<JudgeVerdict> JudgeGateway::invoke_with_prompt(const std::string& prompt, TemplateId id,
                                                      const ValidationContext& ctx) {
    const int max_attempts = std::max(1, config_.max_attempts);
    std::string current_prompt = prompt;
    std::string last_error = "no attempts made";
    bool reminder_appended = false;

    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        gate_->acquire();
        auto response = backend_->complete(current_prompt, id);
        gate_->release();

        std::string note;
        bool ok = false;
        if (!response) {
            note = "transport: " + response.error();
            last_error = note;
        } else {
            auto object_text = extract_json_object(response.value());
            if (!object_text) {
                note = object_text.error();
                last_error = note;
            } else {
                json payload = json::parse(object_text.value(), nullptr, false);
                if (payload.is_discarded()) {
                    note = "response is not valid JSON";
                    last_error = note;
                } else {
                    bool renormalized = false;
                    auto validated = validate_payload(id, payload, ctx, &renormalized);
                    if (!validated) {
                        note = validated.error();
                        last_error = note;
                    } else {
                        JudgeVerdict verdict;
                        verdict.template_id = id;
                        verdict.parsed_payload = validated.take();
                        verdict.raw_text = response.value();
                        verdict.backend_id = backend_->id();
                        verdict.attempt_count = attempt;
                        verdict.weights_renormalized = renormalized;
                        {
                            std::lock_guard<std::mutex> lock(log_mutex_);
                            log_.push_back({id, attempt, true, ""});
                        }
                        return Result<JudgeVerdict>::ok(std::move(verdict));
                    }
                }
            }
        }
        {
            std::lock_guard<std::mutex> lock(log_mutex_);
            log_.push_back({id, attempt, ok, note});
        }
        if (attempt < max_attempts && !reminder_appended) {
            current_prompt += "\nReturn only valid JSON.\n";
            reminder_appended = true;
        }
    }
    return Result<JudgeVerdict>::fail("judge failure (" + std::string(to_string(id)) +
                                      "): " + last_error);
}

// =============================================================================
// HTTP backend
// =============================================================================

namespace {

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : fallback;
}

}  // namespace

class HttpJudge : public JudgeBackend {
public:
    explicit HttpJudge(JudgeBackendConfig config) : config_(std::move(config)) {
        if (config_.endpoint.empty())
            config_.endpoint = env_or("REPEVAL_JUDGE_ENDPOINT", "");
        if (config_.model_identifier.empty() || config_.model_identifier == "judge-default")
            config_.model_identifier = env_or("REPEVAL_JUDGE_MODEL", config_.model_identifier);
        api_key_ = env_or("REPEVAL_JUDGE_API_KEY", "");
    }

    std::string id() const override { return "http:" + config_.model_identifier; }
    Result<std::string> complete(const std::string& prompt, TemplateId id) override;

private:
    JudgeBackendConfig config_;
    std::string api_key_;
};

std::unique_ptr<JudgeBackend> make_http_judge(const JudgeBackendConfig& config) {
    return std::make_unique<HttpJudge>(config);
}

}  // namespace repeval

#include <httplib.h>

namespace repeval {

Result<std::string> HttpJudge::complete(const std::string& prompt, TemplateId id) {
    (void)id;
    if (config_.endpoint.empty())
        return Result<std::string>::fail(
            "API misconfiguration: REPEVAL_JUDGE_ENDPOINT is not set");

    // endpoint = scheme://host[:port][/path]
    std::string endpoint = config_.endpoint;
    size_t scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        return Result<std::string>::fail("API misconfiguration: endpoint has no scheme");
    size_t path_start = endpoint.find('/', scheme_end + 3);
    std::string base = endpoint.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : endpoint.substr(path_start);

    httplib::Client client(base);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    json body = {{"model", config_.model_identifier},
                 {"temperature", config_.temperature},
                 {"prompt", prompt}};
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) return Result<std::string>::fail("API error: connection failed");
    if (res->status < 200 || res->status >= 300)
        return Result<std::string>::fail("API error: HTTP " + std::to_string(res->status));

    json parsed = json::parse(res->body, nullptr, false);
    if (!parsed.is_discarded()) {
        if (parsed.contains("text") && parsed["text"].is_string())
            return Result<std::string>::ok(parsed["text"].get<std::string>());
        if (parsed.contains("choices") && parsed["choices"].is_array() &&
            !parsed["choices"].empty()) {
            const auto& first = parsed["choices"][0];
            if (first.contains("message") && first["message"].contains("content"))
                return Result<std::string>::ok(first["message"]["content"].get<std::string>());
            if (first.contains("text"))
                return Result<std::string>::ok(first["text"].get<std::string>());
        }
    }
    return Result<std::string>::ok(res->body);
}

}  // namespace repeval

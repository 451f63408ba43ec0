/// @file judge.hpp
/// @brief Judge prompt rendering, backend transport, and schema validation.
///
/// Every verdict consumed anywhere in the scoring pipeline has passed the
/// schema check for its template; raw judge text never flows downstream.
/// Transport and validation failures surface as Result errors whose strings
/// feed the reason-aware N/A handling.

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "repeval/common.hpp"

namespace repeval {

inline constexpr const char* kPromptVersion = "v1";

enum class TemplateId {
    FlaeDims,
    FlaeWeights,
    FlaeAlpha,
    VefCheck,
    TraceSupport,
    TraceWeights,
    MosaicItem,
};

const char* to_string(TemplateId id);
std::optional<TemplateId> template_id_from_string(const std::string& name);
const std::vector<TemplateId>& all_template_ids();

struct PromptTemplate {
    TemplateId id;
    std::string system_text;
    std::string user_text;                  // contains {PLACEHOLDER} slots
    std::vector<std::string> placeholders;  // exact binding set required
};

const PromptTemplate& prompt_template(TemplateId id);

using Bindings = std::map<std::string, std::string>;

/// Byte-deterministic render. Bindings must cover exactly the template's
/// placeholders; a missing or extra key is a configuration error naming it.
Result<std::string> render_prompt(const PromptTemplate& tmpl, const Bindings& bindings);

/// Template text in its exportable form (system + user with raw slots).
std::string template_export_text(TemplateId id);

/// Machine-readable description of the expected response payload.
nlohmann::json response_schema_json(TemplateId id);

/// Extra validation inputs that depend on the call site.
struct ValidationContext {
    bool expects_hallucination_factor = false;  // mosaic_item for diagrams
};

/// Validate and normalize a parsed payload for a template. Weight payloads
/// come back renormalized to sum exactly 1; `renormalized` reports whether
/// that changed anything beyond 1e-9.
Result<nlohmann::json> validate_payload(TemplateId id, const nlohmann::json& payload,
                                        const ValidationContext& ctx, bool* renormalized);

/// First balanced JSON object embedded in `text`, or an error.
Result<std::string> extract_json_object(const std::string& text);

struct JudgeVerdict {
    TemplateId template_id = TemplateId::FlaeDims;
    nlohmann::json parsed_payload;
    std::string raw_text;
    std::string backend_id;
    int attempt_count = 1;
    bool weights_renormalized = false;
};

class JudgeBackend {
public:
    virtual ~JudgeBackend() = default;
    virtual std::string id() const = 0;
    virtual Result<std::string> complete(const std::string& prompt, TemplateId id) = 0;
};

struct JudgeBackendConfig {
    std::string backend_id = "mock";
    std::string endpoint;  // opaque connection descriptor; env-provided for http
    std::string model_identifier = "judge-default";
    double temperature = 0.2;
    int max_attempts = 3;
    int max_inflight = 4;
};

/// Deterministic offline judge. Responses are a pure function of
/// (seed, template_id, prompt bytes). Profiles:
///   * HashBased  - pseudo-random but reproducible payloads
///   * AllOnes    - perfect scores everywhere
///   * Strict     - vef_check always returns score 0 / FAIL
/// Seed 0 selects the strict profile. The trace_support template is always
/// answered by string containment of the claim in the evidence.
enum class MockProfile { HashBased, AllOnes, Strict };

class MockJudge : public JudgeBackend {
public:
    explicit MockJudge(std::uint64_t seed);
    MockJudge(std::uint64_t seed, MockProfile profile);
    std::string id() const override;
    Result<std::string> complete(const std::string& prompt, TemplateId id) override;

private:
    std::uint64_t seed_;
    MockProfile profile_;
};

/// Test backend replaying a fixed response sequence.
class ScriptedJudge : public JudgeBackend {
public:
    explicit ScriptedJudge(std::vector<std::string> responses, bool repeat_last = false);
    std::string id() const override { return "scripted"; }
    Result<std::string> complete(const std::string& prompt, TemplateId id) override;

private:
    std::vector<std::string> responses_;
    std::size_t next_ = 0;
    bool repeat_last_;
    std::mutex mutex_;
};

/// HTTP backend POSTing {model, temperature, prompt} to the configured
/// endpoint. Endpoint and credentials come from the environment
/// (REPEVAL_JUDGE_ENDPOINT, REPEVAL_JUDGE_API_KEY, REPEVAL_JUDGE_MODEL)
/// or from the config, never from CLI arguments.
std::unique_ptr<JudgeBackend> make_http_judge(const JudgeBackendConfig& config);

/// Convenience factory for the deterministic mock.
std::unique_ptr<JudgeBackend> mock_judge(std::uint64_t seed);

struct AttemptLogEntry {
    TemplateId template_id;
    int attempt;
    bool ok;
    std::string note;
};

/// Renders prompts, invokes the backend with bounded retries, validates
/// payloads. Thread-safe; enforces a per-backend in-flight limit.
class JudgeGateway {
public:
    JudgeGateway(std::shared_ptr<JudgeBackend> backend, JudgeBackendConfig config);

    Result<JudgeVerdict> invoke(TemplateId id, const Bindings& bindings,
                                const ValidationContext& ctx = {});
    Result<JudgeVerdict> invoke_with_prompt(const std::string& prompt, TemplateId id,
                                            const ValidationContext& ctx = {});

    const JudgeBackendConfig& config() const { return config_; }
    std::vector<AttemptLogEntry> attempt_log() const;

private:
    std::shared_ptr<JudgeBackend> backend_;
    JudgeBackendConfig config_;
    mutable std::mutex log_mutex_;
    std::vector<AttemptLogEntry> log_;
    std::unique_ptr<InflightGate> gate_;
};

}  // namespace repeval

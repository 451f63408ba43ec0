#include "repeval/flae.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "repeval/text.hpp"

namespace repeval {

const char* to_string(AlphaSource source) {
    return source == AlphaSource::Judge ? "judge" : "deterministic";
}

namespace {

constexpr const char* kDimNames[3] = {"read", "insh", "stru"};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

const FormulaCoefficients& formula_coefficients_v1() {
    static const FormulaCoefficients v1 = [] {
        FormulaCoefficients c;
        c.version_id = "v1";
        c.coefficients[0] = {{"lexical_diversity", 2.6},
                             {"repetition_score", -1.6},
                             {"sentence_len_mean", 0.01},
                             {"sentence_len_std", -0.015}};
        c.bias[0] = -0.8;
        c.coefficients[1] = {{"lexical_diversity", 1.6},
                             {"citation_density", 0.35},
                             {"length_completeness", 2.4}};
        c.bias[1] = -2.2;
        c.coefficients[2] = {{"heading_coverage", 2.8},
                             {"has_references_block", 1.4},
                             {"length_completeness", 1.6}};
        c.bias[2] = -2.6;
        return c;
    }();
    return v1;
}

Result<FormulaCoefficients> parse_formula_coefficients(const std::string& file_body) {
    FormulaCoefficients coeffs;
    std::istringstream in(file_body);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            return Result<FormulaCoefficients>::fail("coefficients: missing '=' in: " + t);
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key == "version") {
            coeffs.version_id = value;
            continue;
        }
        size_t dot = key.find('.');
        if (dot == std::string::npos)
            return Result<FormulaCoefficients>::fail("coefficients: bad key: " + key);
        std::string dim = key.substr(0, dot);
        std::string field = key.substr(dot + 1);
        int d = -1;
        for (int i = 0; i < 3; ++i)
            if (dim == kDimNames[i]) d = i;
        if (d < 0) return Result<FormulaCoefficients>::fail("coefficients: bad dimension: " + dim);
        double v = 0.0;
        try {
            v = std::stod(value);
        } catch (...) {
            return Result<FormulaCoefficients>::fail("coefficients: bad number: " + value);
        }
        if (field == "bias") {
            coeffs.bias[static_cast<size_t>(d)] = v;
        } else {
            coeffs.coefficients[static_cast<size_t>(d)][field] = v;
        }
    }
    if (coeffs.version_id.empty())
        return Result<FormulaCoefficients>::fail("coefficients: missing version");
    return Result<FormulaCoefficients>::ok(std::move(coeffs));
}

Result<FormulaCoefficients> load_formula_coefficients(const std::string& path) {
    std::ifstream in(path);
    if (!in) return Result<FormulaCoefficients>::fail("coefficients: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_formula_coefficients(buffer.str());
}

std::string formula_coefficients_to_string(const FormulaCoefficients& coeffs) {
    std::ostringstream out;
    out << "version = " << coeffs.version_id << "\n";
    for (int d = 0; d < 3; ++d) {
        out << kDimNames[d] << ".bias = " << coeffs.bias[static_cast<size_t>(d)] << "\n";
        for (const auto& [field, value] : coeffs.coefficients[static_cast<size_t>(d)])
            out << kDimNames[d] << "." << field << " = " << value << "\n";
    }
    return out.str();
}

Result<DimTriple> formula_scores(const FeatureVector& features,
                                 const FormulaCoefficients& coeffs) {
    DimTriple scores{};
    for (size_t d = 0; d < 3; ++d) {
        double z = coeffs.bias[d];
        for (const auto& [field, weight] : coeffs.coefficients[d]) {
            auto value = feature_field(features, field);
            if (!value)
                return Result<DimTriple>::fail("configuration error: coefficient references " +
                                               field);
            z += weight * value.value();
        }
        scores[d] = clip01(sigmoid(z));
    }
    return Result<DimTriple>::ok(scores);
}

ComplianceSignals compute_compliance_signals(const ReportDocument& doc, const CitationMap& map,
                                             const FeatureVector& features) {
    ComplianceSignals signals;
    signals.length_completeness = features.length_completeness;
    signals.heading_coverage = features.heading_coverage;

    auto occurrences = body_marker_occurrences(doc);
    if (!occurrences.empty()) {
        std::size_t resolved = 0;
        for (int idx : occurrences)
            if (map.entries.count(idx)) ++resolved;
        signals.citation_compliance =
            static_cast<double>(resolved) / static_cast<double>(occurrences.size());
    }

    if (doc.has_references_heading) {
        std::size_t well_formed = 0;
        for (const auto& entry : doc.references_block)
            if (is_valid_http_url(entry.url)) ++well_formed;
        bool clean = well_formed >= 1 && map.duplicate_indices.empty();
        signals.reference_validity = clean ? 1.0 : 0.5;
    }
    return signals;
}

double deterministic_alpha(const ComplianceSignals& s) {
    return clip01(1.0 - (0.35 * s.length_completeness + 0.35 * s.heading_coverage +
                         0.20 * s.citation_compliance + 0.10 * s.reference_validity));
}

FlaeBreakdown flae_score(const DimTriple& s_form, const DimTriple& s_judge, double alpha,
                         AlphaSource alpha_source, const DimTriple& weights,
                         bool weights_fallback) {
    FlaeBreakdown breakdown;
    breakdown.s_form = s_form;
    breakdown.s_judge = s_judge;
    breakdown.alpha = alpha;
    breakdown.alpha_source = alpha_source;
    breakdown.weights = weights;
    breakdown.weights_fallback = weights_fallback;
    double total = 0.0;
    for (size_t d = 0; d < 3; ++d) {
        breakdown.s_fused[d] = alpha * s_form[d] + (1.0 - alpha) * s_judge[d];
        total += weights[d] * breakdown.s_fused[d];
    }
    breakdown.score = 100.0 * total;
    return breakdown;
}

Result<DimTriple> judge_dim_scores(JudgeGateway& gateway, const std::string& task_text,
                                   const std::string& report_text) {
    auto verdict = gateway.invoke(TemplateId::FlaeDims,
                                  {{"TASK_TEXT", task_text}, {"REPORT_TEXT", report_text}});
    if (!verdict) return Result<DimTriple>::fail(verdict.error());
    const auto& payload = verdict.value().parsed_payload;
    return Result<DimTriple>::ok(DimTriple{payload["read"].get<double>(),
                                           payload["insh"].get<double>(),
                                           payload["stru"].get<double>()});
}

Result<double> judge_alpha(JudgeGateway& gateway, const std::string& task_text,
                           const std::string& report_text) {
    auto verdict = gateway.invoke(TemplateId::FlaeAlpha,
                                  {{"TASK_TEXT", task_text}, {"REPORT_TEXT", report_text}});
    if (!verdict) return Result<double>::fail(verdict.error());
    return Result<double>::ok(verdict.value().parsed_payload["alpha"].get<double>());
}

DimTriple task_dim_weights(JudgeGateway& gateway, const std::string& task_text,
                           const std::string& report_text, bool* fallback_used) {
    if (fallback_used) *fallback_used = false;
    auto verdict = gateway.invoke(TemplateId::FlaeWeights,
                                  {{"TASK_TEXT", task_text}, {"REPORT_TEXT", report_text}});
    if (!verdict) {
        if (fallback_used) *fallback_used = true;
        return DimTriple{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    }
    const auto& payload = verdict.value().parsed_payload;
    return DimTriple{payload["w_read"].get<double>(), payload["w_insh"].get<double>(),
                     payload["w_stru"].get<double>()};
}

}  // namespace repeval

/// @file features.hpp
/// @brief Deterministic text features feeding the formula scoring channel.

#pragma once

#include <string>
#include <vector>

#include "repeval/common.hpp"
#include "repeval/report.hpp"
#include "repeval/text.hpp"

namespace repeval {

/// Normalization constants for feature computation. Shipped as a versioned
/// key-value file; compiled-in defaults match share/config/features_v1.conf.
struct FeatureConfig {
    std::string version = "v1";
    std::size_t target_words = 2000;
    std::size_t target_headings = 5;
    std::vector<std::string> abbreviations = default_abbreviations();
};

/// Parse a "key = value" config file body. Unknown keys are errors.
Result<FeatureConfig> parse_feature_config(const std::string& file_body);
Result<FeatureConfig> load_feature_config(const std::string& path);
std::string feature_config_to_string(const FeatureConfig& config);

/// Pure function of (raw_text, config). All ratios live in [0,1];
/// citation_density is citations per 100 tokens and unbounded above.
struct FeatureVector {
    double lexical_diversity = 0.0;
    double repetition_score = 0.0;
    double heading_coverage = 0.0;
    double sentence_len_mean = 0.0;
    double sentence_len_std = 0.0;
    double citation_density = 0.0;
    bool has_references_block = false;
    double length_completeness = 0.0;
};

/// Feature field accessor by documented name; empty optional for unknown
/// names. has_references_block reads as 0/1.
std::vector<std::string> feature_field_names();
Result<double> feature_field(const FeatureVector& features, const std::string& name);

FeatureVector compute_text_features(const ReportDocument& doc, const FeatureConfig& config);

}  // namespace repeval

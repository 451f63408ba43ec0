#include "repeval/features.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "repeval/text.hpp"

namespace repeval {

Result<FeatureConfig> parse_feature_config(const std::string& file_body) {
    FeatureConfig config;
    std::istringstream in(file_body);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            return Result<FeatureConfig>::fail("feature config: missing '=' in line: " + t);
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key == "version") {
            config.version = value;
        } else if (key == "target_words") {
            config.target_words = static_cast<std::size_t>(std::stoul(value));
        } else if (key == "target_headings") {
            config.target_headings = static_cast<std::size_t>(std::stoul(value));
        } else if (key == "abbreviations") {
            config.abbreviations.clear();
            std::istringstream items(value);
            std::string item;
            while (std::getline(items, item, ',')) {
                std::string a = trim(item);
                if (!a.empty()) config.abbreviations.push_back(to_lower(a));
            }
        } else {
            return Result<FeatureConfig>::fail("feature config: unknown key: " + key);
        }
    }
    if (config.target_words == 0)
        return Result<FeatureConfig>::fail("feature config: target_words must be positive");
    return Result<FeatureConfig>::ok(std::move(config));
}

Result<FeatureConfig> load_feature_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) return Result<FeatureConfig>::fail("feature config: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_feature_config(buffer.str());
}

std::string feature_config_to_string(const FeatureConfig& config) {
    std::ostringstream out;
    out << "version = " << config.version << "\n";
    out << "target_words = " << config.target_words << "\n";
    out << "target_headings = " << config.target_headings << "\n";
    out << "abbreviations = ";
    for (size_t i = 0; i < config.abbreviations.size(); ++i) {
        if (i) out << ",";
        out << config.abbreviations[i];
    }
    out << "\n";
    return out.str();
}

std::vector<std::string> feature_field_names() {
    return {"lexical_diversity", "repetition_score",  "heading_coverage",
            "sentence_len_mean", "sentence_len_std",  "citation_density",
            "has_references_block", "length_completeness"};
}

Result<double> feature_field(const FeatureVector& f, const std::string& name) {
    if (name == "lexical_diversity") return Result<double>::ok(f.lexical_diversity);
    if (name == "repetition_score") return Result<double>::ok(f.repetition_score);
    if (name == "heading_coverage") return Result<double>::ok(f.heading_coverage);
    if (name == "sentence_len_mean") return Result<double>::ok(f.sentence_len_mean);
    if (name == "sentence_len_std") return Result<double>::ok(f.sentence_len_std);
    if (name == "citation_density") return Result<double>::ok(f.citation_density);
    if (name == "has_references_block")
        return Result<double>::ok(f.has_references_block ? 1.0 : 0.0);
    if (name == "length_completeness") return Result<double>::ok(f.length_completeness);
    return Result<double>::fail("unknown feature field: " + name);
}

FeatureVector compute_text_features(const ReportDocument& doc, const FeatureConfig& config) {
    FeatureVector features;
    features.has_references_block = doc.has_references_heading;
    if (doc.word_count == 0) return features;

    auto tokens = tokenize(doc.raw_text);
    if (!tokens.empty()) {
        std::set<std::string> distinct;
        for (const auto& token : tokens) distinct.insert(to_lower(token));
        features.lexical_diversity =
            clip01(static_cast<double>(distinct.size()) / static_cast<double>(tokens.size()));
    }

    // Repetition as the repeated share of lowercase token trigrams.
    if (tokens.size() >= 3) {
        std::set<std::string> trigrams;
        const size_t total = tokens.size() - 2;
        for (size_t i = 0; i < total; ++i) {
            trigrams.insert(to_lower(tokens[i]) + "\x1f" + to_lower(tokens[i + 1]) + "\x1f" +
                            to_lower(tokens[i + 2]));
        }
        features.repetition_score =
            clip01(1.0 - static_cast<double>(trigrams.size()) / static_cast<double>(total));
    }

    if (config.target_headings > 0) {
        features.heading_coverage = clip01(static_cast<double>(doc.headings.size()) /
                                           static_cast<double>(config.target_headings));
    }

    std::vector<double> sentence_lengths;
    for (const auto& segment : doc.body_segments) {
        for (const auto& sentence : split_sentences(segment.text, config.abbreviations)) {
            double len = static_cast<double>(count_tokens(sentence));
            if (len > 0) sentence_lengths.push_back(len);
        }
    }
    const std::size_t marker_count = body_marker_occurrences(doc).size();
    if (!sentence_lengths.empty()) {
        double sum = 0.0;
        for (double len : sentence_lengths) sum += len;
        double mean = sum / static_cast<double>(sentence_lengths.size());
        double var = 0.0;
        for (double len : sentence_lengths) var += (len - mean) * (len - mean);
        var /= static_cast<double>(sentence_lengths.size());
        features.sentence_len_mean = mean;
        features.sentence_len_std = std::sqrt(var);
    }

    features.citation_density =
        100.0 * static_cast<double>(marker_count) / static_cast<double>(doc.word_count);
    features.length_completeness = clip01(static_cast<double>(doc.word_count) /
                                          static_cast<double>(config.target_words));
    return features;
}

}  // namespace repeval

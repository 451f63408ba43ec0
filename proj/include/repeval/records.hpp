/// @file records.hpp
/// @brief Line-delimited record serialization and the per-pair audit export.
///
/// One EvaluationRecord per line, keys sorted, schema versioned. Identical
/// records serialize to identical bytes.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "repeval/common.hpp"
#include "repeval/pipeline.hpp"

namespace repeval {

nlohmann::json record_to_json(const EvaluationRecord& record);
Result<EvaluationRecord> record_from_json(const nlohmann::json& j);

std::string records_to_jsonl(const std::vector<EvaluationRecord>& records);
Result<std::vector<EvaluationRecord>> records_from_jsonl(const std::string& body);

Result<bool> write_records_file(const std::string& path,
                                const std::vector<EvaluationRecord>& records);
Result<std::vector<EvaluationRecord>> read_records_file(const std::string& path);

/// One audit line per claim-URL pair: claim text, URL, fetch status, label,
/// rationale, plus task/system identifiers.
std::string audit_jsonl(const std::vector<EvaluationRecord>& records);
Result<bool> write_audit_file(const std::string& path,
                              const std::vector<EvaluationRecord>& records);

}  // namespace repeval

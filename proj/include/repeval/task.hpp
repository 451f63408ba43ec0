/// @file task.hpp
/// @brief Benchmark task bundles: one directory per task with a manifest,
/// textualized visual ground truth, and an image list.

#pragma once

#include <string>
#include <vector>

#include "repeval/common.hpp"

namespace repeval {

struct TaskBundle {
    std::string task_id;
    std::string query;
    std::string domain;
    std::string regime;      // e.g. Daily / Research
    std::string difficulty;  // optional
    std::string language;    // optional
    std::string gt_version;
    std::string visual_gt;   // textualized visual ground truth
    std::vector<std::string> images;
    std::string bundle_dir;
};

/// Load and validate <dir>/task.json. task_id, query, gt_version and the
/// visual GT must be present; domain and regime must be non-empty.
Result<TaskBundle> load_task_bundle(const std::string& dir);

/// Load every subdirectory of `tasks_dir` containing a task.json, sorted by
/// task_id. Duplicate task ids are a validation error.
Result<std::vector<TaskBundle>> load_task_set(const std::string& tasks_dir);

std::string task_bundle_to_json(const TaskBundle& task);

}  // namespace repeval

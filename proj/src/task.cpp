#include "repeval/task.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace repeval {

using nlohmann::json;

Result<TaskBundle> load_task_bundle(const std::string& dir) {
    fs::path manifest = fs::path(dir) / "task.json";
    std::ifstream in(manifest);
    if (!in)
        return Result<TaskBundle>::fail("task bundle: cannot open " + manifest.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    json j = json::parse(buffer.str(), nullptr, false);
    if (j.is_discarded() || !j.is_object())
        return Result<TaskBundle>::fail("task bundle: invalid JSON in " + manifest.string());

    auto str_field = [&](const char* key) -> std::string {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string()) return {};
        return it->get<std::string>();
    };

    TaskBundle task;
    task.task_id = str_field("task_id");
    task.query = str_field("query");
    task.domain = str_field("domain");
    task.regime = str_field("regime");
    task.difficulty = str_field("difficulty");
    task.language = str_field("language");
    task.gt_version = str_field("gt_version");
    task.visual_gt = str_field("visual_gt");
    task.bundle_dir = dir;
    if (j.contains("images") && j["images"].is_array()) {
        for (const auto& image : j["images"]) {
            if (image.is_string()) task.images.push_back(image.get<std::string>());
        }
    }

    if (task.task_id.empty()) return Result<TaskBundle>::fail("task bundle: missing task_id");
    if (task.query.empty())
        return Result<TaskBundle>::fail("task bundle " + task.task_id + ": missing query");
    if (task.gt_version.empty())
        return Result<TaskBundle>::fail("task bundle " + task.task_id + ": missing gt_version");
    if (!j.contains("visual_gt") || !j["visual_gt"].is_string())
        return Result<TaskBundle>::fail("task bundle " + task.task_id + ": missing visual_gt");
    if (task.domain.empty() || task.regime.empty())
        return Result<TaskBundle>::fail("task bundle " + task.task_id +
                                        ": missing domain or regime");
    return Result<TaskBundle>::ok(std::move(task));
}

Result<std::vector<TaskBundle>> load_task_set(const std::string& tasks_dir) {
    std::error_code ec;
    if (!fs::is_directory(tasks_dir, ec))
        return Result<std::vector<TaskBundle>>::fail("task set: not a directory: " + tasks_dir);

    std::vector<std::string> dirs;
    for (const auto& entry : fs::directory_iterator(tasks_dir, ec)) {
        if (entry.is_directory() && fs::exists(entry.path() / "task.json"))
            dirs.push_back(entry.path().string());
    }
    std::sort(dirs.begin(), dirs.end());

    std::vector<TaskBundle> tasks;
    for (const auto& dir : dirs) {
        auto task = load_task_bundle(dir);
        if (!task) return Result<std::vector<TaskBundle>>::fail(task.error());
        tasks.push_back(task.take());
    }
    std::sort(tasks.begin(), tasks.end(),
              [](const TaskBundle& a, const TaskBundle& b) { return a.task_id < b.task_id; });
    for (size_t i = 1; i < tasks.size(); ++i) {
        if (tasks[i].task_id == tasks[i - 1].task_id)
            return Result<std::vector<TaskBundle>>::fail("task set: duplicate task_id " +
                                                         tasks[i].task_id);
    }
    return Result<std::vector<TaskBundle>>::ok(std::move(tasks));
}

std::string task_bundle_to_json(const TaskBundle& task) {
    json j = {{"task_id", task.task_id},     {"query", task.query},
              {"domain", task.domain},       {"regime", task.regime},
              {"difficulty", task.difficulty}, {"language", task.language},
              {"gt_version", task.gt_version}, {"visual_gt", task.visual_gt},
              {"images", task.images}};
    return j.dump();
}

}  // namespace repeval

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "redraft/blind_types.hpp"
#include "redraft/core.hpp"
#include "redraft/oracle.hpp"

namespace redraft {

inline constexpr int kSchemaVersion = 1;

// JSON (de)serialization for the domain vocabulary. Lossless round-trip.
nlohmann::json to_json(const Solution& s);
nlohmann::json to_json(const Feedback& f);
nlohmann::json to_json(const IterationEvent& e);
nlohmann::json to_json(const Trajectory& t, const std::string& run_id);
nlohmann::json to_json(const RunConfig& c);
Solution solution_from_json(const nlohmann::json& j);
Feedback feedback_from_json(const nlohmann::json& j);
IterationEvent event_from_json(const nlohmann::json& j);
Trajectory trajectory_from_json(const nlohmann::json& j);
RunConfig config_from_json(const nlohmann::json& j);

enum class TaskStatus { Pending, Done, Error };

struct RunManifest {
    std::string run_id;
    RunConfig config;
    std::string suite_fingerprint;
    std::vector<Task> tasks;
    std::vector<Strategy> strategies;
    std::int64_t started_ms = 0;
};

// Work items are (task_id, strategy); status is derived by scanning
// trajectories.jsonl, which keeps the store append-only and crash-resumable.
struct WorkItem {
    std::string task_id;
    Strategy strategy;
    auto operator<=>(const WorkItem&) const = default;
};

struct RunData {
    RunManifest manifest;
    std::vector<Trajectory> trajectories;
    // verdicts by (task_id, code fingerprint)
    std::map<std::pair<std::string, std::string>, Verdict> verdicts;
    std::vector<EvalPair> blind_samples;
    std::vector<AnnotationRecord> annotations;
    // initial sample pools: task_id -> solutions
    std::map<std::string, std::vector<Solution>> pool;
};

// One directory per run: manifest.json plus append-only JSONL files
// (trajectories, verdicts, blind_samples, annotations, pool). Single writer
// per directory enforced by an advisory lock file.
class RunStore {
public:
    static RunStore create(const std::string& dir, RunManifest manifest);
    static RunStore open(const std::string& dir);
    ~RunStore();
    RunStore(RunStore&&) noexcept;
    RunStore& operator=(RunStore&&) noexcept;

    const RunManifest& manifest() const { return manifest_; }
    const std::string& dir() const { return dir_; }

    // Serialized appends; duplicate (task, strategy) write throws.
    void append_trajectory(const Trajectory& trajectory);
    void append_verdict(const std::string& task_id, const std::string& fp, Verdict v);
    void append_pool_entry(const std::string& task_id, const Solution& s);
    void append_blind_sample(const EvalPair& pair);
    void append_annotation(const AnnotationRecord& rec);

    // Work items without a persisted trajectory. A corrupt trailing partial
    // line is discarded with a warning and its item re-pended.
    std::vector<WorkItem> resume() const;

    RunData load() const;

private:
    RunStore() = default;
    struct Impl;
    std::unique_ptr<Impl> impl_;
    RunManifest manifest_;
    std::string dir_;
};

}  // namespace redraft

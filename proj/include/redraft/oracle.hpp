#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include "redraft/core.hpp"

namespace redraft {

enum class Verdict { Correct, Incorrect, Unknown };

const char* to_string(Verdict v);
std::optional<Verdict> verdict_from_string(const std::string& s);

// Content hash of the code with trailing whitespace stripped per line.
// FNV-1a 64-bit, lowercase hex.
std::string fingerprint(const std::string& code);

class VerdictOracle {
public:
    virtual ~VerdictOracle() = default;
    // Thread-safe.
    virtual Verdict judge(const std::string& task_id, const Solution& solution) = 0;
};

// Backed by a verdict file: JSONL records {task_id, fingerprint, verdict}.
// Missing entries are Unknown.
class VerdictFileOracle : public VerdictOracle {
public:
    static VerdictFileOracle load(const std::string& path);
    explicit VerdictFileOracle(std::map<std::pair<std::string, std::string>, Verdict> table);
    Verdict judge(const std::string& task_id, const Solution& solution) override;

private:
    std::map<std::pair<std::string, std::string>, Verdict> table_;
};

// Invokes a user-supplied checker: argv = [checker, task_path, solution_path],
// exit 0 -> correct, 1 -> incorrect, anything else (or timeout) -> unknown.
class CommandOracle : public VerdictOracle {
public:
    // tasks maps task_id -> statement, written to the task file handed to the
    // checker. work_dir holds the temp files.
    CommandOracle(std::string checker, std::map<std::string, std::string> tasks,
                  std::string work_dir, int timeout_seconds = 30,
                  int max_concurrent = 4);
    Verdict judge(const std::string& task_id, const Solution& solution) override;

    int invocations() const { return invocations_.load(); }

private:
    std::string checker_;
    std::map<std::string, std::string> tasks_;
    std::string work_dir_;
    int timeout_seconds_;
    std::counting_semaphore<256> slots_;
    std::atomic_int invocations_{0};
    std::atomic_int serial_{0};
};

using VerdictMap = std::map<std::pair<std::string, int>, Verdict>;

// Judges every solution of every trajectory; identical (task, code) judged once.
VerdictMap judge_suite(const std::vector<Trajectory>& trajectories, VerdictOracle& oracle);

}  // namespace redraft

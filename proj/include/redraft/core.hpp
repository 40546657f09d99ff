#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace redraft {

enum class Difficulty { Easy, Medium, Hard, Unknown };

struct Task {
    std::string id;
    std::string statement;
    Difficulty difficulty = Difficulty::Unknown;
};

// Next-action suggestion driving the loop's branch.
enum class Action { Pass, Refine, Redraft };

enum class Strategy { SelfRefine, SelfRedraft };

struct Feedback {
    std::string critique;
    Action action = Action::Refine;
    // diagnostics, e.g. "missing-critique-tag", "action-defaulted"
    std::vector<std::string> parse_flags;

    bool operator==(const Feedback&) const = default;
};

struct Solution {
    int index = 0;  // iteration number; 0 is the initial solution
    std::string code;
    std::string raw;

    bool operator==(const Solution&) const = default;
};

enum class Termination { Pass, MaxIterations, Error };

struct IterationEvent {
    int iteration = 0;
    std::string phase;  // "generation" | "feedback" | "regeneration"
    std::string prompt;
    std::string response;
    std::string parsed;  // short summary of the parse result
    // logical event stamp (per-trajectory ordinal); wall-clock time would make
    // same-seed reruns non-reproducible byte-for-byte
    std::int64_t timestamp_ms = 0;

    bool operator==(const IterationEvent&) const = default;
};

struct Trajectory {
    std::string task_id;
    Strategy strategy = Strategy::SelfRedraft;
    std::vector<Solution> solutions;
    std::vector<Feedback> feedbacks;
    Termination terminated_by = Termination::Error;
    std::vector<IterationEvent> events;

    bool operator==(const Trajectory&) const = default;
};

struct RunConfig {
    Strategy strategy = Strategy::SelfRedraft;
    int max_iterations = 16;
    double temperature = 0.2;
    double top_p = 0.95;
    double frequency_penalty = 0.0;
    double presence_penalty = 0.0;
    int samples_n = 16;
    int pass_k = 8;
    int blind_cap = 1000;
    std::uint64_t seed = 0;
    int concurrency = 4;
    std::optional<int> max_tokens;       // absent = provider maximum
    std::optional<int> history_window;   // last H rounds in regeneration prompts; absent = full
    std::string model_name = "scripted";
};

// Validates RunConfig numeric invariants; returns violation strings, empty when ok.
std::vector<std::string> validate_config(const RunConfig& cfg);

// Last element of solutions; for early-stopped trajectories this is the
// solution the Pass verdict approved. Throws std::invalid_argument when empty.
const Solution& final_solution(const Trajectory& trajectory);

// Checks all Trajectory invariants under iteration cap T.
// Returns violation tokens, empty iff well-formed.
std::vector<std::string> validate_trajectory(const Trajectory& trajectory, int cap);

// Last fenced code block of raw model output; the whole text when no fence.
std::string extract_code(const std::string& raw);

const char* to_string(Action a);
const char* to_string(Strategy s);
const char* to_string(Termination t);
const char* to_string(Difficulty d);
std::optional<Action> action_from_string(const std::string& s);
std::optional<Strategy> strategy_from_string(const std::string& s);
std::optional<Termination> termination_from_string(const std::string& s);
Difficulty difficulty_from_string(const std::string& s);

}  // namespace redraft

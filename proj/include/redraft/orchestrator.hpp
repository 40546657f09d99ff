#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "redraft/core.hpp"
#include "redraft/prompts.hpp"
#include "redraft/provider.hpp"

namespace redraft {

struct SamplePool {
    std::vector<Solution> solutions;   // indices 0..n-1; gaps excluded
    std::vector<int> failed_indices;   // samples lost to provider errors
};

// Per-task seed derived from the run seed; forwarded to providers that
// support seeding. Stable across platforms.
std::uint64_t derive_task_seed(std::uint64_t run_seed, const std::string& task_id);

// Drives the generate / feedback / regenerate loop per task.
class Orchestrator {
public:
    Orchestrator(ChatProvider& provider, const PromptBundle& prompts, RunConfig config);

    // Executes the loop: y0 via the generation prompt (unless supplied); each
    // iteration asks for feedback on y_i, stops on Pass, otherwise regenerates
    // conditioned on the full history. Malformed feedback is re-requested up
    // to 2 extra times, then defaulted to Refine with flag "action-defaulted".
    Trajectory run_task(const Task& task, std::optional<Solution> initial = {});

    // One trajectory per task, processed concurrently up to config.concurrency;
    // per-task errors yield error-terminated trajectories. on_done (optional)
    // is invoked serially as trajectories finish.
    std::vector<Trajectory> run_suite(
        const std::vector<Task>& tasks,
        const std::map<std::string, Solution>& initials = {},
        const std::function<void(const Trajectory&)>& on_done = {});

    // n independent generation completions (config.samples_n); sample 0
    // doubles as the shared y0 for both strategies.
    SamplePool sample_initial_pool(const Task& task);

private:
    ChatRequest make_request(const Task& task, const std::string& prompt) const;

    ChatProvider& provider_;
    const PromptBundle& prompts_;
    RunConfig config_;
};

}  // namespace redraft

#include "doctest.h"
#include "redraft/orchestrator.hpp"
#include "redraft/store.hpp"

using namespace redraft;

namespace {

const std::string kPass = "<critique>looks right</critique><suggestion>pass</suggestion>";
const std::string kRefine = "<critique>tweak it</critique><suggestion>refine</suggestion>";
const std::string kRedraft = "<critique>start over</critique><suggestion>redraft</suggestion>";

Task task(const std::string& id) { return {id, "statement for " + id, Difficulty::Easy}; }

// Scenario keyed on prompt section headers: generation prompts carry
// "### Question:", feedback prompts "## Code:", regeneration "## Iteration History:".
ScriptScenario scenario(const std::string& feedback_response) {
    ScriptScenario s;
    s.rules.push_back({"## Iteration History:", {}, {}, "```\nregen code\n```"});
    s.rules.push_back({"## Code:", {}, {}, feedback_response});
    s.rules.push_back({"### Question:", {}, {}, "```\ninitial code\n```"});
    return s;
}

RunConfig config(Strategy strategy, int T) {
    RunConfig cfg;
    cfg.strategy = strategy;
    cfg.max_iterations = T;
    return cfg;
}

}  // namespace

TEST_CASE("pass at iteration 0 stops immediately") {
    ScriptedProvider provider(scenario(kPass));
    auto prompts = PromptBundle::builtin();
    Orchestrator orch(provider, prompts, config(Strategy::SelfRedraft, 16));
    auto t = orch.run_task(task("t1"));
    CHECK(t.solutions.size() == 1);
    CHECK(t.feedbacks.size() == 1);
    CHECK(t.terminated_by == Termination::Pass);
    CHECK(t.solutions[0].code == "initial code");
    CHECK(validate_trajectory(t, 16).empty());
    CHECK(final_solution(t).index == 0);
}

TEST_CASE("never-pass run hits the iteration cap") {
    ScriptedProvider provider(scenario(kRefine));
    auto prompts = PromptBundle::builtin();
    Orchestrator orch(provider, prompts, config(Strategy::SelfRedraft, 3));
    auto t = orch.run_task(task("t1"));
    CHECK(t.solutions.size() == 4);
    CHECK(t.feedbacks.size() == 3);
    CHECK(t.terminated_by == Termination::MaxIterations);
    CHECK(validate_trajectory(t, 3).empty());
    // feedback calls = T, regeneration calls = non-pass feedbacks
    int fb_events = 0, regen_events = 0;
    for (const auto& e : t.events) {
        if (e.phase == "feedback") ++fb_events;
        if (e.phase == "regeneration") ++regen_events;
    }
    CHECK(fb_events == 3);
    CHECK(regen_events == 3);
}

TEST_CASE("supplied initial solution becomes y0") {
    ScriptedProvider provider(scenario(kPass));
    auto prompts = PromptBundle::builtin();
    Orchestrator orch(provider, prompts, config(Strategy::SelfRedraft, 16));
    Solution y0{5, "shared code", "raw"};
    auto t = orch.run_task(task("t1"), y0);
    REQUIRE(t.solutions.size() == 1);
    CHECK(t.solutions[0].index == 0);  // re-indexed as the initial solution
    CHECK(t.solutions[0].code == "shared code");
    // no generation event: the pool supplied y0
    for (const auto& e : t.events) CHECK(e.phase != "generation");
}

TEST_CASE("malformed feedback retries then defaults to refine") {
    ScriptScenario s;
    s.rules.push_back({"## Iteration History:", {}, {}, "```\nregen\n```"});
    // under self_refine, "redraft" is out of vocabulary -> parse failure
    s.rules.push_back({"## Code:", {}, 3, kRedraft});
    s.rules.push_back({"## Code:", {}, {}, kPass});
    s.rules.push_back({"### Question:", {}, {}, "```\ny0\n```"});
    ScriptedProvider provider(s);
    auto prompts = PromptBundle::builtin();
    Orchestrator orch(provider, prompts, config(Strategy::SelfRefine, 4));
    auto t = orch.run_task(task("t1"));

    REQUIRE(!t.feedbacks.empty());
    const auto& defaulted = t.feedbacks[0];
    CHECK(defaulted.action == Action::Refine);
    REQUIRE(defaulted.parse_flags.size() >= 1);
    CHECK(defaulted.parse_flags[0] == "action-defaulted");
    // after the defaulted refine, the scenario passes
    CHECK(t.terminated_by == Termination::Pass);
    CHECK(validate_trajectory(t, 4).empty());
}

TEST_CASE("self_refine never emits redraft") {
    ScriptedProvider provider(scenario(kRefine));
    auto prompts = PromptBundle::builtin();
    Orchestrator orch(provider, prompts, config(Strategy::SelfRefine, 4));
    auto t = orch.run_task(task("t1"));
    for (const auto& fb : t.feedbacks) CHECK(fb.action != Action::Redraft);
    CHECK(validate_trajectory(t, 4).empty());
}

TEST_CASE("provider failure terminates with error") {
    ScriptScenario s;  // no rules, no default
    ScriptedProvider provider(s);
    auto prompts = PromptBundle::builtin();
    Orchestrator orch(provider, prompts, config(Strategy::SelfRedraft, 4));
    auto t = orch.run_task(task("t1"));
    CHECK(t.terminated_by == Termination::Error);
    CHECK(t.solutions.empty());
    CHECK(validate_trajectory(t, 4) == std::vector<std::string>{"empty-trajectory"});
}

TEST_CASE("run_suite produces one trajectory per task, deterministically") {
    auto prompts = PromptBundle::builtin();
    std::vector<Task> tasks = {task("a"), task("b")};
    std::vector<std::string> serialized_runs;
    for (int run = 0; run < 2; ++run) {
        ScriptedProvider provider(scenario(kPass));
        Orchestrator orch(provider, prompts, config(Strategy::SelfRedraft, 16));
        auto result = orch.run_suite(tasks);
        REQUIRE(result.size() == 2);
        CHECK(result[0].task_id == "a");
        CHECK(result[1].task_id == "b");
        std::string blob;
        for (const auto& t : result) blob += to_json(t, "r").dump() + "\n";
        serialized_runs.push_back(blob);
    }
    CHECK(serialized_runs[0] == serialized_runs[1]);
}

TEST_CASE("per-task errors do not abort the suite") {
    ScriptScenario s;
    // only task "good" gets responses; its statement appears in every prompt
    s.rules.push_back({"statement for good", {}, {}, kPass});
    ScriptedProvider provider(s);
    auto prompts = PromptBundle::builtin();
    auto cfg = config(Strategy::SelfRedraft, 4);
    Orchestrator orch(provider, prompts, cfg);
    auto result = orch.run_suite({task("bad"), task("good")});
    REQUIRE(result.size() == 2);
    CHECK(result[0].terminated_by == Termination::Error);
    // the "good" feedback response parses as pass... but the generation prompt
    // also matches, so y0 raw is the canned feedback text; loop still passes
    CHECK(result[1].terminated_by == Termination::Pass);
}

TEST_CASE("sample_initial_pool returns n samples with cycling scenario") {
    ScriptScenario s;
    s.rules.push_back({{}, 0, {}, "```\nA\n```"});
    s.rules.push_back({{}, 1, {}, "```\nB\n```"});
    s.rules.push_back({{}, 2, {}, "```\nA\n```"});
    s.rules.push_back({{}, 3, {}, "```\nB\n```"});
    ScriptedProvider provider(s);
    auto prompts = PromptBundle::builtin();
    auto cfg = config(Strategy::SelfRedraft, 4);
    cfg.samples_n = 4;
    cfg.concurrency = 1;  // position rules need sequential arrival
    Orchestrator orch(provider, prompts, cfg);
    auto pool = orch.sample_initial_pool(task("t"));
    REQUIRE(pool.solutions.size() == 4);
    CHECK(pool.failed_indices.empty());
    CHECK(pool.solutions[0].code == "A");
    CHECK(pool.solutions[1].code == "B");
    CHECK(pool.solutions[2].code == "A");
    CHECK(pool.solutions[3].code == "B");
    CHECK(pool.solutions[3].index == 3);
}

TEST_CASE("sample_initial_pool flags failed samples as gaps") {
    ScriptScenario s;
    s.rules.push_back({{}, 0, {}, "```\nA\n```"});
    // position 1 unmatched, no default -> scenario-exhausted
    s.rules.push_back({{}, 2, {}, "```\nC\n```"});
    ScriptedProvider provider(s);
    auto prompts = PromptBundle::builtin();
    auto cfg = config(Strategy::SelfRedraft, 4);
    cfg.samples_n = 3;
    cfg.concurrency = 1;
    Orchestrator orch(provider, prompts, cfg);
    auto pool = orch.sample_initial_pool(task("t"));
    CHECK(pool.solutions.size() == 2);
    REQUIRE(pool.failed_indices.size() == 1);
    CHECK(pool.failed_indices[0] == 1);
}

TEST_CASE("singleton pool") {
    ScriptScenario s;
    s.default_response = "```\nonly\n```";
    ScriptedProvider provider(s);
    auto prompts = PromptBundle::builtin();
    auto cfg = config(Strategy::SelfRedraft, 4);
    cfg.samples_n = 1;
    Orchestrator orch(provider, prompts, cfg);
    auto pool = orch.sample_initial_pool(task("t"));
    REQUIRE(pool.solutions.size() == 1);
    CHECK(pool.solutions[0].code == "only");
}

TEST_CASE("derive_task_seed is stable and task-dependent") {
    CHECK(derive_task_seed(1, "a") == derive_task_seed(1, "a"));
    CHECK(derive_task_seed(1, "a") != derive_task_seed(1, "b"));
    CHECK(derive_task_seed(1, "a") != derive_task_seed(2, "a"));
}

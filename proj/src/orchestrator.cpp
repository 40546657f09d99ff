#include "redraft/orchestrator.hpp"

#include <atomic>
#include <mutex>
#include <thread>

#include "redraft/parser.hpp"

namespace redraft {

namespace {

constexpr int kFeedbackRetries = 2;  // extra attempts on malformed feedback

}  // namespace

std::uint64_t derive_task_seed(std::uint64_t run_seed, const std::string& task_id) {
    // FNV-1a over the task id, folded with the run seed
    std::uint64_t h = 14695981039346656037ull ^ run_seed;
    for (unsigned char c : task_id) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

Orchestrator::Orchestrator(ChatProvider& provider, const PromptBundle& prompts,
                           RunConfig config)
    : provider_(provider), prompts_(prompts), config_(std::move(config)) {}

ChatRequest Orchestrator::make_request(const Task& task, const std::string& prompt) const {
    ChatRequest req;
    req.messages = {{"user", prompt}};
    req.temperature = config_.temperature;
    req.top_p = config_.top_p;
    req.frequency_penalty = config_.frequency_penalty;
    req.presence_penalty = config_.presence_penalty;
    req.max_tokens = config_.max_tokens;
    req.seed = derive_task_seed(config_.seed, task.id);
    req.model_name = config_.model_name;
    return req;
}

Trajectory Orchestrator::run_task(const Task& task, std::optional<Solution> initial) {
    Trajectory t;
    t.task_id = task.id;
    t.strategy = config_.strategy;
    std::int64_t clock = 0;  // logical event stamp; wall time would break rerun equality

    // Step 0: initial solution
    if (initial) {
        Solution y0 = std::move(*initial);
        y0.index = 0;
        t.solutions.push_back(std::move(y0));
    } else {
        std::string prompt = prompts_.render_generation(task);
        Completion c = provider_.complete(make_request(task, prompt));
        t.events.push_back({0, "generation", prompt, c.text, c.ok() ? "ok" : c.error_message,
                            clock++});
        if (!c.ok()) {
            t.terminated_by = Termination::Error;
            return t;
        }
        t.solutions.push_back({0, extract_code(c.text), c.text});
    }

    for (int i = 0; i < config_.max_iterations; ++i) {
        // Step 1: feedback on y_i, with retry-then-default on malformed output
        std::string fb_prompt =
            prompts_.render_feedback(task, t.solutions.back(), config_.strategy);
        Feedback feedback;
        bool have_feedback = false;
        ParseFailure last_failure = ParseFailure::None;
        for (int attempt = 0; attempt <= kFeedbackRetries; ++attempt) {
            Completion c = provider_.complete(make_request(task, fb_prompt));
            if (!c.ok()) {
                t.events.push_back(
                    {i, "feedback", fb_prompt, c.text, c.error_message, clock++});
                t.terminated_by = Termination::Error;
                return t;
            }
            ParseOutcome outcome = parse_feedback(c.text, config_.strategy);
            t.events.push_back({i, "feedback", fb_prompt, c.text,
                                outcome.ok() ? std::string("action=") +
                                                   to_string(outcome.feedback->action)
                                             : to_string(outcome.failure),
                                clock++});
            if (outcome.ok()) {
                feedback = std::move(*outcome.feedback);
                have_feedback = true;
                break;
            }
            last_failure = outcome.failure;
        }
        if (!have_feedback) {
            // Refine is the conservative branch shared by both strategies.
            feedback.action = Action::Refine;
            feedback.parse_flags.push_back("action-defaulted");
            feedback.parse_flags.push_back(std::string("parse-failure:") +
                                           to_string(last_failure));
        }
        t.feedbacks.push_back(feedback);

        if (feedback.action == Action::Pass) {
            t.terminated_by = Termination::Pass;
            return t;
        }

        // Step 2: regeneration conditioned on full history
        std::string regen_prompt = prompts_.render_regeneration(
            task, t, feedback, config_.history_window);
        Completion c = provider_.complete(make_request(task, regen_prompt));
        if (!c.ok()) {
            t.events.push_back(
                {i, "regeneration", regen_prompt, c.text, c.error_message, clock++});
            t.terminated_by = Termination::Error;
            return t;
        }
        t.events.push_back({i, "regeneration", regen_prompt, c.text, "ok", clock++});
        t.solutions.push_back({i + 1, extract_code(c.text), c.text});
    }

    t.terminated_by = Termination::MaxIterations;
    return t;
}

std::vector<Trajectory> Orchestrator::run_suite(
    const std::vector<Task>& tasks, const std::map<std::string, Solution>& initials,
    const std::function<void(const Trajectory&)>& on_done) {
    std::vector<Trajectory> results(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex done_mu;

    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            std::optional<Solution> initial;
            if (auto it = initials.find(tasks[i].id); it != initials.end())
                initial = it->second;
            Trajectory t;
            try {
                t = run_task(tasks[i], std::move(initial));
            } catch (const std::exception&) {
                t.task_id = tasks[i].id;
                t.strategy = config_.strategy;
                t.terminated_by = Termination::Error;
            }
            if (on_done) {
                std::lock_guard lock(done_mu);
                on_done(t);
            }
            results[i] = std::move(t);
        }
    };

    std::size_t n_workers =
        std::min<std::size_t>(std::max(config_.concurrency, 1), tasks.size());
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < n_workers; ++w) workers.emplace_back(worker);
    for (auto& th : workers) th.join();
    return results;
}

SamplePool Orchestrator::sample_initial_pool(const Task& task) {
    std::string prompt = prompts_.render_generation(task);
    std::vector<ChatRequest> requests(config_.samples_n, make_request(task, prompt));
    auto completions = complete_many(provider_, requests, config_.concurrency);

    SamplePool pool;
    for (int i = 0; i < config_.samples_n; ++i) {
        const auto& c = completions[i];
        if (c.ok())
            pool.solutions.push_back({i, extract_code(c.text), c.text});
        else
            pool.failed_indices.push_back(i);
    }
    return pool;
}

}  // namespace redraft

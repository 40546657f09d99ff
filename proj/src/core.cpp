#include "redraft/core.hpp"

#include <algorithm>
#include <stdexcept>

namespace redraft {

std::vector<std::string> validate_config(const RunConfig& cfg) {
    std::vector<std::string> v;
    if (cfg.max_iterations < 1) v.push_back("max-iterations-below-one");
    if (cfg.temperature < 0) v.push_back("negative-temperature");
    if (cfg.top_p <= 0 || cfg.top_p > 1) v.push_back("top-p-out-of-range");
    if (cfg.samples_n < 1) v.push_back("samples-below-one");
    if (cfg.pass_k < 1 || cfg.pass_k > cfg.samples_n) v.push_back("pass-k-out-of-range");
    if (cfg.concurrency < 1) v.push_back("concurrency-below-one");
    return v;
}

const Solution& final_solution(const Trajectory& trajectory) {
    if (trajectory.solutions.empty())
        throw std::invalid_argument("invalid-trajectory: no solutions");
    return trajectory.solutions.back();
}

std::vector<std::string> validate_trajectory(const Trajectory& t, int cap) {
    std::vector<std::string> v;
    const auto ns = t.solutions.size();
    const auto nf = t.feedbacks.size();
    if (ns == 0) {
        v.push_back("empty-trajectory");
        return v;
    }
    if (ns > static_cast<std::size_t>(cap) + 1) v.push_back("length-exceeds-cap");

    switch (t.terminated_by) {
        case Termination::Pass:
            // Pass produces no new solution.
            if (ns != nf) v.push_back("count-mismatch");
            if (nf == 0 || t.feedbacks.back().action != Action::Pass)
                v.push_back("pass-action-mismatch");
            break;
        case Termination::MaxIterations:
            if (ns != nf + 1) v.push_back("count-mismatch");
            break;
        case Termination::Error:
            // error can strike before (ns == nf+1) or after (ns == nf) a feedback.
            if (ns != nf && ns != nf + 1) v.push_back("count-mismatch");
            break;
    }

    if (t.terminated_by != Termination::Pass) {
        for (const auto& fb : t.feedbacks)
            if (fb.action == Action::Pass) {
                v.push_back("pass-action-mismatch");
                break;
            }
    } else {
        // only the last feedback may be Pass
        for (std::size_t i = 0; i + 1 < nf; ++i)
            if (t.feedbacks[i].action == Action::Pass) {
                v.push_back("pass-action-mismatch");
                break;
            }
    }

    if (t.strategy == Strategy::SelfRefine) {
        for (const auto& fb : t.feedbacks)
            if (fb.action == Action::Redraft) {
                v.push_back("redraft-under-self-refine");
                break;
            }
    }

    for (std::size_t i = 0; i < ns; ++i)
        if (t.solutions[i].index != static_cast<int>(i)) {
            v.push_back("index-gap");
            break;
        }
    return v;
}

std::string extract_code(const std::string& raw) {
    // Collect fence positions; opens and closes alternate.
    std::vector<std::size_t> fences;
    std::size_t pos = 0;
    while ((pos = raw.find("```", pos)) != std::string::npos) {
        fences.push_back(pos);
        pos += 3;
    }
    if (fences.size() < 2) return raw;
    // last complete pair
    std::size_t n_pairs = fences.size() / 2;
    std::size_t open = fences[2 * n_pairs - 2];
    std::size_t close = fences[2 * n_pairs - 1];
    std::size_t body = raw.find('\n', open);
    if (body == std::string::npos || body > close) body = open + 3;
    else body += 1;
    std::string code = raw.substr(body, close - body);
    // trim a single trailing newline left by the closing fence line
    if (!code.empty() && code.back() == '\n') code.pop_back();
    return code;
}

const char* to_string(Action a) {
    switch (a) {
        case Action::Pass: return "pass";
        case Action::Refine: return "refine";
        case Action::Redraft: return "redraft";
    }
    return "?";
}

const char* to_string(Strategy s) {
    return s == Strategy::SelfRefine ? "self_refine" : "self_redraft";
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::Pass: return "pass";
        case Termination::MaxIterations: return "max_iterations";
        case Termination::Error: return "error";
    }
    return "?";
}

const char* to_string(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return "easy";
        case Difficulty::Medium: return "medium";
        case Difficulty::Hard: return "hard";
        case Difficulty::Unknown: return "unknown";
    }
    return "?";
}

std::optional<Action> action_from_string(const std::string& s) {
    if (s == "pass") return Action::Pass;
    if (s == "refine") return Action::Refine;
    if (s == "redraft") return Action::Redraft;
    return std::nullopt;
}

std::optional<Strategy> strategy_from_string(const std::string& s) {
    if (s == "self_refine") return Strategy::SelfRefine;
    if (s == "self_redraft") return Strategy::SelfRedraft;
    return std::nullopt;
}

std::optional<Termination> termination_from_string(const std::string& s) {
    if (s == "pass") return Termination::Pass;
    if (s == "max_iterations") return Termination::MaxIterations;
    if (s == "error") return Termination::Error;
    return std::nullopt;
}

Difficulty difficulty_from_string(const std::string& s) {
    if (s == "easy") return Difficulty::Easy;
    if (s == "medium") return Difficulty::Medium;
    if (s == "hard") return Difficulty::Hard;
    return Difficulty::Unknown;
}

}  // namespace redraft

#include "redraft/blind.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "redraft/parser.hpp"

namespace redraft {

std::vector<EvalPair> eligible_pairs(const std::vector<Trajectory>& trajectories,
                                     const std::string& generator_id) {
    std::vector<EvalPair> pairs;
    for (const auto& t : trajectories) {
        for (std::size_t i = 0; i < t.feedbacks.size(); ++i) {
            const auto& fb = t.feedbacks[i];
            if (fb.action == Action::Pass) continue;
            if (i + 1 >= t.solutions.size()) continue;  // regeneration did not happen
            EvalPair p;
            p.generator_id = generator_id;
            p.task_id = t.task_id;
            p.iteration = static_cast<int>(i);
            p.original = t.solutions[i];
            p.regenerated = t.solutions[i + 1];
            p.truth_action = fb.action;
            pairs.push_back(std::move(p));
        }
    }
    return pairs;
}

BalancedSample sample_balanced(const std::vector<EvalPair>& pairs, int cap,
                               std::uint64_t seed) {
    if (cap < 2 || cap % 2 != 0)
        throw std::domain_error("sample_balanced: cap must be >= 2 and even");

    std::map<std::string, std::pair<std::vector<EvalPair>, std::vector<EvalPair>>> by_gen;
    for (const auto& p : pairs) {
        auto& bucket = by_gen[p.generator_id];
        (p.truth_action == Action::Redraft ? bucket.second : bucket.first).push_back(p);
    }

    BalancedSample out;
    std::mt19937_64 rng(seed);
    for (auto& [gen, bucket] : by_gen) {
        auto& [refines, redrafts] = bucket;
        if (redrafts.empty()) {
            out.excluded_generators.push_back(gen);
            continue;
        }
        std::size_t take = std::min({refines.size(), redrafts.size(),
                                     static_cast<std::size_t>(cap / 2)});
        if (take == 0) {
            out.excluded_generators.push_back(gen);
            continue;
        }
        std::shuffle(refines.begin(), refines.end(), rng);
        std::shuffle(redrafts.begin(), redrafts.end(), rng);
        out.pairs.insert(out.pairs.end(), refines.begin(), refines.begin() + take);
        out.pairs.insert(out.pairs.end(), redrafts.begin(), redrafts.begin() + take);
    }
    std::shuffle(out.pairs.begin(), out.pairs.end(), rng);
    return out;
}

std::vector<std::optional<Action>> annotate(const std::vector<EvalPair>& pairs,
                                            ChatProvider& provider,
                                            const PromptBundle& prompts,
                                            const AnnotateOptions& options) {
    std::vector<ChatRequest> requests;
    requests.reserve(pairs.size());
    for (const auto& p : pairs) {
        ChatRequest req;
        req.messages = {{"user", prompts.render_annotation(p.original, p.regenerated)}};
        req.temperature = options.temperature;
        req.top_p = options.top_p;
        req.model_name = options.model_name;
        requests.push_back(std::move(req));
    }

    std::vector<std::optional<Action>> labels(pairs.size());
    std::vector<std::size_t> open(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) open[i] = i;

    for (int attempt = 0; attempt <= options.retries && !open.empty(); ++attempt) {
        std::vector<ChatRequest> batch;
        for (std::size_t i : open) batch.push_back(requests[i]);
        auto completions = complete_many(provider, batch, options.concurrency);
        std::vector<std::size_t> still_open;
        for (std::size_t j = 0; j < open.size(); ++j) {
            if (completions[j].ok())
                labels[open[j]] = parse_annotation(completions[j].text);
            if (!labels[open[j]]) still_open.push_back(open[j]);
        }
        open = std::move(still_open);
    }
    return labels;
}

std::map<std::string, GeneratorScore> score(
    const std::vector<EvalPair>& pairs,
    const std::vector<std::optional<Action>>& labels) {
    if (pairs.size() != labels.size())
        throw std::domain_error("score: pairs/labels length mismatch");

    std::map<std::string, std::pair<std::vector<Action>, std::vector<Action>>> scored;
    std::map<std::string, int> failures;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& gen = pairs[i].generator_id;
        if (!labels[i]) {
            ++failures[gen];
            continue;
        }
        scored[gen].first.push_back(pairs[i].truth_action);
        scored[gen].second.push_back(*labels[i]);
    }

    std::map<std::string, GeneratorScore> out;
    for (auto& [gen, lists] : scored) {
        GeneratorScore s;
        s.result = recall_on_draft(lists.first, lists.second);
        s.scored = static_cast<int>(lists.first.size());
        s.annotation_failures = failures[gen];
        out[gen] = s;
    }
    for (auto& [gen, count] : failures)
        if (!out.count(gen)) out[gen] = {{0.0, std::nullopt}, 0, count};
    return out;
}

}  // namespace redraft

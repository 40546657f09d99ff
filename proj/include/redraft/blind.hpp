#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "redraft/blind_types.hpp"
#include "redraft/core.hpp"
#include "redraft/metrics.hpp"
#include "redraft/prompts.hpp"
#include "redraft/provider.hpp"

namespace redraft {

// All eligible pairs of a generator's trajectories: iterations whose feedback
// action is Refine or Redraft and whose regeneration succeeded. Pass produces
// no pair.
std::vector<EvalPair> eligible_pairs(const std::vector<Trajectory>& trajectories,
                                     const std::string& generator_id);

struct BalancedSample {
    std::vector<EvalPair> pairs;  // shuffled; #Refine == #Redraft per generator
    std::vector<std::string> excluded_generators;  // zero redraft pairs available
};

// Per generator: both classes truncated to the scarcer class, capped at cap/2
// each; uniform without replacement under the seed; output order shuffled so
// truth is not positionally inferable. cap must be >= 2 and even.
BalancedSample sample_balanced(const std::vector<EvalPair>& pairs, int cap,
                               std::uint64_t seed);

struct AnnotateOptions {
    double temperature = 0.2;
    double top_p = 0.95;
    std::string model_name = "auxiliary";
    int concurrency = 4;
    int retries = 2;  // extra attempts on malformed answers
};

// Renders the annotation prompt per pair and parses the two-class answer.
// nullopt entries are annotation failures (excluded from scoring).
std::vector<std::optional<Action>> annotate(const std::vector<EvalPair>& pairs,
                                            ChatProvider& provider,
                                            const PromptBundle& prompts,
                                            const AnnotateOptions& options = {});

struct GeneratorScore {
    RecallOnDraft result;
    int scored = 0;
    int annotation_failures = 0;
};

// Per-generator accuracy / Recall on Draft over aligned (pairs, labels).
std::map<std::string, GeneratorScore> score(
    const std::vector<EvalPair>& pairs,
    const std::vector<std::optional<Action>>& labels);

}  // namespace redraft

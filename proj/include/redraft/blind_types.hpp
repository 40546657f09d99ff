#pragma once

#include <optional>
#include <string>

#include "redraft/core.hpp"

namespace redraft {

// One blinded-evaluation unit: an (original, regenerated) solution pair whose
// feedback truly suggested Refine or Redraft. truth_action is never Pass.
struct EvalPair {
    std::string generator_id;
    std::string task_id;
    int iteration = 0;  // index of the feedback that produced the pair
    Solution original;
    Solution regenerated;
    Action truth_action = Action::Refine;

    bool operator==(const EvalPair&) const = default;
};

struct AnnotationRecord {
    std::string annotator_id;
    std::string generator_id;
    std::string task_id;
    int iteration = 0;
    std::optional<Action> label;  // nullopt = annotation-failure
    std::string raw_response;

    bool operator==(const AnnotationRecord&) const = default;
};

}  // namespace redraft

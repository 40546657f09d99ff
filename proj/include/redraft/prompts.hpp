#pragma once

#include <string>

#include "redraft/core.hpp"

namespace redraft {

// The five templates of the harness. Rendering is pure: byte-identical on
// identical inputs, every {placeholder} substituted.
class PromptBundle {
public:
    // Embedded default wording.
    static PromptBundle builtin();
    // Load *.txt overrides from a directory (generation.txt, feedback_refine.txt,
    // feedback_redraft.txt, regeneration.txt, annotation.txt). Missing file or
    // undeclared placeholder throws std::runtime_error.
    static PromptBundle load(const std::string& dir);

    std::string render_generation(const Task& task) const;
    std::string render_feedback(const Task& task, const Solution& previous,
                                Strategy strategy) const;
    // History holds pairs (y_0,c_0)..(y_{i-1},c_{i-1}) plus y_i; c_i goes under
    // Current Feedback. history_window limits history to the last H rounds.
    std::string render_regeneration(const Task& task, const Trajectory& trajectory,
                                    const Feedback& current,
                                    std::optional<int> history_window = {}) const;
    std::string render_annotation(const Solution& original,
                                  const Solution& regenerated) const;

    const std::string& generation_template() const { return generation_; }
    const std::string& feedback_refine_template() const { return feedback_refine_; }
    const std::string& feedback_redraft_template() const { return feedback_redraft_; }
    const std::string& regeneration_template() const { return regeneration_; }
    const std::string& annotation_template() const { return annotation_; }

private:
    PromptBundle() = default;
    std::string generation_;
    std::string feedback_refine_;
    std::string feedback_redraft_;
    std::string regeneration_;
    std::string annotation_;
};

// `{name}` substitution; throws std::runtime_error if a placeholder survives.
std::string render_template(const std::string& tmpl,
                            const std::vector<std::pair<std::string, std::string>>& subs);

}  // namespace redraft

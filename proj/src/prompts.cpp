#include "redraft/prompts.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "prompt_texts.hpp"

namespace redraft {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read prompt template: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Placeholders are {lowercase_word} tokens. Literal braces elsewhere are kept.
std::vector<std::string> find_placeholders(const std::string& tmpl) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while ((pos = tmpl.find('{', pos)) != std::string::npos) {
        std::size_t end = tmpl.find('}', pos);
        if (end == std::string::npos) break;
        std::string name = tmpl.substr(pos + 1, end - pos - 1);
        bool word = !name.empty();
        for (char c : name)
            if (!(std::islower(static_cast<unsigned char>(c)) || c == '_')) word = false;
        if (word) out.push_back(name);
        pos = end + 1;
    }
    return out;
}

void check_placeholders(const std::string& tmpl, const std::string& which,
                        const std::vector<std::string>& declared) {
    for (const auto& name : find_placeholders(tmpl)) {
        bool known = false;
        for (const auto& d : declared) known |= (d == name);
        if (!known)
            throw std::runtime_error("template " + which + " has undeclared placeholder {" +
                                     name + "}");
    }
}

std::string feedback_line(const Feedback& fb) {
    std::string out = fb.critique;
    if (!out.empty() && out.back() != '\n') out += '\n';
    out += "Suggestion: ";
    out += to_string(fb.action);
    return out;
}

}  // namespace

std::string render_template(const std::string& tmpl,
                            const std::vector<std::pair<std::string, std::string>>& subs) {
    // Single left-to-right pass; substituted text is never rescanned.
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        std::size_t brace = tmpl.find('{', pos);
        if (brace == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        out.append(tmpl, pos, brace - pos);
        bool matched = false;
        for (const auto& [name, value] : subs) {
            if (tmpl.compare(brace + 1, name.size(), name) == 0 &&
                brace + 1 + name.size() < tmpl.size() &&
                tmpl[brace + 1 + name.size()] == '}') {
                out += value;
                pos = brace + name.size() + 2;
                matched = true;
                break;
            }
        }
        if (!matched) {
            out += '{';
            pos = brace + 1;
        }
    }
    return out;
}

PromptBundle PromptBundle::builtin() {
    PromptBundle b;
    b.generation_ = prompt_texts::kGeneration;
    b.feedback_refine_ = prompt_texts::kFeedbackRefine;
    b.feedback_redraft_ = prompt_texts::kFeedbackRedraft;
    b.regeneration_ = prompt_texts::kRegeneration;
    b.annotation_ = prompt_texts::kAnnotation;
    return b;
}

PromptBundle PromptBundle::load(const std::string& dir) {
    PromptBundle b;
    b.generation_ = read_file(dir + "/generation.txt");
    b.feedback_refine_ = read_file(dir + "/feedback_refine.txt");
    b.feedback_redraft_ = read_file(dir + "/feedback_redraft.txt");
    b.regeneration_ = read_file(dir + "/regeneration.txt");
    b.annotation_ = read_file(dir + "/annotation.txt");
    check_placeholders(b.generation_, "generation", {"task"});
    check_placeholders(b.feedback_refine_, "feedback_refine", {"task", "previous_solution"});
    check_placeholders(b.feedback_redraft_, "feedback_redraft", {"task", "previous_solution"});
    check_placeholders(b.regeneration_, "regeneration", {"task", "trajectory", "feedback"});
    check_placeholders(b.annotation_, "annotation",
                       {"original_solution", "regenerated_solution"});
    return b;
}

std::string PromptBundle::render_generation(const Task& task) const {
    return render_template(generation_, {{"task", task.statement}});
}

std::string PromptBundle::render_feedback(const Task& task, const Solution& previous,
                                          Strategy strategy) const {
    const std::string& tmpl =
        strategy == Strategy::SelfRefine ? feedback_refine_ : feedback_redraft_;
    return render_template(tmpl, {{"task", task.statement},
                                  {"previous_solution", previous.code}});
}

std::string PromptBundle::render_regeneration(const Task& task, const Trajectory& trajectory,
                                              const Feedback& current,
                                              std::optional<int> history_window) const {
    if (trajectory.solutions.empty())
        throw std::invalid_argument("regeneration needs at least one solution");

    const std::size_t n = trajectory.solutions.size();
    // rounds 0..n-2 are complete (solution, feedback) pairs; solution n-1 closes
    // the history and `current` is its feedback.
    std::size_t first = 0;
    if (history_window && static_cast<std::size_t>(*history_window) < n)
        first = n - static_cast<std::size_t>(*history_window);

    std::ostringstream hist;
    for (std::size_t i = first; i < n; ++i) {
        if (i > first) hist << "\n";
        hist << "### Solution " << trajectory.solutions[i].index << ":\n"
             << trajectory.solutions[i].code << "\n";
        if (i + 1 < n)
            hist << "\n### Feedback " << trajectory.solutions[i].index << ":\n"
                 << feedback_line(trajectory.feedbacks[i]) << "\n";
    }

    return render_template(regeneration_, {{"task", task.statement},
                                           {"trajectory", hist.str()},
                                           {"feedback", feedback_line(current)}});
}

std::string PromptBundle::render_annotation(const Solution& original,
                                            const Solution& regenerated) const {
    return render_template(annotation_, {{"original_solution", original.code},
                                         {"regenerated_solution", regenerated.code}});
}

}  // namespace redraft

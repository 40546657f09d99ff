#include "redraft/parser.hpp"

#include <algorithm>
#include <cctype>

namespace redraft {

namespace {

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c); });
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

}  // namespace

std::optional<std::string> last_tag_block(std::string_view raw, std::string_view tag) {
    const std::string open = "<" + std::string(tag) + ">";
    const std::string close = "</" + std::string(tag) + ">";
    // Last open tag that still has a closing tag after it wins; its content
    // runs to the first close after it.
    std::optional<std::string> result;
    std::size_t pos = 0;
    while (true) {
        std::size_t o = raw.find(open, pos);
        if (o == std::string_view::npos) break;
        std::size_t start = o + open.size();
        std::size_t c = raw.find(close, start);
        if (c == std::string_view::npos) break;
        result = std::string(raw.substr(start, c - start));
        pos = start;
    }
    return result;
}

std::optional<Action> normalize_action(std::string_view token) {
    std::string t;
    for (char c : trim(token)) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (t == "pass") return Action::Pass;
    if (t == "refine") return Action::Refine;
    if (t == "redraft") return Action::Redraft;
    return std::nullopt;
}

ParseOutcome parse_feedback(std::string_view raw, Strategy strategy) {
    ParseOutcome out;
    if (is_blank(raw)) {
        out.failure = ParseFailure::EmptyInput;
        return out;
    }
    auto suggestion = last_tag_block(raw, "suggestion");
    if (!suggestion) {
        out.failure = ParseFailure::MissingSuggestion;
        return out;
    }
    auto action = normalize_action(*suggestion);
    if (!action || (strategy == Strategy::SelfRefine && *action == Action::Redraft)) {
        out.failure = ParseFailure::UnknownAction;
        return out;
    }
    Feedback fb;
    fb.action = *action;
    if (auto critique = last_tag_block(raw, "critique")) {
        fb.critique = *critique;
    } else {
        fb.parse_flags.push_back("missing-critique-tag");
    }
    out.feedback = std::move(fb);
    return out;
}

std::optional<Action> parse_annotation(std::string_view raw) {
    auto suggestion = last_tag_block(raw, "suggestion");
    if (!suggestion) return std::nullopt;
    auto action = normalize_action(*suggestion);
    if (!action || *action == Action::Pass) return std::nullopt;
    return action;
}

const char* to_string(ParseFailure f) {
    switch (f) {
        case ParseFailure::None: return "none";
        case ParseFailure::MissingSuggestion: return "missing_suggestion";
        case ParseFailure::UnknownAction: return "unknown_action";
        case ParseFailure::EmptyInput: return "empty_input";
    }
    return "?";
}

}  // namespace redraft

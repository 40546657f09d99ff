#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "redraft/core.hpp"

namespace redraft {

enum class ParseFailure { None, MissingSuggestion, UnknownAction, EmptyInput };

struct ParseOutcome {
    std::optional<Feedback> feedback;  // set iff failure == None
    ParseFailure failure = ParseFailure::None;

    bool ok() const { return failure == ParseFailure::None; }
};

// Inner text of the last well-formed <tag>...</tag> block, if any.
// Hand-rolled scanner; model output is not trusted to be well-formed markup.
std::optional<std::string> last_tag_block(std::string_view raw, std::string_view tag);

// Case-insensitive, whitespace-trimmed exact match against the action tokens.
std::optional<Action> normalize_action(std::string_view token);

// Extracts (critique, action) per the tag protocol. Never throws. Actions
// outside the strategy's vocabulary (redraft under self_refine) fail with
// UnknownAction. Missing critique is a flagged success.
ParseOutcome parse_feedback(std::string_view raw, Strategy strategy);

// Two-class annotation answer: Refine or Redraft; anything else is nullopt.
std::optional<Action> parse_annotation(std::string_view raw);

const char* to_string(ParseFailure f);

}  // namespace redraft

#pragma once

// Default prompt template texts. assets/prompts/ ships byte-identical copies
// so the wording stays diffable; a unit test enforces the equality.

namespace redraft::prompt_texts {

inline constexpr const char* kGeneration =
    R"(You are an expert Python programmer. You will be given a question (problem specification) and will generate a correct Python program that matches the specification and passes all tests.

### Question:
{task}

### Answer: (use the provided format with backticks)
)";

inline constexpr const char* kFeedbackRefine =
    R"(You are an expert Python programmer. You will be given a question and a piece of code. Check if the code correctly solves the problem and passes all examples. Provide feedback ONLY (no extra content).

## Task:
{task}

## Code:
{previous_solution}

## Note:
1. Your feedback should consist of two parts: critique and suggestion. In the critique, you should analyze the code and provide specific recommendations. In the suggestion, you should clarify the direction for the next steps.
2. Your suggestion should be one of "pass" and "refine".
3. If you think the code is correct, your suggestion should be "pass".
4. If you think the code should be refined (small improvements), offer guidance on the refinement and your suggestion should be "refine".

## Format:
<critique>
your detailed critique and analysis here
</critique>
<suggestion>
pass/refine
</suggestion>
)";

inline constexpr const char* kFeedbackRedraft =
    R"(You are an expert Python programmer. You will be given a question and a piece of code. Check if the code correctly solves the problem and passes all examples. Provide feedback ONLY (no extra content).

## Task:
{task}

## Code:
{previous_solution}

## Note:
1. Your feedback should consist of two parts: critique and suggestion. In the critique, you should analyze the code and provide specific recommendations. In the suggestion, you should clarify the direction for the next steps.
2. Your suggestion should be one of "pass", "refine", and "redraft".
3. If you think the code is correct, your suggestion should be "pass".
4. If you think the code should be refined (small improvements), offer guidance on the refinement and your suggestion should be "refine".
5. If the solution is fundamentally incorrect and needs a new approach, then encourage an alternative method to address the issue in the feedback, offer guidance on the new method and set your suggestion to "redraft".

## Format:
<critique>
your detailed critique and analysis here
</critique>
<suggestion>
pass/refine/redraft
</suggestion>
)";

inline constexpr const char* kRegeneration =
    R"(You are an expert Python programmer. Regenerate the code based on the feedback to solve the problem correctly. Follow the original formatting requirements.

## Task:
{task}

## Iteration History:
{trajectory}

## Current Feedback:
{feedback}

## Regenerated Code:
)";

inline constexpr const char* kAnnotation =
    R"(You are given an original solution and an alternative suggestion for the same task.

Classify the suggestion as either a minimal refinement of the original (small edits that preserve the solution's overall structure and approach) or a full redraft (substantial rewrite with a different structure/approach).

Output only one XML tag exactly as <suggestion>refine</suggestion> or <suggestion>redraft</suggestion>.

[Original Solution]
{original_solution}

[Suggested Alternative]
{regenerated_solution}

Answer strictly with the XML tag only.
)";

}  // namespace redraft::prompt_texts

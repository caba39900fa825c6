#pragma once

// String protocols that recover answers from raw completions.

#include <optional>
#include <string>
#include <string_view>

namespace cotbench {

inline constexpr std::string_view kCsqaAnswerMarker = "So the answer is (";

enum class McqVerdict { Correct, Incorrect, NoAnswer };

struct McqOutcome {
  McqVerdict verdict = McqVerdict::NoAnswer;
  std::optional<char> extracted;  // lowercase letter; empty iff NoAnswer
};

/// Drops the echoed prompt from the front of `raw`. The match ignores
/// differences in whitespace runs (backends sometimes normalize them); if the
/// prompt is not fully matched nothing is removed.
std::string_view strip_prompt(std::string_view raw, std::string_view prompt);

/// First "So the answer is (" marker after the prompt; the text up to the next
/// ')' must be a single letter a-e (either case) to count as an answer.
McqOutcome extract_csqa(std::string_view raw, std::string_view prompt, char answer_key);

/// Continuation text before the first "Q:", trimmed.
std::string extract_cot(std::string_view raw, std::string_view prompt);

}  // namespace cotbench

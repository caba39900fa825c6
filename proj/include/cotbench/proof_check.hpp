#pragma once

// Checks an extracted chain of thought against an Example.
//
// Strict mode is gold comparison: the parsed steps must equal the gold chain
// step for step (paragraph breaks are ignored, order is not). Valid mode
// accepts any chain in which every step is justified by the premises, an
// assumption, or the example's rule, and which ends in the conclusion.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cotbench/grammar.hpp"
#include "cotbench/logic.hpp"

namespace cotbench {

enum class CheckMode { Strict, Valid };

std::string_view mode_name(CheckMode mode);
CheckMode parse_mode(std::string_view text);

/// Position is 1-based. For strict mode `paragraph`/`step` locate the gold
/// step that was expected; past the end of the gold chain the step number
/// keeps counting within the last paragraph.
struct Divergence {
  std::size_t paragraph;
  std::size_t step;
  std::string expected;
  std::string got;
};

struct ParseFailure {
  std::size_t paragraph;  // 1-based
  std::size_t step;       // 1-based
  std::string sentence;
  std::string span;
  std::string message;
};

struct Verdict {
  bool correct = false;
  CheckMode mode = CheckMode::Strict;
  std::optional<Divergence> first_divergence;
  std::vector<ParseFailure> parse_failures;
};

Verdict check_strict(std::string_view generated, const Example& example,
                     const SentenceParser& parser);
Verdict check_valid(std::string_view generated, const Example& example,
                    const SentenceParser& parser);

inline Verdict check(CheckMode mode, std::string_view generated, const Example& example,
                     const SentenceParser& parser) {
  return mode == CheckMode::Strict ? check_strict(generated, example, parser)
                                   : check_valid(generated, example, parser);
}

}  // namespace cotbench

#pragma once

// Byte-exact prompt assembly for the deductive (PrOntoQA-style) and
// multiple-choice (CSQA) chain-of-thought experiments.

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cotbench/grammar.hpp"
#include "cotbench/logic.hpp"
#include "json.hpp"

namespace cotbench {

inline constexpr std::string_view kBlockSeparator = "\n\n";
inline constexpr std::size_t kDefaultShots = 8;
inline constexpr std::size_t kShortContextShots = 3;  // 1024-token models

enum class PromptKind { ProntoQA, Csqa };

struct PromptLayout {
  PromptKind kind = PromptKind::ProntoQA;
  std::size_t shots = kDefaultShots;
  std::string exemplar_source;  // dataset path, or CSQA exemplar text file
};

/// Premise sentences joined by spaces, without the last terminal period
/// ("Every impus is not floral. Alex is an impus").
std::string premises_text(const Example& example, const RealizationConfig& config = {});

/// "Q: <premises>. Prove: <conclusion>.\nA: "
std::string question_block(const Example& example, const RealizationConfig& config = {});

/// question_block followed by the realized gold chain.
std::string exemplar_block(const Example& example, const RealizationConfig& config = {});

/// Exemplar blocks and the trailing test block, separated by two newlines. The
/// result ends with "\nA: ". Throws std::invalid_argument if the test question
/// (premises and conclusion) is also one of the exemplars.
std::string build_prontoqa_prompt(std::span<const Example> exemplars, const Example& test,
                                  const RealizationConfig& config = {});

std::vector<std::string> split_prompt_blocks(std::string_view prompt);

struct ParsedQuestion {
  std::vector<Statement> premises;
  Statement conclusion;
};

/// Inverse of question_block (any trailing answer text is ignored).
ParsedQuestion parse_question_block(std::string_view block, const SentenceParser& parser);

bool same_question(const Example& a, const Example& b);

struct McqChoice {
  char label;
  std::string text;
  bool operator==(const McqChoice&) const = default;
};

/// Five labelled choices A..E in order; the answer key is one of them.
class McqQuestion {
 public:
  McqQuestion(std::string id, std::string stem, std::vector<McqChoice> choices, char answer_key);

  const std::string& id() const { return id_; }
  const std::string& stem() const { return stem_; }
  const std::array<McqChoice, 5>& choices() const { return choices_; }
  char answer_key() const { return answer_key_; }

 private:
  std::string id_;
  std::string stem_;
  std::array<McqChoice, 5> choices_;
  char answer_key_;
};

/// One record of the public CSQA jsonl format (id, question.stem,
/// question.choices[].label/text, answerKey).
McqQuestion parse_csqa_record(const nlohmann::json& record);
std::vector<McqQuestion> load_csqa(const std::filesystem::path& path);

/// exemplars + "\n Q: " + stem + " Answer Choices: (a) " + A + "\n(b) " + B ... + "\n"
std::string build_csqa_prompt(std::string_view exemplar_block, const McqQuestion& question);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace cotbench

#pragma once

// Experiment drivers: build prompts, query a backend with bounded
// concurrency, extract and score answers, aggregate into a report.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cotbench/backend.hpp"
#include "cotbench/extract.hpp"
#include "cotbench/logic.hpp"
#include "cotbench/prompt.hpp"
#include "cotbench/proof_check.hpp"
#include "json.hpp"

namespace cotbench {

enum class Outcome { Correct, Incorrect, Unparseable };

std::string_view outcome_name(Outcome outcome);

struct Tally {
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::size_t unparseable = 0;

  std::size_t total() const { return correct + incorrect + unparseable; }
  double accuracy() const { return total() == 0 ? 0.0 : static_cast<double>(correct) / total(); }
  void add(Outcome o);
};

struct QuestionRecord {
  std::string id;
  std::string task;  // rule name, or "csqa"
  std::string prompt;
  std::string raw_output;
  std::string extracted;
  Outcome outcome = Outcome::Unparseable;
  std::optional<Verdict> verdict;  // deductive tasks
  std::optional<char> answer;      // multiple choice
  std::string error;               // backend failure, if any
};

struct RunMetadata {
  std::string task;
  std::string backend;
  std::size_t shots = 0;
  std::string mode;
  std::uint64_t seed = 0;
  std::size_t concurrency = 1;
  DecodeConfig decode;
  bool repetition_penalty_honored = false;
  std::string max_tokens_rule;
  std::string started_at;
  std::string finished_at;
};

struct EvalReport {
  std::map<std::string, Tally> per_rule;
  std::optional<Tally> csqa;
  std::vector<QuestionRecord> questions;
  RunMetadata meta;

  Tally overall() const;
};

class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ProntoqaRunConfig {
  std::size_t shots = kDefaultShots;
  CheckMode mode = CheckMode::Strict;
  std::size_t concurrency = 1;
  std::uint64_t exemplar_seed = 42;
  Lexicon lexicon = Lexicon::defaults();
  DecodeConfig decode = DecodeConfig::prontoqa();
};

/// Fresh exemplars for one test question: `shots` examples of the same rule,
/// none equal to the test question, seeded by (exemplar_seed, question index).
std::vector<Example> exemplars_for(const Example& test, std::size_t question_index,
                                   const ProntoqaRunConfig& config);

EvalReport run_prontoqa(std::span<const Example> dataset, ModelBackend& backend,
                        const ProntoqaRunConfig& config);

struct CsqaRunConfig {
  std::size_t concurrency = 1;
  /// Overrides the ceil(bytes/4) input-token estimate when set.
  std::optional<std::size_t> max_new_tokens;
};

EvalReport run_csqa(std::span<const McqQuestion> questions, ModelBackend& backend,
                    std::string_view exemplar_block, const CsqaRunConfig& config);

/// Replies "... So the answer is (<key>)." for every question.
std::map<std::string, std::string> csqa_gold_replies(std::span<const McqQuestion> questions);

nlohmann::ordered_json report_to_json(const EvalReport& report);
/// One line per question: id, prompt, raw_output, extracted, verdict.
std::string responses_to_jsonl(const EvalReport& report);
void write_report(const EvalReport& report, const std::filesystem::path& report_path,
                  const std::optional<std::filesystem::path>& responses_path);

}  // namespace cotbench

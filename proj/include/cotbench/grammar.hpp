#pragma once

// Realization of Statements as restricted-English sentences, and the parser
// that inverts it.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cotbench/logic.hpp"

namespace cotbench {

enum class PluralRule {
  EsAfterS,  // "sterpus" -> "sterpuses", "blorp" -> "blorps"
  AlwaysS,
};

struct RealizationConfig {
  std::string vowel_letters = "aeiou";
  PluralRule plural_rule = PluralRule::EsAfterS;
  std::string paragraph_separator = "\n";
};

/// Text does not belong to the restricted grammar. `offset`/`length` locate
/// the offending span inside the text that was handed to the parser.
class UnparseableSentence : public std::runtime_error {
 public:
  UnparseableSentence(std::string text, std::size_t offset, std::size_t length,
                      const std::string& reason);

  const std::string& text() const { return text_; }
  std::size_t offset() const { return offset_; }
  std::size_t length() const { return length_; }
  std::string_view span() const;

 private:
  std::string text_;
  std::size_t offset_;
  std::size_t length_;
};

std::string pluralize(const Concept& noun, const RealizationConfig& config = {});

/// Copular clause without terminal period, canonical capitalization
/// ("Every impus is not floral", "Alex is an impus", "sterpuses are hot"
/// keeps the stem lowercase; callers capitalize sentence-initial words).
std::string realize_clause(const Statement& statement, const RealizationConfig& config = {});

/// Full sentence: capitalized first letter and terminal period.
/// Throws std::invalid_argument for an unrestricted "Everything" subject or a
/// restricted one carrying a conjunct (only the PBC premise shape is allowed).
std::string realize(const Statement& statement, const RealizationConfig& config = {});

std::string realize_step(const ProofStep& step, const RealizationConfig& config = {});
std::string realize_chain(const ProofChain& chain, const RealizationConfig& config = {});

class SentenceParser {
 public:
  explicit SentenceParser(Lexicon lexicon, RealizationConfig config = {});

  /// One sentence. Tolerates a missing terminal period, repeated spaces, and
  /// case differences on the first word. Throws UnparseableSentence.
  Statement parse_sentence(std::string_view text) const;

  /// One proof sentence: plain, "Assume ...", "This contradicts with ...",
  /// or "Since ..., ...". Throws UnparseableSentence.
  ProofStep parse_step(std::string_view text) const;

  const Lexicon& lexicon() const { return lexicon_; }
  const RealizationConfig& config() const { return config_; }

 private:
  struct Impl;
  Lexicon lexicon_;
  RealizationConfig config_;
  std::vector<std::pair<std::string, std::string>> plurals_;  // plural form -> stem
};

inline Statement parse_sentence(std::string_view text, const Lexicon& lexicon) {
  return SentenceParser(lexicon).parse_sentence(text);
}

/// A sentence cut out of a longer text, with its position.
struct Sentence {
  std::size_t paragraph;  // 0-based
  std::size_t index;      // 0-based within paragraph
  std::string text;       // without terminal period
};

/// Paragraphs are separated by newlines (blank lines ignored); sentences end at
/// a '.' followed by whitespace or end of text.
std::vector<Sentence> segment_sentences(std::string_view text);

struct StepParse {
  Sentence sentence;
  std::variant<ProofStep, UnparseableSentence> result;
};

std::vector<StepParse> parse_chain_text(std::string_view text, const SentenceParser& parser);

}  // namespace cotbench

#pragma once

// Seeded generation of deduction examples for the six rules and of the
// fine-tuning corpus built from them.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "cotbench/grammar.hpp"
#include "cotbench/logic.hpp"
#include "cotbench/random.hpp"
#include "json.hpp"

namespace cotbench {

class LexiconTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every free choice a rule template makes. Concepts must be pairwise distinct.
///
///   IE   premises: [Q(det0, c0) is [not] X, name is a c0]        X = adjective or c1
///   CI   premises: [name is adj, name is a c0] (swapped if swap_premises)
///   CE   premise:  name is an adj c0
///   DI   premise:  name is a c0;  conclusion: name is adj or a c0
///   DE   premises: [Q(det0, c0) is c2, Q(det1, c1) is c2, name is a c0 or a c1]
///   PBC  premises: [Everything that is a c0 or a c1 is a c2, name is not a c2]
struct RoleAssignment {
  EntityName name{"Alex"};
  std::array<Concept, 3> concepts{Concept{"impus"}, Concept{"sterpus"}, Concept{"wumpus"}};
  Adjective adjective{"floral"};
  bool negated = false;
  bool adjective_consequent = true;
  std::array<Determiner, 2> determiners{Determiner::Every, Determiner::Every};
  bool swap_premises = false;
};

Example instantiate_example(DeductionRule rule, const RoleAssignment& roles);

/// Draws a RoleAssignment. Throws LexiconTooSmall unless the lexicon has at
/// least 3 concepts, 1 adjective and 1 name.
RoleAssignment sample_roles(Rng& rng, const Lexicon& lexicon);

Example generate_example(DeductionRule rule, Rng& rng, const Lexicon& lexicon = Lexicon::defaults());

struct GenSpec {
  DeductionRule rule = DeductionRule::ImplicationElimination;
  std::size_t count = 100;
  std::uint64_t seed = 42;
  Lexicon lexicon = Lexicon::defaults();
  bool shuffle_premises = false;
};

/// `count` distinct examples (by premises and conclusion), ids "{rule}-{index}".
/// Throws LexiconTooSmall when the lexicon cannot supply that many.
std::vector<Example> generate_dataset(const GenSpec& spec);

// Dataset files: one JSON object per line with id, rule, premises, conclusion, gold.
nlohmann::ordered_json example_to_json(const Example& example, const RealizationConfig& config = {});
Example example_from_json(const nlohmann::json& record, const SentenceParser& parser);
std::string dataset_to_jsonl(const std::vector<Example>& examples, const RealizationConfig& config = {});
void write_dataset(const std::filesystem::path& path, const std::vector<Example>& examples);
std::vector<Example> read_dataset(const std::filesystem::path& path, const SentenceParser& parser);

struct CorpusSpec {
  std::size_t exemplars_per_question = 3;
  std::size_t questions_per_rule = 100;
  std::uint64_t split_numerator = 9;
  std::uint64_t split_denominator = 10;
  std::uint64_t seed = 42;
  Lexicon lexicon = Lexicon::defaults();

  void validate() const;
  std::size_t total() const { return 6 * questions_per_rule * exemplars_per_question; }
  /// round(split_fraction * total), halves rounded up.
  std::size_t train_size() const;
};

struct CorpusRecord {
  std::string id;
  DeductionRule rule;
  std::string text;  // "Q: ... Prove: ...\nA: <gold>"
};

struct Corpus {
  std::vector<CorpusRecord> train;
  std::vector<CorpusRecord> validation;
  nlohmann::ordered_json manifest;
};

Corpus emit_corpus(const CorpusSpec& spec);

/// Writes train.jsonl, validation.jsonl and manifest.json into `dir`.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace cotbench

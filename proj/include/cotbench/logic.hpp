#pragma once

// Logical forms for the restricted copular-sentence fragment used by the
// deductive-reasoning tasks: subjects, complements, statements, proof steps
// and the six deduction rules.

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace cotbench {

/// Fictional countable noun stem, stored lowercase ("impus").
class Concept {
 public:
  explicit Concept(std::string stem);
  const std::string& stem() const { return stem_; }
  bool operator==(const Concept&) const = default;
  auto operator<=>(const Concept&) const = default;

 private:
  std::string stem_;
};

class Adjective {
 public:
  explicit Adjective(std::string word);
  const std::string& word() const { return word_; }
  bool operator==(const Adjective&) const = default;
  auto operator<=>(const Adjective&) const = default;

 private:
  std::string word_;
};

/// Proper name; first character is uppercase.
class EntityName {
 public:
  explicit EntityName(std::string name);
  const std::string& str() const { return name_; }
  bool operator==(const EntityName&) const = default;
  auto operator<=>(const EntityName&) const = default;

 private:
  std::string name_;
};

enum class Determiner { Every, Each, BarePlural };

/// Right-hand side of a copular sentence. `Or` holds exactly two branches,
/// neither of which is itself an `Or`.
class Complement {
 public:
  enum class Kind { Adj, Noun, AdjNoun, Or };

  static Complement adj(Adjective a);
  static Complement noun(Concept c);
  static Complement adj_noun(Adjective a, Concept c);
  static Complement either(Complement left, Complement right);

  Kind kind() const { return kind_; }
  const Adjective& adjective() const;  // Adj, AdjNoun
  const Concept& noun() const;         // Noun, AdjNoun
  const Complement& left() const;      // Or
  const Complement& right() const;     // Or

  bool operator==(const Complement& other) const;

 private:
  Complement() = default;

  Kind kind_ = Kind::Adj;
  std::optional<Adjective> adjective_;
  std::optional<Concept> noun_;
  std::shared_ptr<const Complement> left_;
  std::shared_ptr<const Complement> right_;
};

struct NamedSubject {
  EntityName name;
  bool operator==(const NamedSubject&) const = default;
};

struct QuantifiedSubject {
  Determiner determiner;
  Concept noun;
  bool operator==(const QuantifiedSubject&) const = default;
};

/// "Everything [that is <restriction>]".
struct EverythingSubject {
  std::optional<Complement> restriction;
  bool operator==(const EverythingSubject&) const = default;
};

using Subject = std::variant<NamedSubject, QuantifiedSubject, EverythingSubject>;

bool is_plural(const Subject& subject);

class Statement {
 public:
  Statement(Subject subject, bool negated, Complement complement);

  /// "<this> and <other>"; neither side may already carry a conjunct.
  Statement with_conjunct(Statement other) const;
  /// Same statement with the copula polarity flipped (conjunct untouched).
  Statement negation() const;

  const Subject& subject() const { return subject_; }
  bool negated() const { return negated_; }
  const Complement& complement() const { return complement_; }
  const Statement* conjunct() const { return conjunct_.get(); }

  bool operator==(const Statement& other) const;

 private:
  Subject subject_;
  bool negated_;
  Complement complement_;
  std::shared_ptr<const Statement> conjunct_;
};

/// Convenience builders used throughout generation and tests.
Statement named_is(const EntityName& name, Complement complement, bool negated = false);
Statement quantified_is(Determiner determiner, const Concept& noun, Complement complement,
                        bool negated = false);

enum class DeductionRule {
  ImplicationElimination,
  ConjunctionIntroduction,
  ConjunctionElimination,
  DisjunctionIntroduction,
  DisjunctionElimination,
  ProofByContradiction,
};

inline constexpr DeductionRule kAllRules[] = {
    DeductionRule::ImplicationElimination, DeductionRule::ConjunctionIntroduction,
    DeductionRule::ConjunctionElimination, DeductionRule::DisjunctionIntroduction,
    DeductionRule::DisjunctionElimination, DeductionRule::ProofByContradiction,
};

/// snake_case name, e.g. "implication_elimination".
std::string_view rule_name(DeductionRule rule);
/// Accepts the snake_case or kebab-case name, or the two-letter code (IE, CI, CE, DI, DE, PBC),
/// case-insensitively.
DeductionRule parse_rule(std::string_view text);

struct RuleArity {
  std::size_t premises;
  std::size_t paragraphs;
  bool operator==(const RuleArity&) const = default;
};

RuleArity rule_arity(DeductionRule rule);

enum class StepKind { Plain, Assume, Contradicts, Since };

/// One sentence of a proof. `aux` is the Since-condition for `Since` steps and
/// the contradicted statement for `Contradicts` steps (whose `statement` is the
/// derived fact that clashes with it, i.e. the negation of `aux`).
class ProofStep {
 public:
  static ProofStep plain(Statement s);
  static ProofStep assume(Statement s);
  static ProofStep contradicts(Statement contradicted);
  static ProofStep since(Statement condition, Statement conclusion);

  StepKind kind() const { return kind_; }
  const Statement& statement() const { return statement_; }
  const std::optional<Statement>& aux() const { return aux_; }

  bool operator==(const ProofStep&) const = default;

 private:
  ProofStep(StepKind kind, Statement statement, std::optional<Statement> aux);

  StepKind kind_;
  Statement statement_;
  std::optional<Statement> aux_;
};

using Paragraph = std::vector<ProofStep>;

class ProofChain {
 public:
  explicit ProofChain(std::vector<Paragraph> paragraphs);

  const std::vector<Paragraph>& paragraphs() const { return paragraphs_; }
  std::vector<ProofStep> steps() const;
  std::size_t step_count() const;

  bool operator==(const ProofChain&) const = default;

 private:
  std::vector<Paragraph> paragraphs_;
};

struct Example {
  std::string id;
  DeductionRule rule;
  std::vector<Statement> premises;
  Statement conclusion;
  ProofChain gold;
};

/// Throws std::invalid_argument when premise or paragraph counts disagree with rule_arity.
void validate_shape(const Example& example);

/// Vocabulary the generator samples from and the parser recognizes.
struct Lexicon {
  std::vector<std::string> concepts;
  std::vector<std::string> adjectives;
  std::vector<std::string> names;

  static Lexicon defaults();
  /// Throws std::invalid_argument on malformed or overlapping entries.
  void validate() const;

  bool operator==(const Lexicon&) const = default;
};

}  // namespace cotbench

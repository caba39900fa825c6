#include "cotbench/logic.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace cotbench {
namespace {

bool lowercase_word(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return c >= 'a' && c <= 'z'; });
}

std::string lowered(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

Concept::Concept(std::string stem) : stem_(lowered(std::move(stem))) {
  if (!lowercase_word(stem_)) throw std::invalid_argument("invalid concept stem: '" + stem_ + "'");
}

Adjective::Adjective(std::string word) : word_(lowered(std::move(word))) {
  if (!lowercase_word(word_)) throw std::invalid_argument("invalid adjective: '" + word_ + "'");
}

EntityName::EntityName(std::string name) : name_(std::move(name)) {
  if (name_.empty() || !std::isupper(static_cast<unsigned char>(name_.front())) ||
      !std::all_of(name_.begin(), name_.end(),
                   [](unsigned char c) { return std::isalpha(c) != 0; })) {
    throw std::invalid_argument("invalid entity name: '" + name_ + "'");
  }
}

Complement Complement::adj(Adjective a) {
  Complement c;
  c.kind_ = Kind::Adj;
  c.adjective_ = std::move(a);
  return c;
}

Complement Complement::noun(Concept n) {
  Complement c;
  c.kind_ = Kind::Noun;
  c.noun_ = std::move(n);
  return c;
}

Complement Complement::adj_noun(Adjective a, Concept n) {
  Complement c;
  c.kind_ = Kind::AdjNoun;
  c.adjective_ = std::move(a);
  c.noun_ = std::move(n);
  return c;
}

Complement Complement::either(Complement left, Complement right) {
  if (left.kind() == Kind::Or || right.kind() == Kind::Or) {
    throw std::invalid_argument("disjunction branches cannot themselves be disjunctions");
  }
  Complement c;
  c.kind_ = Kind::Or;
  c.left_ = std::make_shared<const Complement>(std::move(left));
  c.right_ = std::make_shared<const Complement>(std::move(right));
  return c;
}

const Adjective& Complement::adjective() const {
  if (!adjective_) throw std::logic_error("complement has no adjective");
  return *adjective_;
}

const Concept& Complement::noun() const {
  if (!noun_) throw std::logic_error("complement has no noun");
  return *noun_;
}

const Complement& Complement::left() const {
  if (!left_) throw std::logic_error("complement is not a disjunction");
  return *left_;
}

const Complement& Complement::right() const {
  if (!right_) throw std::logic_error("complement is not a disjunction");
  return *right_;
}

bool Complement::operator==(const Complement& other) const {
  if (kind_ != other.kind_ || adjective_ != other.adjective_ || noun_ != other.noun_) return false;
  if (kind_ != Kind::Or) return true;
  return *left_ == *other.left_ && *right_ == *other.right_;
}

bool is_plural(const Subject& subject) {
  const auto* q = std::get_if<QuantifiedSubject>(&subject);
  return q != nullptr && q->determiner == Determiner::BarePlural;
}

Statement::Statement(Subject subject, bool negated, Complement complement)
    : subject_(std::move(subject)), negated_(negated), complement_(std::move(complement)) {}

Statement Statement::with_conjunct(Statement other) const {
  if (conjunct_ || other.conjunct_) {
    throw std::invalid_argument("a conjunct cannot itself carry a conjunct");
  }
  Statement out = *this;
  out.conjunct_ = std::make_shared<const Statement>(std::move(other));
  return out;
}

Statement Statement::negation() const {
  Statement out = *this;
  out.negated_ = !negated_;
  return out;
}

bool Statement::operator==(const Statement& other) const {
  if (subject_ != other.subject_ || negated_ != other.negated_ ||
      complement_ != other.complement_) {
    return false;
  }
  if (!conjunct_ || !other.conjunct_) return !conjunct_ && !other.conjunct_;
  return *conjunct_ == *other.conjunct_;
}

Statement named_is(const EntityName& name, Complement complement, bool negated) {
  return Statement(NamedSubject{name}, negated, std::move(complement));
}

Statement quantified_is(Determiner determiner, const Concept& noun, Complement complement,
                        bool negated) {
  return Statement(QuantifiedSubject{determiner, noun}, negated, std::move(complement));
}

std::string_view rule_name(DeductionRule rule) {
  switch (rule) {
    case DeductionRule::ImplicationElimination: return "implication_elimination";
    case DeductionRule::ConjunctionIntroduction: return "conjunction_introduction";
    case DeductionRule::ConjunctionElimination: return "conjunction_elimination";
    case DeductionRule::DisjunctionIntroduction: return "disjunction_introduction";
    case DeductionRule::DisjunctionElimination: return "disjunction_elimination";
    case DeductionRule::ProofByContradiction: return "proof_by_contradiction";
  }
  return "unknown";
}

DeductionRule parse_rule(std::string_view text) {
  std::string key = lowered(std::string(text));
  std::replace(key.begin(), key.end(), '-', '_');
  static const std::pair<std::string_view, DeductionRule> kCodes[] = {
      {"ie", DeductionRule::ImplicationElimination}, {"ci", DeductionRule::ConjunctionIntroduction},
      {"ce", DeductionRule::ConjunctionElimination}, {"di", DeductionRule::DisjunctionIntroduction},
      {"de", DeductionRule::DisjunctionElimination}, {"pbc", DeductionRule::ProofByContradiction},
  };
  for (const auto& [code, rule] : kCodes) {
    if (key == code || key == rule_name(rule)) return rule;
  }
  throw std::invalid_argument("unknown deduction rule: '" + std::string(text) + "'");
}

RuleArity rule_arity(DeductionRule rule) {
  switch (rule) {
    case DeductionRule::ImplicationElimination: return {2, 1};
    case DeductionRule::ConjunctionIntroduction: return {2, 1};
    case DeductionRule::ConjunctionElimination: return {1, 1};
    case DeductionRule::DisjunctionIntroduction: return {1, 1};
    case DeductionRule::DisjunctionElimination: return {3, 3};
    case DeductionRule::ProofByContradiction: return {2, 3};
  }
  throw std::logic_error("unreachable");
}

ProofStep::ProofStep(StepKind kind, Statement statement, std::optional<Statement> aux)
    : kind_(kind), statement_(std::move(statement)), aux_(std::move(aux)) {}

ProofStep ProofStep::plain(Statement s) { return {StepKind::Plain, std::move(s), std::nullopt}; }

ProofStep ProofStep::assume(Statement s) { return {StepKind::Assume, std::move(s), std::nullopt}; }

ProofStep ProofStep::contradicts(Statement contradicted) {
  Statement clash = contradicted.negation();
  return {StepKind::Contradicts, std::move(clash), std::move(contradicted)};
}

ProofStep ProofStep::since(Statement condition, Statement conclusion) {
  return {StepKind::Since, std::move(conclusion), std::move(condition)};
}

ProofChain::ProofChain(std::vector<Paragraph> paragraphs) : paragraphs_(std::move(paragraphs)) {
  if (paragraphs_.empty()) throw std::invalid_argument("proof chain needs at least one paragraph");
  for (const auto& p : paragraphs_) {
    if (p.empty()) throw std::invalid_argument("proof chain paragraph is empty");
  }
}

std::vector<ProofStep> ProofChain::steps() const {
  std::vector<ProofStep> out;
  for (const auto& p : paragraphs_) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::size_t ProofChain::step_count() const {
  std::size_t n = 0;
  for (const auto& p : paragraphs_) n += p.size();
  return n;
}

void validate_shape(const Example& example) {
  const RuleArity arity = rule_arity(example.rule);
  if (example.premises.size() != arity.premises) {
    throw std::invalid_argument("example " + example.id + ": expected " +
                                std::to_string(arity.premises) + " premises, got " +
                                std::to_string(example.premises.size()));
  }
  if (example.gold.paragraphs().size() != arity.paragraphs) {
    throw std::invalid_argument("example " + example.id + ": expected " +
                                std::to_string(arity.paragraphs) + " gold paragraphs, got " +
                                std::to_string(example.gold.paragraphs().size()));
  }
}

Lexicon Lexicon::defaults() {
  return Lexicon{
      {"impus", "sterpus", "wumpus", "yumpus", "zumpus", "dumpus", "rompus", "numpus", "tumpus",
       "vumpus"},
      {"floral", "earthy", "hot", "transparent", "loud", "liquid"},
      {"Alex", "Wren", "Max", "Sam", "Fae", "Polly"},
  };
}

void Lexicon::validate() const {
  // Function words of the grammar cannot double as content words.
  std::set<std::string> seen = {"a",     "an",    "and",  "are",        "assume", "contradicts",
                                "each",  "every", "everything", "is", "not",    "or",
                                "since", "that",  "this", "with"};
  auto claim = [&](const std::string& w) {
    if (!seen.insert(lowered(w)).second) {
      throw std::invalid_argument("lexicon word used twice: '" + w + "'");
    }
  };
  for (const auto& c : concepts) {
    Concept{c};
    if (c != lowered(c)) throw std::invalid_argument("concept must be lowercase: '" + c + "'");
    claim(c);
  }
  for (const auto& a : adjectives) {
    Adjective{a};
    if (a != lowered(a)) throw std::invalid_argument("adjective must be lowercase: '" + a + "'");
    claim(a);
  }
  for (const auto& n : names) {
    EntityName{n};
    claim(n);
  }
}

}  // namespace cotbench

#include "cotbench/proof_check.hpp"

#include <algorithm>
#include <stdexcept>

namespace cotbench {

std::string_view mode_name(CheckMode mode) {
  return mode == CheckMode::Strict ? "strict" : "valid";
}

CheckMode parse_mode(std::string_view text) {
  if (text == "strict") return CheckMode::Strict;
  if (text == "valid") return CheckMode::Valid;
  throw std::invalid_argument("unknown check mode: '" + std::string(text) + "'");
}

namespace {

std::vector<ParseFailure> collect_failures(const std::vector<StepParse>& parsed) {
  std::vector<ParseFailure> out;
  for (const auto& p : parsed) {
    if (const auto* e = std::get_if<UnparseableSentence>(&p.result)) {
      out.push_back({p.sentence.paragraph + 1, p.sentence.index + 1, p.sentence.text,
                     std::string(e->span()), e->what()});
    }
  }
  return out;
}

}  // namespace

Verdict check_strict(std::string_view generated, const Example& example,
                     const SentenceParser& parser) {
  Verdict v;
  v.mode = CheckMode::Strict;
  const auto parsed = parse_chain_text(generated, parser);
  v.parse_failures = collect_failures(parsed);

  struct GoldStep {
    std::size_t paragraph;
    std::size_t step;
    const ProofStep* proof_step;
  };
  std::vector<GoldStep> gold;
  const auto& paragraphs = example.gold.paragraphs();
  for (std::size_t p = 0; p < paragraphs.size(); ++p) {
    for (std::size_t s = 0; s < paragraphs[p].size(); ++s) gold.push_back({p + 1, s + 1, &paragraphs[p][s]});
  }

  const std::size_t n = std::max(gold.size(), parsed.size());
  for (std::size_t i = 0; i < n; ++i) {
    const ProofStep* got = nullptr;
    if (i < parsed.size()) got = std::get_if<ProofStep>(&parsed[i].result);
    const ProofStep* expected = i < gold.size() ? gold[i].proof_step : nullptr;
    if (got != nullptr && expected != nullptr && *got == *expected) continue;

    Divergence d;
    if (i < gold.size()) {
      d.paragraph = gold[i].paragraph;
      d.step = gold[i].step;
    } else {
      d.paragraph = gold.back().paragraph;
      d.step = gold.back().step + (i - gold.size() + 1);
    }
    d.expected = expected != nullptr ? realize_step(*expected, parser.config()) : std::string();
    d.got = i < parsed.size() ? parsed[i].sentence.text + "." : std::string();
    v.first_divergence = std::move(d);
    break;
  }
  v.correct = !v.first_divergence && v.parse_failures.empty();
  return v;
}

namespace {

bool contains(const std::vector<Statement>& facts, const Statement& s) {
  return std::find(facts.begin(), facts.end(), s) != facts.end();
}

const EntityName* named_subject(const Statement& s) {
  const auto* n = std::get_if<NamedSubject>(&s.subject());
  return n != nullptr ? &n->name : nullptr;
}

bool holds_positive(const std::vector<Statement>& known, const EntityName& name, const Complement& c) {
  return contains(known, named_is(name, c));
}

// The forward inferences a rule may use beyond restating what is known.
struct RuleSet {
  bool modus_ponens = false;
  bool conj_intro = false;
  bool conj_elim = false;
  bool disj_intro = false;
  bool case_analysis = false;   // Since-steps
  bool contradiction = false;   // Contradicts-steps and conjunctions of refutations

  static RuleSet for_rule(DeductionRule rule) {
    RuleSet r;
    switch (rule) {
      case DeductionRule::ImplicationElimination: r.modus_ponens = true; break;
      case DeductionRule::ConjunctionIntroduction: r.conj_intro = true; break;
      case DeductionRule::ConjunctionElimination: r.conj_elim = true; break;
      case DeductionRule::DisjunctionIntroduction: r.disj_intro = true; break;
      case DeductionRule::DisjunctionElimination:
        r.modus_ponens = true;
        r.case_analysis = true;
        break;
      case DeductionRule::ProofByContradiction:
        r.modus_ponens = true;
        r.disj_intro = true;
        r.contradiction = true;
        break;
    }
    return r;
  }
};

bool derivable(const Statement& s, const std::vector<Statement>& known, const RuleSet& rules) {
  if (contains(known, s)) return true;

  if (const Statement* rhs = s.conjunct()) {
    if (!rules.contradiction) return false;
    Statement lhs(s.subject(), s.negated(), s.complement());
    return contains(known, lhs) && contains(known, *rhs);
  }

  const EntityName* name = named_subject(s);
  if (name == nullptr) return false;
  const Complement& c = s.complement();

  if (rules.modus_ponens) {
    for (const auto& u : known) {
      if (u.conjunct() != nullptr || u.negated() != s.negated() || !(u.complement() == c)) continue;
      if (const auto* q = std::get_if<QuantifiedSubject>(&u.subject())) {
        if (holds_positive(known, *name, Complement::noun(q->noun))) return true;
      } else if (const auto* e = std::get_if<EverythingSubject>(&u.subject())) {
        if (!e->restriction) {
          return true;
        }
        if (holds_positive(known, *name, *e->restriction)) return true;
        if (e->restriction->kind() == Complement::Kind::Or &&
            (holds_positive(known, *name, e->restriction->left()) ||
             holds_positive(known, *name, e->restriction->right()))) {
          return true;
        }
      }
    }
  }
  if (s.negated()) return false;

  if (rules.conj_intro && c.kind() == Complement::Kind::AdjNoun &&
      holds_positive(known, *name, Complement::adj(c.adjective())) &&
      holds_positive(known, *name, Complement::noun(c.noun()))) {
    return true;
  }
  if (rules.conj_elim && (c.kind() == Complement::Kind::Noun || c.kind() == Complement::Kind::Adj)) {
    for (const auto& k : known) {
      if (named_subject(k) == nullptr || *named_subject(k) != *name || k.negated() ||
          k.conjunct() != nullptr || k.complement().kind() != Complement::Kind::AdjNoun) {
        continue;
      }
      if (c.kind() == Complement::Kind::Noun && k.complement().noun() == c.noun()) return true;
      if (c.kind() == Complement::Kind::Adj && k.complement().adjective() == c.adjective()) return true;
    }
  }
  if (rules.disj_intro && c.kind() == Complement::Kind::Or &&
      (holds_positive(known, *name, c.left()) || holds_positive(known, *name, c.right()))) {
    return true;
  }
  return false;
}

// Walks the steps keeping the facts established at top level and inside the
// currently open assumption. An assumption closes at the next "Assume", at a
// "Since" step, once its own negation has been stated after a contradiction,
// or when a step can only be justified outside it.
class ValidityWalker {
 public:
  ValidityWalker(const Example& example) : rules_(RuleSet::for_rule(example.rule)) {
    top_ = example.premises;
  }

  bool accept(const ProofStep& step) {
    switch (step.kind()) {
      case StepKind::Assume:
        close();
        context_ = Context{step.statement(), {}, false};
        last_at_top_ = false;
        return true;

      case StepKind::Contradicts: {
        if (!rules_.contradiction || !context_) return false;
        const auto known = context_known();
        if (!contains(top_, *step.aux()) || !contains(known, step.statement())) return false;
        context_->contradiction = true;
        return true;
      }

      case StepKind::Since: {
        close();
        if (!rules_.case_analysis) return false;
        const Statement& cases = *step.aux();
        const EntityName* name = named_subject(cases);
        if (!contains(top_, cases) || name == nullptr || cases.negated() ||
            cases.complement().kind() != Complement::Kind::Or) {
          return false;
        }
        for (const Complement* branch : {&cases.complement().left(), &cases.complement().right()}) {
          const Statement assumed = named_is(*name, *branch);
          if (std::find(hypotheticals_.begin(), hypotheticals_.end(),
                        std::pair{assumed, step.statement()}) == hypotheticals_.end()) {
            return false;
          }
        }
        top_.push_back(step.statement());
        last_at_top_ = true;
        return true;
      }

      case StepKind::Plain:
        return accept_plain(step.statement());
    }
    return false;
  }

  bool finished_with(const Statement& conclusion) const {
    return !context_ && last_at_top_ && last_ && *last_ == conclusion;
  }

  void remember(const Statement& s) { last_ = s; }

 private:
  struct Context {
    Statement assumed;
    std::vector<Statement> facts;
    bool contradiction;
  };

  std::vector<Statement> context_known() const {
    std::vector<Statement> known = top_;
    known.push_back(context_->assumed);
    known.insert(known.end(), context_->facts.begin(), context_->facts.end());
    return known;
  }

  bool accept_plain(const Statement& s) {
    if (context_) {
      if (context_->contradiction && s == context_->assumed.negation()) {
        context_->facts.push_back(s);
        close();
        return true;
      }
      if (derivable(s, context_known(), rules_)) {
        context_->facts.push_back(s);
        last_at_top_ = false;
        return true;
      }
      close();
    }
    if (!derivable(s, top_, rules_)) return false;
    top_.push_back(s);
    last_at_top_ = true;
    return true;
  }

  void close() {
    if (!context_) return;
    for (const auto& f : context_->facts) hypotheticals_.emplace_back(context_->assumed, f);
    const Statement refuted = context_->assumed.negation();
    if (context_->contradiction && contains(context_->facts, refuted)) {
      top_.push_back(refuted);
      last_at_top_ = true;
    }
    context_.reset();
  }

  RuleSet rules_;
  std::vector<Statement> top_;
  std::optional<Context> context_;
  std::vector<std::pair<Statement, Statement>> hypotheticals_;
  std::optional<Statement> last_;
  bool last_at_top_ = false;
};

}  // namespace

Verdict check_valid(std::string_view generated, const Example& example,
                    const SentenceParser& parser) {
  Verdict v;
  v.mode = CheckMode::Valid;
  const auto parsed = parse_chain_text(generated, parser);
  v.parse_failures = collect_failures(parsed);
  if (!v.parse_failures.empty()) {
    const auto& f = v.parse_failures.front();
    v.first_divergence = Divergence{f.paragraph, f.step, "", f.sentence + "."};
    return v;
  }

  ValidityWalker walker(example);
  for (const auto& p : parsed) {
    const auto& step = std::get<ProofStep>(p.result);
    if (!walker.accept(step)) {
      v.first_divergence = Divergence{p.sentence.paragraph + 1, p.sentence.index + 1,
                                      "a step justified by the premises or the " +
                                          std::string(rule_name(example.rule)) + " rule",
                                      p.sentence.text + "."};
      return v;
    }
    walker.remember(step.statement());
  }
  if (!walker.finished_with(example.conclusion)) {
    const std::size_t paragraph = parsed.empty() ? 1 : parsed.back().sentence.paragraph + 1;
    const std::size_t step = parsed.empty() ? 1 : parsed.back().sentence.index + 2;
    v.first_divergence = Divergence{paragraph, step, realize(example.conclusion, parser.config()), ""};
    return v;
  }
  v.correct = true;
  return v;
}

}  // namespace cotbench

#include "cotbench/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace cotbench {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string article_for(std::string_view word, const RealizationConfig& config) {
  const bool vowel = !word.empty() && config.vowel_letters.find(static_cast<char>(std::tolower(
                                          static_cast<unsigned char>(word.front())))) !=
                                          std::string::npos;
  return vowel ? "an" : "a";
}

std::string realize_complement(const Complement& c, bool plural, const RealizationConfig& config) {
  switch (c.kind()) {
    case Complement::Kind::Adj:
      return c.adjective().word();
    case Complement::Kind::Noun:
      if (plural) return pluralize(c.noun(), config);
      return article_for(c.noun().stem(), config) + " " + c.noun().stem();
    case Complement::Kind::AdjNoun:
      if (plural) return c.adjective().word() + " " + pluralize(c.noun(), config);
      return article_for(c.adjective().word(), config) + " " + c.adjective().word() + " " +
             c.noun().stem();
    case Complement::Kind::Or:
      return realize_complement(c.left(), plural, config) + " or " +
             realize_complement(c.right(), plural, config);
  }
  return {};
}

std::string realize_subject(const Subject& subject, const RealizationConfig& config) {
  struct Visitor {
    const RealizationConfig& config;
    std::string operator()(const NamedSubject& s) const { return s.name.str(); }
    std::string operator()(const QuantifiedSubject& s) const {
      switch (s.determiner) {
        case Determiner::Every: return "Every " + s.noun.stem();
        case Determiner::Each: return "Each " + s.noun.stem();
        case Determiner::BarePlural: return pluralize(s.noun, config);
      }
      return {};
    }
    std::string operator()(const EverythingSubject& s) const {
      if (!s.restriction) return "Everything";
      return "Everything that is " + realize_complement(*s.restriction, false, config);
    }
  };
  return std::visit(Visitor{config}, subject);
}

void check_realizable(const Statement& statement) {
  const auto* everything = std::get_if<EverythingSubject>(&statement.subject());
  if (everything != nullptr && (!everything->restriction || statement.conjunct() != nullptr)) {
    throw std::invalid_argument(
        "\"Everything\" subjects are only realizable as a restricted universal premise");
  }
  if (const Statement* c = statement.conjunct();
      c != nullptr && std::holds_alternative<EverythingSubject>(c->subject())) {
    throw std::invalid_argument("\"Everything\" cannot appear in a conjunct");
  }
}

// Lowercase the first letter unless the clause opens with a proper name.
std::string embedded_clause(const Statement& s, const RealizationConfig& config) {
  std::string clause = realize_clause(s, config);
  if (!std::holds_alternative<NamedSubject>(s.subject()) && !clause.empty()) {
    clause[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(clause[0])));
  }
  return clause;
}

// ---------------------------------------------------------------------------
// Parsing

struct Token {
  std::string_view text;
  std::size_t offset;
};

class Cursor {
 public:
  Cursor(std::string_view source, std::size_t base, const std::string& full)
      : full_(full), base_(base) {
    std::size_t i = 0;
    while (i < source.size()) {
      while (i < source.size() && is_space(source[i])) ++i;
      const std::size_t start = i;
      while (i < source.size() && !is_space(source[i])) ++i;
      if (i > start) tokens_.push_back({source.substr(start, i - start), base + start});
    }
    end_offset_ = base + source.size();
  }

  bool done() const { return pos_ >= tokens_.size(); }
  std::size_t position() const { return pos_; }
  const Token* peek() const { return done() ? nullptr : &tokens_[pos_]; }
  std::string peek_lower() const { return done() ? std::string() : lower(tokens_[pos_].text); }
  Token take() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& reason) const {
    if (done()) throw UnparseableSentence(full_, end_offset_, 0, reason + " at end of sentence");
    const Token& t = tokens_[pos_];
    throw UnparseableSentence(full_, t.offset, t.text.size(),
                              reason + " at '" + std::string(t.text) + "'");
  }

 private:
  const std::string& full_;
  std::size_t base_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t end_offset_ = 0;
};

}  // namespace

UnparseableSentence::UnparseableSentence(std::string text, std::size_t offset, std::size_t length,
                                         const std::string& reason)
    : std::runtime_error("unparseable sentence: " + reason),
      text_(std::move(text)),
      offset_(std::min(offset, text_.size())),
      length_(std::min(length, text_.size() - offset_)) {}

std::string_view UnparseableSentence::span() const {
  return std::string_view(text_).substr(offset_, length_);
}

std::string pluralize(const Concept& noun, const RealizationConfig& config) {
  const std::string& stem = noun.stem();
  if (config.plural_rule == PluralRule::EsAfterS && !stem.empty() && stem.back() == 's') {
    return stem + "es";
  }
  return stem + "s";
}

std::string realize_clause(const Statement& statement, const RealizationConfig& config) {
  const bool plural = is_plural(statement.subject());
  std::string out = realize_subject(statement.subject(), config);
  out += plural ? " are" : " is";
  if (statement.negated()) out += " not";
  out += " ";
  out += realize_complement(statement.complement(), plural, config);
  if (const Statement* c = statement.conjunct()) {
    out += " and ";
    out += embedded_clause(*c, config);
  }
  return out;
}

std::string realize(const Statement& statement, const RealizationConfig& config) {
  check_realizable(statement);
  return capitalize(realize_clause(statement, config)) + ".";
}

std::string realize_step(const ProofStep& step, const RealizationConfig& config) {
  switch (step.kind()) {
    case StepKind::Plain:
      return realize(step.statement(), config);
    case StepKind::Assume:
      check_realizable(step.statement());
      return "Assume " + embedded_clause(step.statement(), config) + ".";
    case StepKind::Contradicts:
      check_realizable(*step.aux());
      return "This contradicts with " + realize_clause(*step.aux(), config) + ".";
    case StepKind::Since:
      check_realizable(*step.aux());
      check_realizable(step.statement());
      return "Since " + realize_clause(*step.aux(), config) + ", " +
             realize_clause(step.statement(), config) + ".";
  }
  return {};
}

std::string realize_chain(const ProofChain& chain, const RealizationConfig& config) {
  std::string out;
  bool first_paragraph = true;
  for (const auto& paragraph : chain.paragraphs()) {
    if (!first_paragraph) out += config.paragraph_separator;
    first_paragraph = false;
    bool first_step = true;
    for (const auto& step : paragraph) {
      if (!first_step) out += ' ';
      first_step = false;
      out += realize_step(step, config);
    }
  }
  return out;
}

// Recursive-descent parser over whitespace-separated tokens:
//
//   statement  := clause [ "and" clause ]
//   clause     := subject ("is" | "are") [ "not" ] complement
//   subject    := NAME | ("every" | "each") CONCEPT | PLURAL
//               | "everything" [ "that" "is" complement ]
//   complement := branch [ "or" branch ]
//   branch     := ADJ | ART CONCEPT | ART ADJ CONCEPT          (singular)
//               | ADJ | PLURAL | ADJ PLURAL                     (plural)
struct SentenceParser::Impl {
  const SentenceParser& self;
  Cursor& cur;

  bool is_adjective(std::string_view w) const {
    const auto& a = self.lexicon_.adjectives;
    return std::find(a.begin(), a.end(), w) != a.end();
  }
  bool is_concept(std::string_view w) const {
    const auto& c = self.lexicon_.concepts;
    return std::find(c.begin(), c.end(), w) != c.end();
  }
  std::optional<std::string> plural_stem(std::string_view w) const {
    for (const auto& [plural, stem] : self.plurals_) {
      if (plural == w) return stem;
    }
    return std::nullopt;
  }
  std::optional<std::string> name(std::string_view w, bool sentence_initial) const {
    for (const auto& n : self.lexicon_.names) {
      if (n == w || (sentence_initial && lower(n) == lower(w))) return n;
    }
    return std::nullopt;
  }

  Statement statement(bool sentence_initial) {
    Statement s = clause(sentence_initial);
    if (cur.peek_lower() == "and") {
      cur.take();
      Statement rhs = clause(false);
      if (cur.peek_lower() == "and") cur.fail("a conjunction has exactly two clauses");
      s = s.with_conjunct(std::move(rhs));
    }
    if (!cur.done()) cur.fail("unexpected word");
    return s;
  }

  Statement clause(bool sentence_initial) {
    Subject subj = subject(sentence_initial);
    const bool plural = is_plural(subj);
    const std::string copula = cur.peek_lower();
    if (copula != (plural ? "are" : "is")) cur.fail(plural ? "expected 'are'" : "expected 'is'");
    cur.take();
    bool negated = false;
    if (cur.peek_lower() == "not") {
      cur.take();
      negated = true;
    }
    Complement comp = complement(plural);
    return Statement(std::move(subj), negated, std::move(comp));
  }

  Subject subject(bool sentence_initial) {
    if (cur.done()) cur.fail("expected a subject");
    const Token t = *cur.peek();
    const std::string tl = lower(t.text);
    if (tl == "every" || tl == "each") {
      cur.take();
      if (cur.done() || !is_concept(cur.peek()->text)) cur.fail("expected a concept after '" + tl + "'");
      Concept c{std::string(cur.take().text)};
      return QuantifiedSubject{tl == "every" ? Determiner::Every : Determiner::Each, std::move(c)};
    }
    if (tl == "everything") {
      cur.take();
      if (cur.peek_lower() != "that") return EverythingSubject{};
      cur.take();
      if (cur.peek_lower() != "is") cur.fail("expected 'is' in relative clause");
      cur.take();
      return EverythingSubject{complement(false)};
    }
    if (auto n = name(t.text, sentence_initial)) {
      cur.take();
      return NamedSubject{EntityName{*n}};
    }
    const std::string key = sentence_initial ? tl : std::string(t.text);
    if (auto stem = plural_stem(key)) {
      cur.take();
      return QuantifiedSubject{Determiner::BarePlural, Concept{*stem}};
    }
    cur.fail("unknown subject");
  }

  Complement complement(bool plural) {
    Complement first = branch(plural);
    if (cur.peek_lower() != "or") return first;
    cur.take();
    Complement second = branch(plural);
    if (cur.peek_lower() == "or") cur.fail("a disjunction has exactly two branches");
    return Complement::either(std::move(first), std::move(second));
  }

  Complement branch(bool plural) {
    if (cur.done()) cur.fail("expected a complement");
    const std::string_view w = cur.peek()->text;
    if (plural) {
      if (is_adjective(w)) {
        Adjective a{std::string(cur.take().text)};
        if (!cur.done()) {
          if (auto stem = plural_stem(cur.peek()->text)) {
            cur.take();
            return Complement::adj_noun(std::move(a), Concept{*stem});
          }
        }
        return Complement::adj(std::move(a));
      }
      if (auto stem = plural_stem(w)) {
        cur.take();
        return Complement::noun(Concept{*stem});
      }
      cur.fail("expected an adjective or plural noun");
    }
    if (w == "a" || w == "an") {
      cur.take();
      if (cur.done()) cur.fail("expected a noun phrase after article");
      const std::string_view next = cur.peek()->text;
      if (is_concept(next)) return Complement::noun(Concept{std::string(cur.take().text)});
      if (is_adjective(next)) {
        Adjective a{std::string(cur.take().text)};
        if (cur.done() || !is_concept(cur.peek()->text)) cur.fail("expected a noun after adjective");
        return Complement::adj_noun(std::move(a), Concept{std::string(cur.take().text)});
      }
      cur.fail("expected a noun phrase after article");
    }
    if (is_adjective(w)) return Complement::adj(Adjective{std::string(cur.take().text)});
    cur.fail("expected an adjective or noun phrase");
  }
};

SentenceParser::SentenceParser(Lexicon lexicon, RealizationConfig config)
    : lexicon_(std::move(lexicon)), config_(std::move(config)) {
  lexicon_.validate();
  for (const auto& c : lexicon_.concepts) plurals_.emplace_back(pluralize(Concept{c}, config_), c);
}

namespace {

std::string_view strip_period(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.back() == '.') s.remove_suffix(1);
  return s;
}

bool starts_with_word(std::string_view s, std::string_view prefix) {
  return s.size() > prefix.size() && lower(s.substr(0, prefix.size())) == prefix &&
         is_space(s[prefix.size()]);
}

}  // namespace

Statement SentenceParser::parse_sentence(std::string_view text) const {
  const std::string full(text);
  const std::string_view body = strip_period(full);
  const std::size_t base = body.empty() ? 0 : static_cast<std::size_t>(body.data() - full.data());
  Cursor cur(body, base, full);
  Impl impl{*this, cur};
  return impl.statement(true);
}

ProofStep SentenceParser::parse_step(std::string_view text) const {
  const std::string full(text);
  const std::string_view body = strip_period(full);
  auto sub = [&](std::string_view part, bool sentence_initial) {
    const std::size_t base = static_cast<std::size_t>(part.data() - full.data());
    Cursor cur(part, base, full);
    Impl impl{*this, cur};
    return impl.statement(sentence_initial);
  };

  if (starts_with_word(body, "assume")) {
    return ProofStep::assume(sub(body.substr(6), true));
  }
  if (starts_with_word(body, "this contradicts with")) {
    return ProofStep::contradicts(sub(body.substr(21), true));
  }
  if (starts_with_word(body, "since")) {
    const std::string_view rest = body.substr(5);
    const std::size_t comma = rest.find(',');
    if (comma == std::string_view::npos) {
      const std::size_t off = static_cast<std::size_t>(rest.data() - full.data());
      throw UnparseableSentence(full, off, rest.size(), "'Since' clause without a main clause");
    }
    Statement condition = sub(rest.substr(0, comma), true);
    Statement conclusion = sub(rest.substr(comma + 1), true);
    return ProofStep::since(std::move(condition), std::move(conclusion));
  }
  if (body.find(',') != std::string_view::npos) {
    const std::size_t off = full.find(',');
    throw UnparseableSentence(full, off, 1, "unexpected ','");
  }
  Cursor cur(body, body.empty() ? 0 : static_cast<std::size_t>(body.data() - full.data()), full);
  Impl impl{*this, cur};
  return ProofStep::plain(impl.statement(true));
}

std::vector<Sentence> segment_sentences(std::string_view text) {
  std::vector<Sentence> out;
  std::size_t paragraph = 0;
  bool paragraph_has_sentences = false;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    const std::string_view line = text.substr(line_start, line_end - line_start);

    std::size_t index = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      const bool at_end = i == line.size();
      const bool boundary = !at_end && line[i] == '.' && (i + 1 == line.size() || is_space(line[i + 1]));
      if (!boundary && !at_end) continue;
      const std::string_view piece = trim(line.substr(start, i - start));
      if (!piece.empty()) {
        out.push_back({paragraph, index++, std::string(piece)});
        paragraph_has_sentences = true;
      }
      start = i + 1;
    }
    if (paragraph_has_sentences) {
      ++paragraph;
      paragraph_has_sentences = false;
    }
    if (line_end == text.size()) break;
    line_start = line_end + 1;
  }
  return out;
}

std::vector<StepParse> parse_chain_text(std::string_view text, const SentenceParser& parser) {
  std::vector<StepParse> out;
  for (auto& sentence : segment_sentences(text)) {
    try {
      ProofStep step = parser.parse_step(sentence.text);
      out.push_back({std::move(sentence), std::move(step)});
    } catch (const UnparseableSentence& e) {
      out.push_back({std::move(sentence), e});
    }
  }
  return out;
}

}  // namespace cotbench

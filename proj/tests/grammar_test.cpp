#include <gtest/gtest.h>

#include <regex>

#include "cotbench/grammar.hpp"
#include "support/random_statements.hpp"

namespace cotbench {
namespace {

const EntityName kAlex{"Alex"};
const EntityName kWren{"Wren"};
Complement noun(const char* c) { return Complement::noun(Concept{c}); }
Complement adj(const char* a) { return Complement::adj(Adjective{a}); }

TEST(Realize, NamedNegatedAdjective) {
  EXPECT_EQ(realize(named_is(kAlex, adj("floral"), true)), "Alex is not floral.");
}

TEST(Realize, AdjectiveNounTakesArticleOfAdjective) {
  EXPECT_EQ(realize(named_is(EntityName{"Max"}, Complement::adj_noun(Adjective{"hot"}, Concept{"impus"}))),
            "Max is a hot impus.");
  EXPECT_EQ(realize(named_is(EntityName{"Max"}, Complement::adj_noun(Adjective{"earthy"}, Concept{"sterpus"}))),
            "Max is an earthy sterpus.");
}

TEST(Realize, BarePluralSubject) {
  EXPECT_EQ(realize(quantified_is(Determiner::BarePlural, Concept{"sterpus"}, adj("transparent"))),
            "Sterpuses are transparent.");
  EXPECT_EQ(realize(quantified_is(Determiner::BarePlural, Concept{"sterpus"}, noun("wumpus"), true)),
            "Sterpuses are not wumpuses.");
}

TEST(Realize, QuantifiedDeterminers) {
  EXPECT_EQ(realize(quantified_is(Determiner::Every, Concept{"impus"}, adj("floral"), true)),
            "Every impus is not floral.");
  EXPECT_EQ(realize(quantified_is(Determiner::Each, Concept{"impus"}, noun("wumpus"))),
            "Each impus is a wumpus.");
}

TEST(Realize, Disjunction) {
  EXPECT_EQ(realize(named_is(kAlex, Complement::either(adj("earthy"), noun("impus")))),
            "Alex is earthy or an impus.");
}

TEST(Realize, EverythingRestrictedAndConjunction) {
  const Statement universal(EverythingSubject{Complement::either(noun("sterpus"), noun("impus"))}, false,
                            noun("wumpus"));
  EXPECT_EQ(realize(universal), "Everything that is a sterpus or an impus is a wumpus.");
  const auto conj = named_is(kWren, noun("sterpus"), true).with_conjunct(named_is(kWren, noun("impus"), true));
  EXPECT_EQ(realize(conj), "Wren is not a sterpus and Wren is not an impus.");
}

TEST(Realize, RejectsUnrestrictedEverything) {
  EXPECT_THROW(realize(Statement(EverythingSubject{}, false, noun("wumpus"))), std::invalid_argument);
  const Statement universal(EverythingSubject{Complement::either(noun("sterpus"), noun("impus"))}, false,
                            noun("wumpus"));
  EXPECT_THROW(realize(universal.with_conjunct(named_is(kWren, noun("impus")))), std::invalid_argument);
}

TEST(Pluralize, SuffixRule) {
  EXPECT_EQ(pluralize(Concept{"sterpus"}), "sterpuses");
  EXPECT_EQ(pluralize(Concept{"impus"}), "impuses");
  EXPECT_EQ(pluralize(Concept{"blorp"}), "blorps");
  RealizationConfig always_s;
  always_s.plural_rule = PluralRule::AlwaysS;
  EXPECT_EQ(pluralize(Concept{"impus"}, always_s), "impuss");
}

TEST(Realize, VowelSetIsConfigurable) {
  RealizationConfig cfg;
  cfg.vowel_letters = "aeiouy";
  EXPECT_EQ(realize(named_is(kAlex, noun("yumpus")), cfg), "Alex is an yumpus.");
  EXPECT_EQ(realize(named_is(kAlex, noun("yumpus"))), "Alex is a yumpus.");
}

TEST(RealizeChain, SingleParagraph) {
  const auto fact = named_is(kAlex, noun("impus"));
  const auto rule = quantified_is(Determiner::Every, Concept{"impus"}, adj("floral"), true);
  const auto concl = named_is(kAlex, adj("floral"), true);
  const ProofChain chain({{ProofStep::plain(fact), ProofStep::plain(rule), ProofStep::plain(concl)}});
  EXPECT_EQ(realize_chain(chain), "Alex is an impus. Every impus is not floral. Alex is not floral.");
}

TEST(RealizeChain, DisjunctionEliminationThreeParagraphs) {
  const auto p0 = quantified_is(Determiner::BarePlural, Concept{"sterpus"}, noun("wumpus"));
  const auto p1 = quantified_is(Determiner::Every, Concept{"impus"}, noun("wumpus"));
  const auto cases = named_is(kAlex, Complement::either(noun("sterpus"), noun("impus")));
  const auto concl = named_is(kAlex, noun("wumpus"));
  const ProofChain chain({
      {ProofStep::assume(named_is(kAlex, noun("sterpus"))), ProofStep::plain(p0), ProofStep::plain(concl)},
      {ProofStep::assume(named_is(kAlex, noun("impus"))), ProofStep::plain(p1), ProofStep::plain(concl)},
      {ProofStep::since(cases, concl)},
  });
  EXPECT_EQ(realize_chain(chain),
            "Assume Alex is a sterpus. Sterpuses are wumpuses. Alex is a wumpus.\n"
            "Assume Alex is an impus. Every impus is a wumpus. Alex is a wumpus.\n"
            "Since Alex is a sterpus or an impus, Alex is a wumpus.");
}

TEST(RealizeStep, AssumeLowercasesQuantifierButKeepsNames) {
  EXPECT_EQ(realize_step(ProofStep::assume(quantified_is(Determiner::Every, Concept{"impus"}, adj("hot")))),
            "Assume every impus is hot.");
  EXPECT_EQ(realize_step(ProofStep::contradicts(named_is(kWren, noun("wumpus"), true))),
            "This contradicts with Wren is not a wumpus.");
}

class ParserTest : public ::testing::Test {
 protected:
  SentenceParser parser{Lexicon::defaults()};
};

TEST_F(ParserTest, CanonicalSentences) {
  EXPECT_EQ(parser.parse_sentence("Alex is an impus."), named_is(kAlex, noun("impus")));
  EXPECT_EQ(parser.parse_sentence("Alex is earthy or an impus."),
            named_is(kAlex, Complement::either(adj("earthy"), noun("impus"))));
  EXPECT_EQ(parser.parse_sentence("Sterpuses are transparent."),
            quantified_is(Determiner::BarePlural, Concept{"sterpus"}, adj("transparent")));
}

TEST_F(ParserTest, RejectsThreeWayDisjunction) {
  EXPECT_THROW(parser.parse_sentence("Wren is a sterpus or transparent or loud."), UnparseableSentence);
}

TEST_F(ParserTest, ToleratesPeriodSpacingAndFirstWordCase) {
  const auto expected = named_is(kAlex, adj("floral"), true);
  EXPECT_EQ(parser.parse_sentence("Alex is not floral"), expected);
  EXPECT_EQ(parser.parse_sentence("Alex  is   not floral."), expected);
  EXPECT_EQ(parser.parse_sentence("EVERY impus IS not floral."),
            quantified_is(Determiner::Every, Concept{"impus"}, adj("floral"), true));
}

TEST_F(ParserTest, AcceptsEitherArticle) {
  EXPECT_EQ(parser.parse_sentence("Alex is a impus."), named_is(kAlex, noun("impus")));
}

TEST_F(ParserTest, ErrorsCarryTheOffendingSpan) {
  try {
    parser.parse_sentence("Alex is a glorp.");
    FAIL() << "expected UnparseableSentence";
  } catch (const UnparseableSentence& e) {
    EXPECT_EQ(e.span(), "glorp");
    EXPECT_EQ(e.text(), "Alex is a glorp.");
  }
  EXPECT_THROW(parser.parse_sentence(""), UnparseableSentence);
  EXPECT_THROW(parser.parse_sentence("Bob is an impus."), UnparseableSentence);
  EXPECT_THROW(parser.parse_sentence("Alex is an impus and"), UnparseableSentence);
  EXPECT_THROW(parser.parse_sentence("Alex is an impus extra"), UnparseableSentence);
}

TEST_F(ParserTest, ParsesEveryStepKind) {
  const auto cases = named_is(kAlex, Complement::either(noun("sterpus"), noun("impus")));
  const auto concl = named_is(kAlex, noun("wumpus"));
  EXPECT_EQ(parser.parse_step("Since Alex is a sterpus or an impus, Alex is a wumpus."),
            ProofStep::since(cases, concl));
  EXPECT_EQ(parser.parse_step("Assume Alex is a sterpus."), ProofStep::assume(named_is(kAlex, noun("sterpus"))));
  EXPECT_EQ(parser.parse_step("This contradicts with Alex is not a wumpus."),
            ProofStep::contradicts(named_is(kAlex, noun("wumpus"), true)));
  EXPECT_EQ(parser.parse_step("Alex is a wumpus."), ProofStep::plain(concl));
  EXPECT_THROW(parser.parse_step("Since Alex is a sterpus"), UnparseableSentence);
}

TEST(Segment, SplitsParagraphsAndSentences) {
  const auto s = segment_sentences("A b. C d.\n\nE f. G h");
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0].paragraph, 0u);
  EXPECT_EQ(s[1].text, "C d");
  EXPECT_EQ(s[2].paragraph, 1u);
  EXPECT_EQ(s[2].index, 0u);
  EXPECT_EQ(s[3].text, "G h");
  EXPECT_TRUE(segment_sentences("  \n ").empty());
}

TEST(ParseChain, RecordsFailuresInPlace) {
  const SentenceParser parser(Lexicon::defaults());
  const auto parsed = parse_chain_text("Alex is an impus. Alex is a glorp. Alex is hot.", parser);
  ASSERT_EQ(parsed.size(), 3u);
  EXPECT_TRUE(std::holds_alternative<ProofStep>(parsed[0].result));
  EXPECT_TRUE(std::holds_alternative<UnparseableSentence>(parsed[1].result));
  EXPECT_TRUE(std::holds_alternative<ProofStep>(parsed[2].result));
}

TEST(GrammarProperty, RoundTripOverRandomStatements) {
  const testing::StatementSampler sampler;
  const SentenceParser parser(Lexicon::defaults());
  Rng rng(2024);
  for (int i = 0; i < 2000; ++i) {
    const Statement s = sampler.draw(rng);
    const std::string text = realize(s);
    ASSERT_EQ(parser.parse_sentence(text), s) << text;
  }
}

TEST(GrammarProperty, RealizeIsDeterministic) {
  const testing::StatementSampler sampler;
  Rng a(9), b(9);
  for (int i = 0; i < 500; ++i) EXPECT_EQ(realize(sampler.draw(a)), realize(sampler.draw(b)));
}

TEST(GrammarProperty, ArticleMatchesFollowingWord) {
  const testing::StatementSampler sampler;
  const std::regex article(R"(\b(a|an) ([a-z]))");
  Rng rng(31);
  for (int i = 0; i < 2000; ++i) {
    const std::string text = realize(sampler.draw(rng));
    for (std::sregex_iterator it(text.begin(), text.end(), article), end; it != end; ++it) {
      const bool vowel = std::string("aeiou").find((*it)[2].str()[0]) != std::string::npos;
      EXPECT_EQ((*it)[1].str() == "an", vowel) << text;
    }
  }
}

}  // namespace
}  // namespace cotbench

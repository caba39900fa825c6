#include <gtest/gtest.h>

#include "cotbench/generator.hpp"
#include "cotbench/prompt.hpp"

#ifndef COTBENCH_SOURCE_DIR
#error "COTBENCH_SOURCE_DIR must be defined"
#endif

namespace cotbench {
namespace {

const std::filesystem::path kSource{COTBENCH_SOURCE_DIR};

Example ie(const char* name, const char* noun_stem, const char* adjective, Determiner det, bool negated = false) {
  RoleAssignment r;
  r.name = EntityName{name};
  r.concepts = {Concept{noun_stem}, Concept{"wumpus"}, Concept{"dumpus"}};
  r.adjective = Adjective{adjective};
  r.negated = negated;
  r.determiners = {det, det};
  return instantiate_example(DeductionRule::ImplicationElimination, r);
}

Example wren_test() { return ie("Wren", "sterpus", "transparent", Determiner::BarePlural); }

TEST(QuestionBlock, Layout) {
  const Example e = ie("Alex", "impus", "floral", Determiner::Every, true);
  EXPECT_EQ(premises_text(e), "Every impus is not floral. Alex is an impus");
  EXPECT_EQ(question_block(e), "Q: Every impus is not floral. Alex is an impus. Prove: Alex is not floral.\nA: ");
  EXPECT_EQ(exemplar_block(e), question_block(e) + "Alex is an impus. Every impus is not floral. Alex is not floral.");
}

TEST(BuildProntoqa, EndsWithTestBlock) {
  const std::vector<Example> shots = {ie("Alex", "impus", "floral", Determiner::Every, true)};
  const std::string prompt = build_prontoqa_prompt(shots, wren_test());
  EXPECT_TRUE(prompt.ends_with("\n\nQ: Sterpuses are transparent. Wren is a sterpus. Prove: Wren is transparent.\nA: "));
}

TEST(BuildProntoqa, ZeroShotIsJustTheTestBlock) {
  EXPECT_EQ(build_prontoqa_prompt({}, wren_test()),
            "Q: Sterpuses are transparent. Wren is a sterpus. Prove: Wren is transparent.\nA: ");
}

TEST(BuildProntoqa, RejectsTestAmongExemplars) {
  const std::vector<Example> shots = {wren_test()};
  EXPECT_THROW(build_prontoqa_prompt(shots, wren_test()), std::invalid_argument);
}

TEST(PromptProperty, DecomposesIntoShotsPlusOneBlocks) {
  const SentenceParser parser(Lexicon::defaults());
  for (const auto rule : kAllRules) {
    GenSpec spec;
    spec.rule = rule;
    spec.count = 9;
    const auto data = generate_dataset(spec);
    const std::vector<Example> shots(data.begin(), data.end() - 1);
    const Example& test = data.back();
    const std::string prompt = build_prontoqa_prompt(shots, test);
    const auto blocks = split_prompt_blocks(prompt);
    ASSERT_EQ(blocks.size(), shots.size() + 1) << rule_name(rule);
    const ParsedQuestion q = parse_question_block(blocks.back(), parser);
    EXPECT_EQ(q.premises, test.premises);
    EXPECT_EQ(q.conclusion, test.conclusion);
    EXPECT_EQ(build_prontoqa_prompt(shots, test), prompt);
  }
}

TEST(ParseQuestionBlock, RejectsMalformedBlocks) {
  const SentenceParser parser(Lexicon::defaults());
  EXPECT_THROW(parse_question_block("Alex is an impus. Prove: Alex is an impus.\nA: ", parser), std::invalid_argument);
  EXPECT_ANY_THROW(parse_question_block("Q: Alex is an impus.\nA: ", parser));
}

std::vector<McqChoice> five(const char* a, const char* b, const char* c, const char* d, const char* e) {
  return {{'A', a}, {'B', b}, {'C', c}, {'D', d}, {'E', e}};
}

TEST(McqQuestion, Invariants) {
  EXPECT_NO_THROW(McqQuestion("q", "stem", five("1", "2", "3", "4", "5"), 'C'));
  std::vector<McqChoice> four = {{'A', "1"}, {'B', "2"}, {'C', "3"}, {'D', "4"}};
  EXPECT_THROW(McqQuestion("q", "stem", four, 'A'), std::invalid_argument);
  auto bad_order = five("1", "2", "3", "4", "5");
  std::swap(bad_order[0].label, bad_order[1].label);
  EXPECT_THROW(McqQuestion("q", "stem", bad_order, 'A'), std::invalid_argument);
  EXPECT_THROW(McqQuestion("q", "stem", five("1", "2", "3", "4", "5"), 'F'), std::invalid_argument);
}

TEST(BuildCsqa, Layout) {
  const McqQuestion q("q1", "S", five("c1", "c2", "c3", "c4", "c5"), 'A');
  EXPECT_EQ(build_csqa_prompt("EX", q), "EX\n Q: S Answer Choices: (a) c1\n(b) c2\n(c) c3\n(d) c4\n(e) c5\n");
  const McqQuestion empty("q2", "", five("c1", "c2", "c3", "c4", "c5"), 'A');
  EXPECT_EQ(build_csqa_prompt("EX", empty), "EX\n Q:  Answer Choices: (a) c1\n(b) c2\n(c) c3\n(d) c4\n(e) c5\n");
}

TEST(CsqaLoader, ParsesPublicRecordLayout) {
  const auto j = nlohmann::json::parse(
      R"({"answerKey":"B","id":"abc","question":{"question_concept":"x","choices":[)"
      R"({"label":"A","text":"one"},{"label":"B","text":"two"},{"label":"C","text":"three"},)"
      R"({"label":"D","text":"four"},{"label":"E","text":"five"}],"stem":"Which?"}})");
  const McqQuestion q = parse_csqa_record(j);
  EXPECT_EQ(q.id(), "abc");
  EXPECT_EQ(q.stem(), "Which?");
  EXPECT_EQ(q.answer_key(), 'B');
  EXPECT_EQ(q.choices()[4].text, "five");
  EXPECT_ANY_THROW(parse_csqa_record(nlohmann::json::parse(R"({"id":"abc"})")));
}

TEST(CsqaLoader, FixtureHasFiftyQuestions) {
  const auto qs = load_csqa(kSource / "tests/fixtures/csqa_50.jsonl");
  EXPECT_EQ(qs.size(), 50u);
}

TEST(CsqaExemplars, AssetHasSevenExemplars) {
  const std::string block = read_text_file(kSource / "data/csqa_cot_exemplars.txt");
  std::size_t count = 0;
  for (std::size_t pos = block.find("So the answer is ("); pos != std::string::npos;
       pos = block.find("So the answer is (", pos + 1)) {
    ++count;
  }
  EXPECT_EQ(count, 7u);
  EXPECT_TRUE(block.starts_with("Q: "));
  EXPECT_FALSE(block.ends_with("\n"));
  EXPECT_NE(block.find("\n A: "), std::string::npos);
}

}  // namespace
}  // namespace cotbench

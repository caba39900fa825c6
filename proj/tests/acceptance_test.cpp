// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>

#include "cotbench/attention.hpp"
#include "cotbench/generator.hpp"
#include "cotbench/harness.hpp"
#include "support/attention_reference.hpp"
#include "support/random_statements.hpp"

#ifndef COTBENCH_SOURCE_DIR
#error "COTBENCH_SOURCE_DIR must be defined"
#endif

namespace fs = std::filesystem;
using namespace cotbench;

namespace {

const fs::path kSource{COTBENCH_SOURCE_DIR};

constexpr std::uint64_t kSeed = 42;
constexpr std::size_t kQuestionsPerRule = 100;
constexpr std::size_t kShots = 8;
constexpr double kMaxClosureSeconds = 10.0;
constexpr std::size_t kRoundTrips = 10000;
constexpr double kScoreTolerance = 1e-9;
constexpr int kRandomMatrices = 100;
constexpr std::size_t kMatrixSize = 8;
constexpr std::size_t kCsqaFixtureSize = 50;
constexpr std::string_view kTestBlock =
    "Q: Sterpuses are transparent. Wren is a sterpus. Prove: Wren is transparent.\nA: ";

struct CriterionResult {
  bool pass;
  std::string detail;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<Example> dataset(DeductionRule rule, std::size_t n, std::uint64_t seed) {
  GenSpec spec;
  spec.rule = rule;
  spec.count = n;
  spec.seed = seed;
  return generate_dataset(spec);
}

bool conserved(const Tally& t, std::size_t expected_total) {
  return t.correct + t.incorrect + t.unparseable == t.total() && t.total() == expected_total;
}

CriterionResult gold_oracle_closure() {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = true;
  for (const auto rule : kAllRules) {
    const auto data = dataset(rule, kQuestionsPerRule, kSeed);
    auto gold = make_gold_oracle(data);
    ProntoqaRunConfig cfg;
    cfg.shots = kShots;
    cfg.exemplar_seed = kSeed;
    const auto report = run_prontoqa(data, *gold, cfg);
    const Tally& t = report.per_rule.at(std::string(rule_name(rule)));
    pass &= t.total() == kQuestionsPerRule && t.accuracy() == 1.0;
    detail += std::string(rule_name(rule)) + "=" + fmt("%.2f", t.accuracy()) + " ";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  pass &= secs < kMaxClosureSeconds;
  return {pass, detail + "runtime=" + fmt("%.2fs", secs) + " (limit 10s)"};
}

CriterionResult failure_fidelity() {
  const auto data = dataset(DeductionRule::ImplicationElimination, kQuestionsPerRule, kSeed);
  auto corrupt = make_corrupt_oracle(data, Corruption::RepeatFirstStep);
  ProntoqaRunConfig cfg;
  cfg.shots = kShots;
  const auto report = run_prontoqa(data, *corrupt, cfg);
  std::size_t at_step_three = 0;
  for (const auto& q : report.questions) {
    if (q.verdict && q.verdict->first_divergence && q.verdict->first_divergence->paragraph == 1 &&
        q.verdict->first_divergence->step == 3) {
      ++at_step_three;
    }
  }
  const double acc = report.per_rule.at("implication_elimination").accuracy();
  return {acc == 0.0 && at_step_three == data.size(),
          "accuracy=" + fmt("%.2f", acc) + " divergence_at_step_3=" + std::to_string(at_step_three) + "/" +
              std::to_string(data.size())};
}

CriterionResult round_trip() {
  const testing::StatementSampler sampler;
  const SentenceParser parser(Lexicon::defaults());
  Rng rng(kSeed);
  std::size_t failures = 0;
  std::string first_failure;
  for (std::size_t i = 0; i < kRoundTrips; ++i) {
    const Statement s = sampler.draw(rng);
    const std::string text = realize(s);
    bool ok = false;
    try {
      ok = parser.parse_sentence(text) == s;
    } catch (const UnparseableSentence&) {
    }
    if (!ok && failures++ == 0) first_failure = text;
  }
  return {failures == 0, std::to_string(kRoundTrips) + " statements, failures=" + std::to_string(failures) +
                             (first_failure.empty() ? "" : " first='" + first_failure + "'")};
}

CriterionResult corpus_arithmetic() {
  const CorpusSpec spec;
  const Corpus corpus = emit_corpus(spec);
  const std::size_t total = corpus.train.size() + corpus.validation.size();
  const fs::path base = fs::temp_directory_path() / "cotbench_acceptance_corpus";
  fs::remove_all(base);
  write_corpus(corpus, base / "a");
  write_corpus(emit_corpus(spec), base / "b");
  bool identical = true;
  for (const char* f : {"train.jsonl", "validation.jsonl", "manifest.json"}) {
    identical &= slurp(base / "a" / f) == slurp(base / "b" / f);
  }
  fs::remove_all(base);
  return {total == 1800 && corpus.train.size() == 1620 && corpus.validation.size() == 180 && identical,
          "records=" + std::to_string(total) + " split=" + std::to_string(corpus.train.size()) + "/" +
              std::to_string(corpus.validation.size()) + " byte_identical=" + (identical ? "yes" : "no")};
}

CriterionResult scoring_oracle() {
  Rng rng(kSeed);
  double worst = 0.0;
  for (int trial = 0; trial < kRandomMatrices; ++trial) {
    std::vector<std::vector<double>> a(kMatrixSize, std::vector<double>(kMatrixSize, 0.0));
    for (std::size_t j = 0; j < kMatrixSize; ++j) {
      double total = 0.0;
      for (std::size_t i = 0; i <= j; ++i) total += a[j][i] = static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
      for (std::size_t i = 0; i <= j; ++i) a[j][i] /= total;
    }
    const auto got = token_scores(a, true);
    const auto want = testing::reference_token_scores(a, true);
    for (std::size_t i = 0; i < kMatrixSize; ++i) {
      worst = std::max({worst, std::abs(got.g[i] - want.g[i]), std::abs(got.p[i] - want.p[i]),
                        std::abs(got.s[i] - want.s[i]), std::abs(got.s_norm[i] - want.s_norm[i])});
    }
  }
  const auto id = token_scores(std::vector<std::vector<double>>{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, true);
  const bool identity = id.g == std::vector<double>{0, 1, 1} && id.s_norm == std::vector<double>{0, 1, 1};
  return {worst <= kScoreTolerance && identity,
          "max_abs_diff=" + fmt("%.3g", worst) + " (tol 1e-9) identity_exact=" + (identity ? "yes" : "no")};
}

CriterionResult csqa_protocol() {
  const auto questions = load_csqa(kSource / "tests/fixtures/csqa_50.jsonl");
  const std::string exemplars = read_text_file(kSource / "data/csqa_cot_exemplars.txt");
  std::map<std::string, std::string> answers, silence;
  for (const auto& q : questions) {
    answers[q.id()] = "So the answer is (" + std::string(1, static_cast<char>(std::tolower(q.answer_key()))) + ").";
    silence[q.id()] = "";
  }
  ScriptedBackend echoing(answers, true);
  ScriptedBackend empty(silence);
  const Tally good = *run_csqa(questions, echoing, exemplars, {}).csqa;
  const Tally none = *run_csqa(questions, empty, exemplars, {}).csqa;
  return {questions.size() == kCsqaFixtureSize && good.accuracy() == 1.0 && good.unparseable == 0 &&
              none.unparseable == kCsqaFixtureSize,
          "scripted accuracy=" + fmt("%.2f", good.accuracy()) + " unparseable=" + std::to_string(good.unparseable) +
              "; empty-output unparseable=" + std::to_string(none.unparseable) + "/" +
              std::to_string(questions.size())};
}

Example ie_example(const char* name, const char* noun_stem, const char* adjective, Determiner det, bool negated) {
  RoleAssignment r;
  r.name = EntityName{name};
  r.concepts = {Concept{noun_stem}, Concept{"wumpus"}, Concept{"dumpus"}};
  r.adjective = Adjective{adjective};
  r.negated = negated;
  r.determiners = {det, det};
  return instantiate_example(DeductionRule::ImplicationElimination, r);
}

CriterionResult golden_prompts() {
  const std::vector<Example> ie_shots = {
      ie_example("Alex", "impus", "floral", Determiner::Every, true),
      ie_example("Max", "rompus", "loud", Determiner::Each, false),
      [] {
        RoleAssignment r;
        r.name = EntityName{"Fae"};
        r.concepts = {Concept{"yumpus"}, Concept{"wumpus"}, Concept{"dumpus"}};
        r.adjective_consequent = false;
        r.determiners = {Determiner::BarePlural, Determiner::BarePlural};
        return instantiate_example(DeductionRule::ImplicationElimination, r);
      }(),
  };
  const Example wren = ie_example("Wren", "sterpus", "transparent", Determiner::BarePlural, false);
  const std::string ie_prompt = build_prontoqa_prompt(ie_shots, wren);

  RoleAssignment pbc_roles;
  pbc_roles.name = EntityName{"Wren"};
  pbc_roles.concepts = {Concept{"sterpus"}, Concept{"impus"}, Concept{"wumpus"}};
  RoleAssignment de_roles;
  de_roles.concepts = {Concept{"sterpus"}, Concept{"impus"}, Concept{"wumpus"}};
  de_roles.determiners = {Determiner::BarePlural, Determiner::Every};
  const std::vector<Example> pbc_shot = {instantiate_example(DeductionRule::ProofByContradiction, pbc_roles)};
  const std::string pbc_prompt =
      build_prontoqa_prompt(pbc_shot, instantiate_example(DeductionRule::DisjunctionElimination, de_roles));

  const McqQuestion jellyfish("golden", "Where would you find a jellyfish that has not been captured?",
                              {{'A', "ocean water"}, {'B', "store"}, {'C', "tank"}, {'D', "internet"}, {'E', "aquarium"}},
                              'A');
  const std::string csqa_prompt =
      build_csqa_prompt(read_text_file(kSource / "data/csqa_cot_exemplars.txt"), jellyfish);

  const bool ie_ok = ie_prompt == slurp(kSource / "tests/golden/prontoqa_ie_3shot.txt");
  const bool pbc_ok = pbc_prompt == slurp(kSource / "tests/golden/prontoqa_pbc_1shot.txt");
  const bool csqa_ok = csqa_prompt == slurp(kSource / "tests/golden/csqa_prompt.txt");
  const bool suffix_ok = ie_prompt.ends_with(kTestBlock);
  auto yn = [](bool b) { return b ? "match" : "DIFF"; };
  return {ie_ok && pbc_ok && csqa_ok && suffix_ok,
          std::string("prontoqa_ie_3shot=") + yn(ie_ok) + " prontoqa_pbc_1shot=" + yn(pbc_ok) +
              " csqa_prompt=" + yn(csqa_ok) + " test_block_suffix=" + yn(suffix_ok)};
}

class RandomBackend : public ModelBackend {
 public:
  RandomBackend(std::map<std::string, std::string> good, std::uint64_t seed) : good_(std::move(good)), rng_(seed) {}
  std::string complete(const CompletionRequest& r) override {
    std::lock_guard lock(mu_);
    switch (rng_.below(6)) {
      case 0: return good_.at(r.id);
      case 1: return r.prompt + good_.at(r.id) + "\n\nQ: ";
      case 2: return "";
      case 3: return "So the answer is (z). Wren is glorpy.";
      case 4: throw BackendTimeout("simulated");
      default: return "So the answer is (a).";
    }
  }
  std::string name() const override { return "random"; }

 private:
  std::map<std::string, std::string> good_;
  std::mutex mu_;
  Rng rng_;
};

CriterionResult report_conservation() {
  std::size_t runs = 0;
  bool pass = true;
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    const DeductionRule rule = kAllRules[seed % 6];
    const auto data = dataset(rule, 20, seed);
    std::map<std::string, std::string> gold;
    for (const auto& e : data) gold[e.id] = realize_chain(e.gold);
    RandomBackend backend(gold, seed);
    ProntoqaRunConfig cfg;
    cfg.shots = 1 + seed % 8;
    cfg.concurrency = 1 + seed % 5;
    cfg.mode = seed % 2 ? CheckMode::Valid : CheckMode::Strict;
    const auto report = run_prontoqa(data, backend, cfg);
    pass &= conserved(report.per_rule.at(std::string(rule_name(rule))), data.size());
    pass &= conserved(report.overall(), data.size());
    ++runs;
  }
  const auto questions = load_csqa(kSource / "tests/fixtures/csqa_50.jsonl");
  const std::string exemplars = read_text_file(kSource / "data/csqa_cot_exemplars.txt");
  const auto gold = csqa_gold_replies(questions);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    RandomBackend backend(gold, seed);
    CsqaRunConfig cfg;
    cfg.concurrency = 1 + seed % 4;
    const auto report = run_csqa(questions, backend, exemplars, cfg);
    pass &= conserved(*report.csqa, questions.size()) && conserved(report.overall(), questions.size());
    ++runs;
  }
  return {pass, std::to_string(runs) + " randomized runs, correct+incorrect+unparseable==total on every tally"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<CriterionResult()>>> criteria = {
      {"gold-oracle closure", gold_oracle_closure},
      {"failure fidelity", failure_fidelity},
      {"round trip", round_trip},
      {"corpus arithmetic", corpus_arithmetic},
      {"scoring oracle", scoring_oracle},
      {"csqa protocol", csqa_protocol},
      {"prompt golden files", golden_prompts},
      {"report conservation", report_conservation},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    CriterionResult o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %-22s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

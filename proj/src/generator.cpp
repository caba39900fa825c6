#include "cotbench/generator.hpp"

#include <fstream>
#include <numeric>
#include <set>

#include "cotbench/prompt.hpp"

namespace cotbench {
namespace {

Complement noun(const Concept& c) { return Complement::noun(c); }

std::string question_key(const Example& e) {
  std::string key;
  for (const auto& p : e.premises) key += realize(p) + "|";
  return key + realize(e.conclusion);
}

}  // namespace

Example instantiate_example(DeductionRule rule, const RoleAssignment& r) {
  const auto& [c0, c1, c2] = r.concepts;
  if (c0 == c1 || c0 == c2 || c1 == c2) throw std::invalid_argument("role concepts must be distinct");
  const EntityName& name = r.name;

  switch (rule) {
    case DeductionRule::ImplicationElimination: {
      Complement consequent = r.adjective_consequent ? Complement::adj(r.adjective) : noun(c1);
      Statement universal = quantified_is(r.determiners[0], c0, consequent, r.negated);
      Statement fact = named_is(name, noun(c0));
      Statement conclusion = named_is(name, consequent, r.negated);
      return Example{"", rule, {universal, fact}, conclusion,
                     ProofChain({{ProofStep::plain(fact), ProofStep::plain(universal),
                                  ProofStep::plain(conclusion)}})};
    }
    case DeductionRule::ConjunctionIntroduction: {
      Statement adj_fact = named_is(name, Complement::adj(r.adjective));
      Statement noun_fact = named_is(name, noun(c0));
      Statement conclusion = named_is(name, Complement::adj_noun(r.adjective, c0));
      std::vector<Statement> premises = {adj_fact, noun_fact};
      if (r.swap_premises) std::swap(premises[0], premises[1]);
      return Example{"", rule, std::move(premises), conclusion,
                     ProofChain({{ProofStep::plain(noun_fact), ProofStep::plain(adj_fact),
                                  ProofStep::plain(conclusion)}})};
    }
    case DeductionRule::ConjunctionElimination: {
      Statement premise = named_is(name, Complement::adj_noun(r.adjective, c0));
      Statement conclusion = named_is(name, noun(c0));
      return Example{"", rule, {premise}, conclusion,
                     ProofChain({{ProofStep::plain(premise), ProofStep::plain(conclusion)}})};
    }
    case DeductionRule::DisjunctionIntroduction: {
      Statement premise = named_is(name, noun(c0));
      Statement conclusion =
          named_is(name, Complement::either(Complement::adj(r.adjective), noun(c0)));
      return Example{"", rule, {premise}, conclusion,
                     ProofChain({{ProofStep::plain(premise), ProofStep::plain(conclusion)}})};
    }
    case DeductionRule::DisjunctionElimination: {
      Statement first = quantified_is(r.determiners[0], c0, noun(c2));
      Statement second = quantified_is(r.determiners[1], c1, noun(c2));
      Statement cases = named_is(name, Complement::either(noun(c0), noun(c1)));
      Statement conclusion = named_is(name, noun(c2));
      return Example{
          "", rule, {first, second, cases}, conclusion,
          ProofChain({
              {ProofStep::assume(named_is(name, noun(c0))), ProofStep::plain(first),
               ProofStep::plain(conclusion)},
              {ProofStep::assume(named_is(name, noun(c1))), ProofStep::plain(second),
               ProofStep::plain(conclusion)},
              {ProofStep::since(cases, conclusion)},
          })};
    }
    case DeductionRule::ProofByContradiction: {
      const Complement either = Complement::either(noun(c0), noun(c1));
      Statement universal(EverythingSubject{either}, false, noun(c2));
      Statement denial = named_is(name, noun(c2), true);
      Statement not_first = named_is(name, noun(c0), true);
      Statement not_second = named_is(name, noun(c1), true);
      Statement conclusion = not_first.with_conjunct(not_second);
      auto refute = [&](const Statement& negated_case) {
        return Paragraph{
            ProofStep::assume(negated_case.negation()),
            ProofStep::plain(named_is(name, either)),
            ProofStep::plain(universal),
            ProofStep::plain(denial.negation()),
            ProofStep::contradicts(denial),
            ProofStep::plain(negated_case),
        };
      };
      return Example{"", rule, {universal, denial}, conclusion,
                     ProofChain({refute(not_first), refute(not_second),
                                 {ProofStep::plain(conclusion)}})};
    }
  }
  throw std::logic_error("unreachable");
}

RoleAssignment sample_roles(Rng& rng, const Lexicon& lexicon) {
  if (lexicon.concepts.size() < 3 || lexicon.adjectives.empty() || lexicon.names.empty()) {
    throw LexiconTooSmall("lexicon needs at least 3 concepts, 1 adjective and 1 name (has " +
                          std::to_string(lexicon.concepts.size()) + ", " +
                          std::to_string(lexicon.adjectives.size()) + ", " +
                          std::to_string(lexicon.names.size()) + ")");
  }
  std::vector<std::size_t> idx(lexicon.concepts.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < 3; ++i) std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);

  RoleAssignment r;
  r.name = EntityName{lexicon.names[rng.below(lexicon.names.size())]};
  r.concepts = {Concept{lexicon.concepts[idx[0]]}, Concept{lexicon.concepts[idx[1]]},
                Concept{lexicon.concepts[idx[2]]}};
  r.adjective = Adjective{lexicon.adjectives[rng.below(lexicon.adjectives.size())]};
  r.negated = rng.coin();
  r.adjective_consequent = rng.coin();
  r.determiners = {static_cast<Determiner>(rng.below(3)), static_cast<Determiner>(rng.below(3))};
  r.swap_premises = rng.coin();
  return r;
}

Example generate_example(DeductionRule rule, Rng& rng, const Lexicon& lexicon) {
  return instantiate_example(rule, sample_roles(rng, lexicon));
}

std::vector<Example> generate_dataset(const GenSpec& spec) {
  if (spec.count == 0) throw std::invalid_argument("GenSpec.count must be at least 1");
  spec.lexicon.validate();
  Rng rng(spec.seed);
  std::vector<Example> out;
  std::set<std::string> seen;
  const std::size_t max_attempts = spec.count * 100 + 1000;
  for (std::size_t attempt = 0; out.size() < spec.count; ++attempt) {
    if (attempt == max_attempts) {
      throw LexiconTooSmall("could only generate " + std::to_string(out.size()) + " distinct " +
                            std::string(rule_name(spec.rule)) + " examples out of " +
                            std::to_string(spec.count) + " requested");
    }
    Example e = generate_example(spec.rule, rng, spec.lexicon);
    if (spec.shuffle_premises) rng.shuffle(e.premises);
    if (!seen.insert(question_key(e)).second) continue;
    e.id = std::string(rule_name(spec.rule)) + "-" + std::to_string(out.size());
    out.push_back(std::move(e));
  }
  return out;
}

nlohmann::ordered_json example_to_json(const Example& example, const RealizationConfig& config) {
  nlohmann::ordered_json j;
  j["id"] = example.id;
  j["rule"] = rule_name(example.rule);
  j["premises"] = nlohmann::ordered_json::array();
  for (const auto& p : example.premises) j["premises"].push_back(realize(p, config));
  j["conclusion"] = realize(example.conclusion, config);
  j["gold"] = realize_chain(example.gold, config);
  return j;
}

Example example_from_json(const nlohmann::json& record, const SentenceParser& parser) {
  std::vector<Statement> premises;
  for (const auto& p : record.at("premises")) premises.push_back(parser.parse_sentence(p.get<std::string>()));

  std::vector<Paragraph> paragraphs;
  for (auto& step : parse_chain_text(record.at("gold").get<std::string>(), parser)) {
    if (auto* err = std::get_if<UnparseableSentence>(&step.result)) throw *err;
    if (paragraphs.size() <= step.sentence.paragraph) paragraphs.resize(step.sentence.paragraph + 1);
    paragraphs[step.sentence.paragraph].push_back(std::get<ProofStep>(std::move(step.result)));
  }
  Example e{record.at("id").get<std::string>(), parse_rule(record.at("rule").get<std::string>()),
            std::move(premises), parser.parse_sentence(record.at("conclusion").get<std::string>()),
            ProofChain(std::move(paragraphs))};
  validate_shape(e);
  return e;
}

std::string dataset_to_jsonl(const std::vector<Example>& examples, const RealizationConfig& config) {
  std::string out;
  for (const auto& e : examples) {
    out += example_to_json(e, config).dump();
    out += '\n';
  }
  return out;
}

void write_dataset(const std::filesystem::path& path, const std::vector<Example>& examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << dataset_to_jsonl(examples);
}

std::vector<Example> read_dataset(const std::filesystem::path& path, const SentenceParser& parser) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<Example> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(example_from_json(nlohmann::json::parse(line), parser));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void CorpusSpec::validate() const {
  if (exemplars_per_question < 1) throw std::invalid_argument("exemplars_per_question must be >= 1");
  if (questions_per_rule < 1) throw std::invalid_argument("questions_per_rule must be >= 1");
  if (split_numerator == 0 || split_numerator >= split_denominator) {
    throw std::invalid_argument("split fraction must lie strictly between 0 and 1");
  }
}

std::size_t CorpusSpec::train_size() const {
  const std::uint64_t n = total();
  return static_cast<std::size_t>((2 * split_numerator * n + split_denominator) /
                                  (2 * split_denominator));
}

namespace {

nlohmann::ordered_json record_json(const CorpusRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["rule"] = rule_name(r.rule);
  j["text"] = r.text;
  return j;
}

}  // namespace

Corpus emit_corpus(const CorpusSpec& spec) {
  spec.validate();
  std::vector<CorpusRecord> records;
  records.reserve(spec.total());
  const std::size_t per_rule = spec.questions_per_rule * spec.exemplars_per_question;
  for (std::size_t r = 0; r < std::size(kAllRules); ++r) {
    const DeductionRule rule = kAllRules[r];
    const auto examples =
        generate_dataset({rule, per_rule, Rng::derive(spec.seed, r), spec.lexicon, false});
    for (std::size_t i = 0; i < examples.size(); ++i) {
      const std::size_t q = i / spec.exemplars_per_question;
      const std::size_t k = i % spec.exemplars_per_question;
      records.push_back({std::string(rule_name(rule)) + "-q" + std::to_string(q) + "-e" +
                             std::to_string(k),
                         rule, exemplar_block(examples[i])});
    }
  }
  Rng shuffler(Rng::derive(spec.seed, std::size(kAllRules)));
  shuffler.shuffle(records);

  Corpus corpus;
  const std::size_t n_train = spec.train_size();
  corpus.train.assign(records.begin(), records.begin() + static_cast<std::ptrdiff_t>(n_train));
  corpus.validation.assign(records.begin() + static_cast<std::ptrdiff_t>(n_train), records.end());

  auto& m = corpus.manifest;
  m["seed"] = spec.seed;
  m["rng"] = "mt19937_64; bounded draws by rejection, Fisher-Yates shuffle, SplitMix64 stream derivation";
  m["lexicon"] = {{"concepts", spec.lexicon.concepts},
                  {"adjectives", spec.lexicon.adjectives},
                  {"names", spec.lexicon.names}};
  m["counts"] = {{"rules", std::size(kAllRules)},
                 {"questions_per_rule", spec.questions_per_rule},
                 {"exemplars_per_question", spec.exemplars_per_question},
                 {"total", records.size()}};
  m["split"] = {{"fraction", std::to_string(spec.split_numerator) + "/" +
                                 std::to_string(spec.split_denominator)},
                {"train", corpus.train.size()},
                {"validation", corpus.validation.size()}};
  m["hyperparameters"] = {
      {"objective", "causal_lm"},
      {"optimizer", "Adam"},
      {"weight_decay", 0.01},
      {"beta1", 0.9},
      {"beta2", 0.999},
      {"epsilon", 1e-8},
      {"epochs", 100},
      {"batch_size", 1000},
      {"learning_rate", 2e-5},
      {"block_tokens", 1024},
      {"model_selection", "lowest validation loss over all epochs"},
  };
  m["packing"] = "records are untokenized; concatenation into 1024-token blocks is done with the "
                 "target model's tokenizer";
  m["deviations"] = nlohmann::ordered_json::array(
      {"proof_by_contradiction gold: the second sentence of each refutation paragraph is the "
       "disjunction '<name> is a X or a Y' (the step that licenses the universal premise), not "
       "the un-negated conjunction"});
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write_records = [&](const std::string& file, const std::vector<CorpusRecord>& records) {
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / file).string());
    for (const auto& r : records) out << record_json(r).dump() << '\n';
  };
  write_records("train.jsonl", corpus.train);
  write_records("validation.jsonl", corpus.validation);
  std::ofstream manifest(dir / "manifest.json", std::ios::binary);
  if (!manifest) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  manifest << corpus.manifest.dump(2) << '\n';
}

}  // namespace cotbench

#include "cotbench/harness.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "cotbench/generator.hpp"
#include "cotbench/random.hpp"

namespace cotbench {

std::string_view outcome_name(Outcome outcome) {
  switch (outcome) {
    case Outcome::Correct: return "correct";
    case Outcome::Incorrect: return "incorrect";
    case Outcome::Unparseable: return "unparseable";
  }
  return "unknown";
}

void Tally::add(Outcome o) {
  switch (o) {
    case Outcome::Correct: ++correct; break;
    case Outcome::Incorrect: ++incorrect; break;
    case Outcome::Unparseable: ++unparseable; break;
  }
}

Tally EvalReport::overall() const {
  Tally t;
  for (const auto& q : questions) t.add(q.outcome);
  return t;
}

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Runs task(i) for i in [0, n) on at most `limit` threads. Results are written
// by index, so callers see dataset order whatever the scheduling.
template <class Task>
void for_each_bounded(std::size_t n, std::size_t limit, Task task) {
  const std::size_t workers = std::min(n, std::max<std::size_t>(1, limit));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<Example> exemplars_for(const Example& test, std::size_t question_index,
                                   const ProntoqaRunConfig& config) {
  Rng rng(Rng::derive(config.exemplar_seed, question_index));
  std::vector<Example> out;
  const std::size_t max_attempts = 100 * (config.shots + 1);
  for (std::size_t attempt = 0; out.size() < config.shots; ++attempt) {
    if (attempt == max_attempts) {
      throw ConfigurationError("cannot draw " + std::to_string(config.shots) +
                               " distinct exemplars for " + test.id + " from the lexicon");
    }
    Example e = generate_example(test.rule, rng, config.lexicon);
    if (same_question(e, test)) continue;
    if (std::any_of(out.begin(), out.end(), [&](const Example& x) { return same_question(x, e); })) {
      continue;
    }
    e.id = test.id + "-exemplar-" + std::to_string(out.size());
    out.push_back(std::move(e));
  }
  return out;
}

EvalReport run_prontoqa(std::span<const Example> dataset, ModelBackend& backend,
                        const ProntoqaRunConfig& config) {
  if (dataset.empty()) throw ConfigurationError("dataset is empty");
  if (config.concurrency == 0) throw ConfigurationError("concurrency must be at least 1");
  const SentenceParser parser(config.lexicon);

  EvalReport report;
  report.meta.task = "prontoqa";
  report.meta.backend = backend.name();
  report.meta.shots = config.shots;
  report.meta.mode = std::string(mode_name(config.mode));
  report.meta.seed = config.exemplar_seed;
  report.meta.concurrency = config.concurrency;
  report.meta.decode = config.decode;
  report.meta.max_tokens_rule = "fixed";
  report.meta.started_at = utc_now();

  report.questions.resize(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto exemplars = exemplars_for(dataset[i], i, config);
    auto& q = report.questions[i];
    q.id = dataset[i].id;
    q.task = std::string(rule_name(dataset[i].rule));
    q.prompt = build_prontoqa_prompt(exemplars, dataset[i]);
  }

  for_each_bounded(dataset.size(), config.concurrency, [&](std::size_t i) {
    auto& q = report.questions[i];
    try {
      q.raw_output = complete(backend, {q.id, q.prompt, config.decode});
    } catch (const BackendError& e) {
      q.error = e.what();
      q.outcome = Outcome::Unparseable;
      return;
    }
    q.extracted = extract_cot(q.raw_output, q.prompt);
    q.verdict = check(config.mode, q.extracted, dataset[i], parser);
    if (q.extracted.empty() || !q.verdict->parse_failures.empty()) {
      q.outcome = Outcome::Unparseable;
    } else {
      q.outcome = q.verdict->correct ? Outcome::Correct : Outcome::Incorrect;
    }
  });

  for (const auto& q : report.questions) report.per_rule[q.task].add(q.outcome);
  report.meta.repetition_penalty_honored = backend.repetition_penalty_honored();
  report.meta.finished_at = utc_now();
  return report;
}

EvalReport run_csqa(std::span<const McqQuestion> questions, ModelBackend& backend,
                    std::string_view exemplar_block, const CsqaRunConfig& config) {
  if (questions.empty()) throw ConfigurationError("no questions to run");
  if (config.concurrency == 0) throw ConfigurationError("concurrency must be at least 1");

  EvalReport report;
  report.meta.task = "csqa";
  report.meta.backend = backend.name();
  report.meta.shots = 7;
  report.meta.concurrency = config.concurrency;
  report.meta.decode = DecodeConfig::csqa(0);
  report.meta.max_tokens_rule = config.max_new_tokens
                                    ? "fixed override"
                                    : "input tokens + 100, input tokens approximated as ceil(bytes/4)";
  report.meta.started_at = utc_now();

  report.questions.resize(questions.size());
  std::vector<DecodeConfig> decode(questions.size());
  for (std::size_t i = 0; i < questions.size(); ++i) {
    auto& q = report.questions[i];
    q.id = questions[i].id();
    q.task = "csqa";
    q.prompt = build_csqa_prompt(exemplar_block, questions[i]);
    decode[i] = config.max_new_tokens ? DecodeConfig{*config.max_new_tokens, true, 0.0001}
                                      : DecodeConfig::csqa(approximate_token_count(q.prompt));
  }

  for_each_bounded(questions.size(), config.concurrency, [&](std::size_t i) {
    auto& q = report.questions[i];
    try {
      q.raw_output = complete(backend, {q.id, q.prompt, decode[i]});
    } catch (const BackendError& e) {
      q.error = e.what();
      q.outcome = Outcome::Unparseable;
      return;
    }
    const McqOutcome m = extract_csqa(q.raw_output, q.prompt, questions[i].answer_key());
    q.answer = m.extracted;
    q.extracted = m.extracted ? std::string(1, *m.extracted) : std::string();
    switch (m.verdict) {
      case McqVerdict::Correct: q.outcome = Outcome::Correct; break;
      case McqVerdict::Incorrect: q.outcome = Outcome::Incorrect; break;
      case McqVerdict::NoAnswer: q.outcome = Outcome::Unparseable; break;
    }
  });

  report.csqa = Tally{};
  for (const auto& q : report.questions) report.csqa->add(q.outcome);
  report.meta.repetition_penalty_honored = backend.repetition_penalty_honored();
  report.meta.finished_at = utc_now();
  return report;
}

std::map<std::string, std::string> csqa_gold_replies(std::span<const McqQuestion> questions) {
  std::map<std::string, std::string> out;
  for (const auto& q : questions) {
    const char key = static_cast<char>(std::tolower(static_cast<unsigned char>(q.answer_key())));
    out[q.id()] = std::string("A: The answer is choice ") + key + ". " +
                  std::string(kCsqaAnswerMarker) + key + ").";
  }
  return out;
}

namespace {

nlohmann::ordered_json tally_json(const Tally& t) {
  return {{"correct", t.correct},
          {"incorrect", t.incorrect},
          {"unparseable", t.unparseable},
          {"total", t.total()},
          {"accuracy", t.accuracy()}};
}

nlohmann::ordered_json verdict_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["correct"] = v.correct;
  j["mode"] = mode_name(v.mode);
  if (v.first_divergence) {
    const auto& d = *v.first_divergence;
    j["first_divergence"] = {{"paragraph", d.paragraph},
                             {"step", d.step},
                             {"expected", d.expected},
                             {"got", d.got}};
  } else {
    j["first_divergence"] = nullptr;
  }
  j["parse_failures"] = nlohmann::ordered_json::array();
  for (const auto& f : v.parse_failures) {
    j["parse_failures"].push_back({{"paragraph", f.paragraph},
                                   {"step", f.step},
                                   {"sentence", f.sentence},
                                   {"span", f.span},
                                   {"message", f.message}});
  }
  return j;
}

nlohmann::ordered_json question_verdict_json(const QuestionRecord& q) {
  if (q.verdict) return verdict_json(*q.verdict);
  nlohmann::ordered_json j;
  j["outcome"] = outcome_name(q.outcome);
  if (q.answer) {
    j["answer"] = std::string(1, *q.answer);
  } else {
    j["answer"] = nullptr;
  }
  return j;
}

}  // namespace

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  const auto& m = report.meta;
  j["meta"] = {{"task", m.task},
               {"backend", m.backend},
               {"shots", m.shots},
               {"mode", m.mode},
               {"seed", m.seed},
               {"concurrency", m.concurrency},
               {"decode",
                {{"max_new_tokens", m.decode.max_new_tokens},
                 {"greedy", m.decode.greedy},
                 {"repetition_penalty", m.decode.repetition_penalty},
                 {"max_tokens_rule", m.max_tokens_rule}}},
               {"repetition_penalty_honored", m.repetition_penalty_honored},
               {"started_at", m.started_at},
               {"finished_at", m.finished_at}};
  j["per_rule"] = nlohmann::ordered_json::object();
  for (const auto& [rule, tally] : report.per_rule) j["per_rule"][rule] = tally_json(tally);
  if (report.csqa) j["csqa"] = tally_json(*report.csqa);
  j["overall"] = tally_json(report.overall());
  j["questions"] = nlohmann::ordered_json::array();
  for (const auto& q : report.questions) {
    nlohmann::ordered_json item;
    item["id"] = q.id;
    item["task"] = q.task;
    item["outcome"] = outcome_name(q.outcome);
    item["extracted"] = q.extracted;
    item["verdict"] = question_verdict_json(q);
    if (!q.error.empty()) item["error"] = q.error;
    j["questions"].push_back(std::move(item));
  }
  return j;
}

std::string responses_to_jsonl(const EvalReport& report) {
  std::string out;
  for (const auto& q : report.questions) {
    nlohmann::ordered_json j;
    j["id"] = q.id;
    j["prompt"] = q.prompt;
    j["raw_output"] = q.raw_output;
    j["extracted"] = q.extracted;
    j["verdict"] = question_verdict_json(q);
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_report(const EvalReport& report, const std::filesystem::path& report_path,
                  const std::optional<std::filesystem::path>& responses_path) {
  std::ofstream out(report_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + report_path.string());
  out << report_to_json(report).dump(2) << '\n';
  if (responses_path) {
    std::ofstream resp(*responses_path, std::ios::binary);
    if (!resp) throw std::runtime_error("cannot write " + responses_path->string());
    resp << responses_to_jsonl(report);
  }
}

}  // namespace cotbench

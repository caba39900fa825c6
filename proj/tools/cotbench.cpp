// cotbench: data generation, experiment runs and attention scoring.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cotbench/attention.hpp"
#include "cotbench/backend.hpp"
#include "cotbench/generator.hpp"
#include "cotbench/harness.hpp"
#include "cotbench/prompt.hpp"
#include "json.hpp"

using namespace cotbench;

namespace {

Lexicon load_lexicon(const std::string& path) {
  if (path.empty()) return Lexicon::defaults();
  const auto j = nlohmann::json::parse(read_text_file(path));
  Lexicon lex{j.at("concepts").get<std::vector<std::string>>(),
              j.at("adjectives").get<std::vector<std::string>>(),
              j.at("names").get<std::vector<std::string>>()};
  lex.validate();
  return lex;
}

// Either a JSON object {id: output} or JSON lines {"id": ..., "output": ...}.
std::map<std::string, std::string> load_script(const std::string& path) {
  const std::string text = read_text_file(path);
  std::map<std::string, std::string> out;
  if (nlohmann::json::accept(text)) {
    const auto j = nlohmann::json::parse(text);
    if (j.is_object() && !(j.size() == 2 && j.contains("id") && j.contains("output"))) {
      for (const auto& [k, v] : j.items()) out[k] = v.get<std::string>();
      return out;
    }
  }
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line);
    out[j.at("id").get<std::string>()] = j.at("output").get<std::string>();
  }
  return out;
}

struct BackendFlags {
  std::string kind = "gold";
  std::string endpoint;
  std::string model;
  std::string script;
  std::string corruption = "repeat-first";
  long timeout_ms = 120000;
  std::size_t retries = 3;
  bool no_repetition_penalty = false;
};

void add_backend_flags(CLI::App* cmd, BackendFlags& f) {
  cmd->add_option("--backend", f.kind, "Completion backend")
      ->check(CLI::IsMember({"http", "gold", "corrupt", "scripted"}));
  cmd->add_option("--endpoint", f.endpoint, "Base URL of an OpenAI-style completions server");
  cmd->add_option("--model", f.model, "Model name sent to the server");
  cmd->add_option("--script", f.script, "Replies for the scripted backend (JSON map or JSONL id/output)");
  cmd->add_option("--corruption", f.corruption, "Corrupt-oracle policy")
      ->check(CLI::IsMember({"repeat-first", "drop-last", "empty"}));
  cmd->add_option("--timeout-ms", f.timeout_ms, "HTTP request timeout");
  cmd->add_option("--retries", f.retries, "HTTP attempts per request");
  cmd->add_flag("--no-repetition-penalty", f.no_repetition_penalty,
                "Do not send the repetition_penalty field");
}

std::unique_ptr<ModelBackend> make_http(const BackendFlags& f) {
  if (f.endpoint.empty()) throw CLI::ValidationError("--endpoint", "required for --backend http");
  HttpOptions o;
  o.base_url = f.endpoint;
  o.model = f.model;
  if (const char* token = std::getenv(kAuthTokenEnv)) o.auth_token = token;
  o.timeout = std::chrono::milliseconds(f.timeout_ms);
  o.retry.max_attempts = f.retries;
  o.send_repetition_penalty = !f.no_repetition_penalty;
  return std::make_unique<HttpCompletionBackend>(std::move(o));
}

Corruption parse_corruption(const std::string& s) {
  if (s == "drop-last") return Corruption::DropLastStep;
  if (s == "empty") return Corruption::Empty;
  return Corruption::RepeatFirstStep;
}

void print_summary(const EvalReport& report) {
  for (const auto& [rule, t] : report.per_rule) {
    std::cout << rule << ": " << t.correct << "/" << t.total() << " correct, " << t.unparseable
              << " unparseable (accuracy " << t.accuracy() << ")\n";
  }
  if (report.csqa) {
    const auto& t = *report.csqa;
    std::cout << "csqa: " << t.correct << "/" << t.total() << " correct, " << t.unparseable
              << " unparseable (accuracy " << t.accuracy() << ")\n";
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chain-of-thought deduction benchmark toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a deduction dataset (JSON lines)");
  std::string gen_rule = "ie";
  GenSpec gen_spec;
  std::string gen_out;
  std::string gen_lexicon;
  gen->add_option("--rule", gen_rule, "Deduction rule (name or IE/CI/CE/DI/DE/PBC)")->required();
  gen->add_option("--count", gen_spec.count, "Number of examples")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_spec.seed, "Random seed");
  gen->add_option("--out", gen_out, "Output file")->required();
  gen->add_option("--lexicon", gen_lexicon, "Lexicon JSON (concepts, adjectives, names)");
  gen->add_flag("--shuffle-premises", gen_spec.shuffle_premises, "Shuffle premise order");

  // corpus
  auto* corpus = app.add_subcommand("corpus", "Emit the fine-tuning corpus with a train/validation split");
  CorpusSpec corpus_spec;
  std::string corpus_dir;
  std::string corpus_lexicon;
  corpus->add_option("--out-dir", corpus_dir, "Output directory")->required();
  corpus->add_option("--seed", corpus_spec.seed, "Random seed");
  corpus->add_option("--questions-per-rule", corpus_spec.questions_per_rule)->check(CLI::PositiveNumber);
  corpus->add_option("--exemplars-per-question", corpus_spec.exemplars_per_question)
      ->check(CLI::PositiveNumber);
  corpus->add_option("--lexicon", corpus_lexicon, "Lexicon JSON");

  // run
  auto* run = app.add_subcommand("run", "Run an experiment against a backend");
  run->require_subcommand(1);

  auto* run_p = run->add_subcommand("prontoqa", "Deductive chain-of-thought questions");
  std::string p_dataset;
  std::string p_mode = "strict";
  std::string p_out;
  std::string p_responses;
  std::string p_lexicon;
  ProntoqaRunConfig p_config;
  BackendFlags p_backend;
  run_p->add_option("--dataset", p_dataset, "Dataset produced by 'gen'")->required();
  run_p->add_option("--shots", p_config.shots, "Exemplars per prompt (8, or 3 for 1024-token models)");
  run_p->add_option("--mode", p_mode, "Proof checking mode")->check(CLI::IsMember({"strict", "valid"}));
  run_p->add_option("--concurrency", p_config.concurrency, "In-flight completions")->check(CLI::PositiveNumber);
  run_p->add_option("--seed", p_config.exemplar_seed, "Seed for exemplar generation");
  run_p->add_option("--out", p_out, "Report file")->required();
  run_p->add_option("--responses", p_responses, "Per-question responses (JSON lines)");
  run_p->add_option("--lexicon", p_lexicon, "Lexicon JSON");
  add_backend_flags(run_p, p_backend);

  auto* run_c = run->add_subcommand("csqa", "Multiple-choice questions");
  std::string c_questions;
  std::string c_exemplars;
  std::string c_out;
  std::string c_responses;
  CsqaRunConfig c_config;
  std::size_t c_max_tokens = 0;
  BackendFlags c_backend;
  run_c->add_option("--questions", c_questions, "CSQA-format JSON lines")->required();
  run_c->add_option("--exemplars", c_exemplars, "Exemplar prompt text")->required();
  run_c->add_option("--concurrency", c_config.concurrency)->check(CLI::PositiveNumber);
  run_c->add_option("--max-new-tokens", c_max_tokens, "Override the input+100 token budget");
  run_c->add_option("--out", c_out, "Report file")->required();
  run_c->add_option("--responses", c_responses, "Per-question responses (JSON lines)");
  add_backend_flags(run_c, c_backend);

  // attn
  auto* attn = app.add_subcommand("attn", "Attention-map analysis");
  attn->require_subcommand(1);
  auto* score = attn->add_subcommand("score", "Token-level scores for one head");
  std::string a_input;
  long a_layer = -1;
  long a_head = 0;
  std::string a_html;
  std::string a_csv;
  bool a_no_zero_first = false;
  score->add_option("--input", a_input, "Attention interchange file")->required();
  score->add_option("--layer", a_layer, "Layer index (negative counts from the end)");
  score->add_option("--head", a_head, "Head index");
  score->add_option("--html", a_html, "Write the colored-token page here");
  score->add_option("--csv", a_csv, "Write the head matrix table here");
  score->add_flag("--no-zero-first", a_no_zero_first, "Keep the first token's global score");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      gen_spec.rule = parse_rule(gen_rule);
      gen_spec.lexicon = load_lexicon(gen_lexicon);
      const auto examples = generate_dataset(gen_spec);
      write_dataset(gen_out, examples);
      std::cout << "wrote " << examples.size() << " examples to " << gen_out << "\n";
    } else if (*corpus) {
      corpus_spec.lexicon = load_lexicon(corpus_lexicon);
      const Corpus c = emit_corpus(corpus_spec);
      write_corpus(c, corpus_dir);
      std::cout << "wrote " << c.train.size() << " train / " << c.validation.size()
                << " validation records to " << corpus_dir << "\n";
    } else if (*run_p) {
      p_config.mode = parse_mode(p_mode);
      p_config.lexicon = load_lexicon(p_lexicon);
      const SentenceParser parser(p_config.lexicon);
      const auto dataset = read_dataset(p_dataset, parser);
      std::unique_ptr<ModelBackend> backend;
      if (p_backend.kind == "http") {
        backend = make_http(p_backend);
      } else if (p_backend.kind == "gold") {
        backend = make_gold_oracle(dataset);
      } else if (p_backend.kind == "corrupt") {
        backend = make_corrupt_oracle(dataset, parse_corruption(p_backend.corruption));
      } else {
        if (p_backend.script.empty()) throw CLI::ValidationError("--script", "required for --backend scripted");
        backend = std::make_unique<ScriptedBackend>(load_script(p_backend.script));
      }
      const EvalReport report = run_prontoqa(dataset, *backend, p_config);
      write_report(report, p_out, p_responses.empty() ? std::nullopt : std::optional<std::filesystem::path>(p_responses));
      print_summary(report);
    } else if (*run_c) {
      const auto questions = load_csqa(c_questions);
      const std::string block = read_text_file(c_exemplars);
      if (c_max_tokens > 0) c_config.max_new_tokens = c_max_tokens;
      std::unique_ptr<ModelBackend> backend;
      if (c_backend.kind == "http") {
        backend = make_http(c_backend);
      } else if (c_backend.kind == "gold") {
        backend = std::make_unique<ScriptedBackend>(csqa_gold_replies(questions), false, "gold");
      } else if (c_backend.kind == "scripted") {
        if (c_backend.script.empty()) throw CLI::ValidationError("--script", "required for --backend scripted");
        backend = std::make_unique<ScriptedBackend>(load_script(c_backend.script));
      } else {
        throw CLI::ValidationError("--backend", "corrupt backend only applies to prontoqa runs");
      }
      const EvalReport report = run_csqa(questions, *backend, block, c_config);
      write_report(report, c_out, c_responses.empty() ? std::nullopt : std::optional<std::filesystem::path>(c_responses));
      print_summary(report);
    } else if (*score) {
      const AttentionRecord record = load_attention(a_input);
      const TokenScores s = score_prompt(record, a_layer, a_head, !a_no_zero_first);
      if (!a_html.empty()) {
        write_file(a_html, render_token_html(record.tokens(), s.s_norm,
                                             record.model_id() + " layer " + std::to_string(a_layer) +
                                                 " head " + std::to_string(a_head)));
      }
      if (!a_csv.empty()) write_file(a_csv, head_table_csv(export_head_matrix(record, a_layer, a_head)));
      nlohmann::ordered_json out;
      out["model_id"] = record.model_id();
      out["layer"] = a_layer;
      out["head"] = a_head;
      out["tokens"] = record.tokens();
      out["g"] = s.g;
      out["p"] = s.p;
      out["s"] = s.s;
      out["s_norm"] = s.s_norm;
      std::cout << out.dump(2) << "\n";
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

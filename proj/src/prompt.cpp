#include "cotbench/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cotbench {

std::string premises_text(const Example& example, const RealizationConfig& config) {
  std::string out;
  for (const auto& p : example.premises) {
    if (!out.empty()) out += ' ';
    out += realize(p, config);
  }
  if (!out.empty() && out.back() == '.') out.pop_back();
  return out;
}

std::string question_block(const Example& example, const RealizationConfig& config) {
  return "Q: " + premises_text(example, config) + ". Prove: " + realize(example.conclusion, config) +
         "\nA: ";
}

std::string exemplar_block(const Example& example, const RealizationConfig& config) {
  return question_block(example, config) + realize_chain(example.gold, config);
}

bool same_question(const Example& a, const Example& b) {
  return a.premises == b.premises && a.conclusion == b.conclusion;
}

std::string build_prontoqa_prompt(std::span<const Example> exemplars, const Example& test,
                                  const RealizationConfig& config) {
  std::string out;
  for (const auto& e : exemplars) {
    if (same_question(e, test)) {
      throw std::invalid_argument("test question " + test.id + " also appears as an exemplar");
    }
    out += exemplar_block(e, config);
    out += kBlockSeparator;
  }
  out += question_block(test, config);
  return out;
}

std::vector<std::string> split_prompt_blocks(std::string_view prompt) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t at = prompt.find(kBlockSeparator, start);
    if (at == std::string_view::npos) {
      out.emplace_back(prompt.substr(start));
      return out;
    }
    out.emplace_back(prompt.substr(start, at - start));
    start = at + kBlockSeparator.size();
  }
}

ParsedQuestion parse_question_block(std::string_view block, const SentenceParser& parser) {
  constexpr std::string_view kQ = "Q: ";
  constexpr std::string_view kProve = ". Prove: ";
  constexpr std::string_view kA = "\nA:";
  if (!block.starts_with(kQ)) throw std::invalid_argument("question block must start with 'Q: '");
  const std::size_t prove = block.find(kProve);
  if (prove == std::string_view::npos) throw std::invalid_argument("question block lacks '. Prove: '");
  std::size_t answer = block.find(kA, prove);
  if (answer == std::string_view::npos) answer = block.size();

  ParsedQuestion out{{}, parser.parse_sentence(block.substr(prove + kProve.size(),
                                                           answer - prove - kProve.size()))};
  for (const auto& s : segment_sentences(block.substr(kQ.size(), prove - kQ.size()))) {
    out.premises.push_back(parser.parse_sentence(s.text));
  }
  return out;
}

McqQuestion::McqQuestion(std::string id, std::string stem, std::vector<McqChoice> choices,
                         char answer_key)
    : id_(std::move(id)), stem_(std::move(stem)), answer_key_(answer_key) {
  if (choices.size() != 5) {
    throw std::invalid_argument("question " + id_ + ": expected 5 choices, got " +
                                std::to_string(choices.size()));
  }
  for (std::size_t i = 0; i < 5; ++i) {
    const char expected = static_cast<char>('A' + i);
    if (choices[i].label != expected) {
      throw std::invalid_argument("question " + id_ + ": choice " + std::to_string(i) +
                                  " must be labelled " + expected);
    }
    choices_[i] = std::move(choices[i]);
  }
  if (answer_key_ < 'A' || answer_key_ > 'E') {
    throw std::invalid_argument("question " + id_ + ": answer key must be one of A-E");
  }
}

McqQuestion parse_csqa_record(const nlohmann::json& record) {
  const auto& q = record.at("question");
  std::vector<McqChoice> choices;
  for (const auto& c : q.at("choices")) {
    const std::string label = c.at("label").get<std::string>();
    if (label.size() != 1) throw std::invalid_argument("choice label must be one character");
    choices.push_back({label[0], c.at("text").get<std::string>()});
  }
  const std::string key = record.at("answerKey").get<std::string>();
  if (key.size() != 1) throw std::invalid_argument("answerKey must be one character");
  return McqQuestion(record.value("id", std::string()), q.at("stem").get<std::string>(),
                     std::move(choices), key[0]);
}

std::vector<McqQuestion> load_csqa(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<McqQuestion> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    try {
      out.push_back(parse_csqa_record(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string build_csqa_prompt(std::string_view exemplar_block, const McqQuestion& question) {
  std::string out(exemplar_block);
  out += "\n Q: ";
  out += question.stem();
  out += " Answer Choices: (a) ";
  out += question.choices()[0].text;
  for (std::size_t i = 1; i < question.choices().size(); ++i) {
    out += "\n(";
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(question.choices()[i].label)));
    out += ") ";
    out += question.choices()[i].text;
  }
  out += '\n';
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace cotbench

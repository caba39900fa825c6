#include "cotbench/extract.hpp"

#include <cctype>

namespace cotbench {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string_view strip_prompt(std::string_view raw, std::string_view prompt) {
  std::size_t i = 0;  // into raw
  std::size_t j = 0;  // into prompt
  while (j < prompt.size()) {
    if (is_space(prompt[j])) {
      // A whitespace run in the prompt matches any (possibly empty) run in raw.
      while (j < prompt.size() && is_space(prompt[j])) ++j;
      while (i < raw.size() && is_space(raw[i])) ++i;
      continue;
    }
    if (i < raw.size() && raw[i] == prompt[j]) {
      ++i;
      ++j;
      continue;
    }
    return raw;
  }
  // Trailing prompt whitespace already swallowed raw whitespace; keep what follows.
  return raw.substr(i);
}

McqOutcome extract_csqa(std::string_view raw, std::string_view prompt, char answer_key) {
  const std::string_view rest = strip_prompt(raw, prompt);
  const std::size_t marker = rest.find(kCsqaAnswerMarker);
  if (marker == std::string_view::npos) return {};
  const std::size_t start = marker + kCsqaAnswerMarker.size();
  const std::size_t close = rest.find(')', start);
  if (close == std::string_view::npos || close - start != 1) return {};
  const char letter = static_cast<char>(std::tolower(static_cast<unsigned char>(rest[start])));
  if (letter < 'a' || letter > 'e') return {};
  const char key = static_cast<char>(std::tolower(static_cast<unsigned char>(answer_key)));
  return {letter == key ? McqVerdict::Correct : McqVerdict::Incorrect, letter};
}

std::string extract_cot(std::string_view raw, std::string_view prompt) {
  std::string_view rest = strip_prompt(raw, prompt);
  if (const std::size_t q = rest.find("Q:"); q != std::string_view::npos) rest = rest.substr(0, q);
  while (!rest.empty() && is_space(rest.front())) rest.remove_prefix(1);
  while (!rest.empty() && is_space(rest.back())) rest.remove_suffix(1);
  return std::string(rest);
}

}  // namespace cotbench

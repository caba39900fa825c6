#pragma once

// Completion backends. Every backend maps (prompt, decode configuration) to
// raw text; the request also carries the question id so offline backends
// (oracles, scripted replies) can look up their answer.

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cotbench/logic.hpp"

namespace cotbench {

struct DecodeConfig {
  std::size_t max_new_tokens = 256;
  bool greedy = true;
  double repetition_penalty = 0.0001;

  /// Deductive tasks: 256 new tokens.
  static DecodeConfig prontoqa() { return {}; }
  /// Multiple choice: input tokens + 100.
  static DecodeConfig csqa(std::size_t input_tokens) { return {input_tokens + 100, true, 0.0001}; }
};

/// Tokenizer-free stand-in for prompt length: ceil(bytes / 4).
std::size_t approximate_token_count(std::string_view prompt);

struct CompletionRequest {
  std::string id;
  std::string prompt;
  DecodeConfig decode;
};

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Network failure or HTTP >= 500 after all retries.
class BackendUnavailable : public BackendError {
 public:
  using BackendError::BackendError;
};

/// HTTP 4xx, or an offline backend with nothing to say for the request.
class BackendRejected : public BackendError {
 public:
  using BackendError::BackendError;
};

class BackendTimeout : public BackendError {
 public:
  using BackendError::BackendError;
};

class ModelBackend {
 public:
  virtual ~ModelBackend() = default;
  virtual std::string complete(const CompletionRequest& request) = 0;
  virtual std::string name() const = 0;
  /// Whether the last request that reached the model carried the repetition penalty.
  virtual bool repetition_penalty_honored() const { return false; }
};

/// Validates the request (non-empty prompt) and forwards it.
std::string complete(ModelBackend& backend, const CompletionRequest& request);

/// Replies with a fixed text per question id (gold chains, gold answers, or
/// anything a test wants). Unknown ids raise BackendRejected.
class ScriptedBackend : public ModelBackend {
 public:
  explicit ScriptedBackend(std::map<std::string, std::string> replies, bool echo_prompt = false,
                           std::string label = "scripted");
  std::string complete(const CompletionRequest& request) override;
  std::string name() const override { return label_; }

 private:
  std::map<std::string, std::string> replies_;
  bool echo_prompt_;
  std::string label_;
};

/// Gold oracle over a dataset: returns each test question's gold chain.
std::unique_ptr<ModelBackend> make_gold_oracle(const std::vector<Example>& dataset,
                                               bool echo_prompt = false);

enum class Corruption {
  /// Final sentence replaced by the first gold sentence, as in a model that
  /// repeats the premise instead of concluding ("Wren is a sterpus.").
  RepeatFirstStep,
  /// Final sentence dropped.
  DropLastStep,
  /// Empty continuation.
  Empty,
};

std::unique_ptr<ModelBackend> make_corrupt_oracle(const std::vector<Example>& dataset,
                                                  Corruption corruption);

struct RetryPolicy {
  std::size_t max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
};

struct HttpOptions {
  std::string base_url;  // e.g. "http://localhost:8000/v1"
  std::string model;
  std::string auth_token;  // sent as a bearer token when non-empty
  std::chrono::milliseconds timeout{120000};
  RetryPolicy retry;
  bool send_repetition_penalty = true;
};

/// Environment variable consulted for the bearer token by the CLI.
inline constexpr const char* kAuthTokenEnv = "COTBENCH_API_TOKEN";

/// POST {base_url}/completions with model, prompt, max_tokens, temperature 0
/// and repetition_penalty; reads choices[0].text. If the server rejects the
/// request with 400/422 while the penalty is present, the request is retried
/// once without it and the penalty is reported as not honored.
class HttpCompletionBackend : public ModelBackend {
 public:
  explicit HttpCompletionBackend(HttpOptions options);
  std::string complete(const CompletionRequest& request) override;
  std::string name() const override { return "http:" + options_.model; }
  bool repetition_penalty_honored() const override;

 private:
  HttpOptions options_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  mutable std::mutex mu_;
  bool penalty_honored_ = false;
  bool penalty_refused_ = false;
};

}  // namespace cotbench

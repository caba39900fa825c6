#include "cotbench/backend.hpp"

#include <thread>

#include "cotbench/grammar.hpp"
#include "httplib.h"
#include "json.hpp"

namespace cotbench {

std::size_t approximate_token_count(std::string_view prompt) { return (prompt.size() + 3) / 4; }

std::string complete(ModelBackend& backend, const CompletionRequest& request) {
  if (request.prompt.empty()) throw std::invalid_argument("completion prompt must be non-empty");
  return backend.complete(request);
}

ScriptedBackend::ScriptedBackend(std::map<std::string, std::string> replies, bool echo_prompt,
                                 std::string label)
    : replies_(std::move(replies)), echo_prompt_(echo_prompt), label_(std::move(label)) {}

std::string ScriptedBackend::complete(const CompletionRequest& request) {
  const auto it = replies_.find(request.id);
  if (it == replies_.end()) throw BackendRejected("no scripted reply for question '" + request.id + "'");
  return echo_prompt_ ? request.prompt + it->second : it->second;
}

std::unique_ptr<ModelBackend> make_gold_oracle(const std::vector<Example>& dataset, bool echo_prompt) {
  std::map<std::string, std::string> replies;
  for (const auto& e : dataset) replies[e.id] = realize_chain(e.gold);
  return std::make_unique<ScriptedBackend>(std::move(replies), echo_prompt, "gold");
}

std::unique_ptr<ModelBackend> make_corrupt_oracle(const std::vector<Example>& dataset,
                                                  Corruption corruption) {
  std::map<std::string, std::string> replies;
  for (const auto& e : dataset) {
    std::vector<Paragraph> paragraphs = e.gold.paragraphs();
    switch (corruption) {
      case Corruption::RepeatFirstStep:
        paragraphs.back().back() = ProofStep::plain(paragraphs.front().front().statement());
        break;
      case Corruption::DropLastStep:
        paragraphs.back().pop_back();
        if (paragraphs.back().empty()) paragraphs.pop_back();
        break;
      case Corruption::Empty:
        paragraphs.clear();
        break;
    }
    replies[e.id] = paragraphs.empty() ? std::string() : realize_chain(ProofChain(std::move(paragraphs)));
  }
  return std::make_unique<ScriptedBackend>(std::move(replies), false, "corrupt");
}

HttpCompletionBackend::HttpCompletionBackend(HttpOptions options) : options_(std::move(options)) {
  const std::string& url = options_.base_url;
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint must be an http:// URL: " + url);
  if (url.substr(0, scheme_end) != "http") {
    throw std::invalid_argument("only plain http endpoints are supported: " + url);
  }
  const std::size_t path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

bool HttpCompletionBackend::repetition_penalty_honored() const {
  std::lock_guard lock(mu_);
  return penalty_honored_ && !penalty_refused_;
}

std::string HttpCompletionBackend::complete(const CompletionRequest& request) {
  bool send_penalty;
  {
    std::lock_guard lock(mu_);
    send_penalty = options_.send_repetition_penalty && !penalty_refused_;
  }

  httplib::Client client(scheme_host_port_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!options_.auth_token.empty()) headers.emplace("Authorization", "Bearer " + options_.auth_token);
  const std::string path = path_prefix_ + "/completions";

  auto body_for = [&](bool with_penalty) {
    nlohmann::ordered_json body;
    body["model"] = options_.model;
    body["prompt"] = request.prompt;
    body["max_tokens"] = request.decode.max_new_tokens;
    body["temperature"] = 0;
    if (with_penalty) body["repetition_penalty"] = request.decode.repetition_penalty;
    return body.dump();
  };

  std::string last_error = "no attempt made";
  bool timed_out = false;
  auto backoff = options_.retry.initial_backoff;
  const std::size_t attempts = std::max<std::size_t>(1, options_.retry.max_attempts);
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto res = client.Post(path, headers, body_for(send_penalty), "application/json");
    if (res && (res->status == 400 || res->status == 422) && send_penalty) {
      {
        std::lock_guard lock(mu_);
        penalty_refused_ = true;
      }
      send_penalty = false;
      res = client.Post(path, headers, body_for(false), "application/json");
    }
    if (!res) {
      const auto err = res.error();
      timed_out = err == httplib::Error::Read || err == httplib::Error::Write ||
                  err == httplib::Error::ConnectionTimeout;
      last_error = httplib::to_string(err);
      continue;
    }
    timed_out = false;
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status >= 400) {
      throw BackendRejected("HTTP " + std::to_string(res->status) + " from " + scheme_host_port_ +
                            path + ": " + res->body.substr(0, 200));
    }
    try {
      const auto reply = nlohmann::json::parse(res->body);
      std::string text = reply.at("choices").at(0).at("text").get<std::string>();
      std::lock_guard lock(mu_);
      if (send_penalty) penalty_honored_ = true;
      return text;
    } catch (const nlohmann::json::exception& e) {
      throw BackendRejected(std::string("malformed completion response: ") + e.what());
    }
  }
  if (timed_out) throw BackendTimeout("completion request timed out: " + last_error);
  throw BackendUnavailable("completion endpoint " + scheme_host_port_ + path + " unavailable after " +
                           std::to_string(attempts) + " attempts: " + last_error);
}

}  // namespace cotbench

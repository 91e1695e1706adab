#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dpslab/errors.hpp"
#include "dpslab/pattern_roles.hpp"
#include "dpslab/summary.hpp"

namespace dps::llm {

class UnknownVariant : public Error {
 public:
  explicit UnknownVariant(const std::string& message) : Error(message) {}
};

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& message) : Error(message) {}
};

class RateLimited : public Error {
 public:
  explicit RateLimited(const std::string& message) : Error(message) {}
};

class EmptyCompletion : public Error {
 public:
  explicit EmptyCompletion(const std::string& message) : Error(message) {}
};

// System prompt for the default (concise) configuration.
extern const std::string_view kSystemPromptConcise;

// Instruction line prefixed to the rendered facts document.
extern const std::string_view kUserPromptInstruction;

struct PromptBundle {
  std::string system_text;
  std::string user_text;
  std::string model_id;
  double temperature = 0.0;
  int max_tokens = 512;
  Variant variant = Variant::Concise;
  std::string file_id;

  bool operator==(const PromptBundle&) const = default;
};

// Returns the frozen system prompt for a generation variant:
//   concise      -> kSystemPromptConcise verbatim
//   non_concise  -> the word "concise," deleted, all else identical
//   lenN         -> "50 words" replaced by "N words"
// Throws UnknownVariant for Variant::Default.
std::string system_prompt_for(Variant variant);

PromptBundle build_prompt(const roles::EnrichedFacts& enriched, Variant variant,
                          std::string model_id);

// ---------------------------------------------------------------------------
// Transport
// ---------------------------------------------------------------------------

struct HttpRequest {
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

// Chat-completions client over HTTPS. The credential is read from the
// DPSLAB_API_KEY environment variable unless set explicitly.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(std::string base_url, std::string api_key = "",
                         int max_in_flight = 4);
  ~HttpTransport() override;
  HttpResponse post(const HttpRequest& request) override;

  const std::string& base_url() const { return base_url_; }

 private:
  std::string base_url_;
  std::string api_key_;
  int max_in_flight_;
  std::unique_ptr<class InFlightGate> gate_;
};

// Replays a fixed list of responses; used by tests to script failures.
class ScriptedTransport : public Transport {
 public:
  explicit ScriptedTransport(std::vector<HttpResponse> script);
  HttpResponse post(const HttpRequest& request) override;

  int calls() const;
  const std::vector<HttpRequest>& requests() const { return requests_; }

 private:
  mutable std::mutex mutex_;
  std::vector<HttpResponse> script_;
  std::vector<HttpRequest> requests_;
  size_t next_ = 0;
};

// Deterministic offline stand-in for the remote service. Summarisation
// prompts get a short fact-derived paragraph; ranking prompts get a label
// ordering derived from a hash of the request. Byte-stable across runs.
class DeterministicStubTransport : public Transport {
 public:
  HttpResponse post(const HttpRequest& request) override;
  int calls() const;

 private:
  mutable std::mutex mutex_;
  int calls_ = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_delay{1000};  // doubled after each failure
  std::function<void(std::chrono::milliseconds)> sleep;  // injectable in tests
};

// ---------------------------------------------------------------------------
// Cache and generation records
// ---------------------------------------------------------------------------

struct GenerationRecord {
  PromptBundle bundle;
  int iteration = 1;
  std::string raw_response;
  Summary summary;
  std::string timestamp;  // ISO-8601 UTC
  std::string cache_key;
  bool from_cache = false;
};

// One file per record under dir/<hash>.response.json. Writes are serialized;
// a warm cache makes repeated runs bit-identical and network-free.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<GenerationRecord> load(const std::string& key) const;
  void store(const GenerationRecord& record);
  std::filesystem::path path_for(const std::string& key) const;

 private:
  std::filesystem::path dir_;
  mutable std::mutex write_mutex_;
};

std::string sha256_hex(std::string_view bytes);

// Content hash of (bundle, iteration); the cache key.
std::string cache_key_for(const PromptBundle& bundle, int iteration);

// Chat-completions request body for a bundle (messages, temperature,
// max_tokens); deterministic serialization.
std::string chat_request_body(const PromptBundle& bundle);

// Extracts the assistant message from a chat-completions response body.
// Throws TransportError on malformed JSON, EmptyCompletion on empty text.
std::string extract_completion_text(const std::string& response_body);

// Generates one summary, consulting the cache first. On a cache hit no
// request is made and the stored record is returned unchanged.
GenerationRecord generate(const PromptBundle& bundle, Transport& transport,
                          ResponseCache& cache, int iteration,
                          const RetryPolicy& retry = {});

struct RunResult {
  std::vector<GenerationRecord> records;          // sorted by (file_id, iteration)
  std::vector<std::pair<std::string, std::string>> failures;  // file_id, reason
};

// Runs n_iterations generations per entry with the same prompt; per-file
// failures are collected, not fatal.
RunResult run_iterations(std::span<const roles::EnrichedFacts> entries,
                         Variant variant, int n_iterations,
                         const std::string& model_id, Transport& transport,
                         ResponseCache& cache, const RetryPolicy& retry = {});

}  // namespace dps::llm

#include "dpslab/llm_client.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <semaphore>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "httplib.h"
#include "json.hpp"

#include "dpslab/code_facts.hpp"

namespace dps::llm {
namespace {

using ordered_json = nlohmann::ordered_json;

uint64_t fnv1a64(std::string_view s) {
  uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : s) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string iso_utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

std::string trim(std::string_view s) {
  size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return "";
  size_t end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

}  // namespace

const std::string_view kSystemPromptConcise =
    "You are a senior software analyst who writes concise, factual summaries "
    "of Java classes. Use only the supplied structural facts to describe each "
    "class in a single paragraph no longer than 50 words. Highlight the class "
    "responsibilities, key collaborators, and any explicit design-pattern "
    "roles. Do not invent behaviour or reference missing information. Write "
    "in third person with an objective tone.";

const std::string_view kUserPromptInstruction =
    "Summarise the following Java class facts:";

std::string system_prompt_for(Variant variant) {
  std::string base(kSystemPromptConcise);
  auto replace_limit = [&base](std::string_view limit) {
    std::string out = base;
    size_t at = out.find("50 words");
    out.replace(at, std::string_view("50 words").size(), limit);
    return out;
  };
  switch (variant) {
    case Variant::Concise:
      return base;
    case Variant::NonConcise: {
      std::string out = base;
      size_t at = out.find("concise, ");
      out.erase(at, std::string_view("concise, ").size());
      return out;
    }
    case Variant::Len20:
      return replace_limit("20 words");
    case Variant::Len40:
      return replace_limit("40 words");
    case Variant::Len60:
      return replace_limit("60 words");
    case Variant::Len80:
      return replace_limit("80 words");
    case Variant::Default:
      break;
  }
  throw UnknownVariant("no LLM system prompt for variant '" +
                       to_string(variant) + "'");
}

PromptBundle build_prompt(const roles::EnrichedFacts& enriched, Variant variant,
                          std::string model_id) {
  PromptBundle bundle;
  bundle.system_text = system_prompt_for(variant);
  bundle.user_text = std::string(kUserPromptInstruction) + "\n" +
                     facts::write_facts_document(enriched.facts) +
                     "Pattern annotation:\n" +
                     roles::write_annotation(enriched.annotation);
  bundle.model_id = std::move(model_id);
  bundle.variant = variant;
  bundle.file_id = enriched.facts.file_id;
  return bundle;
}

// ---------------------------------------------------------------------------
// Transports
// ---------------------------------------------------------------------------

class InFlightGate {
 public:
  explicit InFlightGate(int limit) : semaphore_(limit) {}
  void acquire() { semaphore_.acquire(); }
  void release() { semaphore_.release(); }

 private:
  std::counting_semaphore<64> semaphore_;
};

HttpTransport::HttpTransport(std::string base_url, std::string api_key,
                             int max_in_flight)
    : base_url_(std::move(base_url)),
      api_key_(std::move(api_key)),
      max_in_flight_(std::clamp(max_in_flight, 1, 64)),
      gate_(std::make_unique<InFlightGate>(max_in_flight_)) {
  if (api_key_.empty()) {
    if (const char* env = std::getenv("DPSLAB_API_KEY")) api_key_ = env;
  }
}

HttpTransport::~HttpTransport() = default;

HttpResponse HttpTransport::post(const HttpRequest& request) {
  gate_->acquire();
  struct Release {
    InFlightGate* gate;
    ~Release() { gate->release(); }
  } release{gate_.get()};

  // Split "https://host[:port]/prefix" into client target and path prefix.
  std::string url = base_url_;
  std::string scheme_host = url;
  std::string prefix;
  size_t scheme = url.find("://");
  size_t path_start = scheme == std::string::npos ? url.find('/')
                                                  : url.find('/', scheme + 3);
  if (path_start != std::string::npos) {
    scheme_host = url.substr(0, path_start);
    prefix = url.substr(path_start);
    if (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  }
  httplib::Client client(scheme_host);
  client.set_connection_timeout(30, 0);
  client.set_read_timeout(120, 0);
  client.set_write_timeout(30, 0);

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  for (const auto& [k, v] : request.headers) headers.emplace(k, v);

  auto result = client.Post(prefix + request.url, headers, request.body,
                            "application/json");
  if (!result) {
    throw TransportError("request to " + scheme_host + prefix + request.url +
                         " failed: " + httplib::to_string(result.error()));
  }
  return HttpResponse{result->status, result->body};
}

ScriptedTransport::ScriptedTransport(std::vector<HttpResponse> script)
    : script_(std::move(script)) {}

HttpResponse ScriptedTransport::post(const HttpRequest& request) {
  std::lock_guard lock(mutex_);
  requests_.push_back(request);
  if (next_ >= script_.size()) {
    throw TransportError("scripted transport exhausted after " +
                         std::to_string(script_.size()) + " responses");
  }
  return script_[next_++];
}

int ScriptedTransport::calls() const {
  std::lock_guard lock(mutex_);
  return static_cast<int>(requests_.size());
}

namespace {

std::string chat_response_body(const std::string& content) {
  ordered_json j;
  j["choices"] = ordered_json::array(
      {ordered_json{{"message", ordered_json{{"role", "assistant"},
                                             {"content", content}}}}});
  return j.dump();
}

std::string user_message_of(const ordered_json& request) {
  std::string user;
  if (request.contains("messages") && request["messages"].is_array()) {
    for (const auto& m : request["messages"]) {
      if (m.value("role", "") == "user") user = m.value("content", "");
    }
  }
  return user;
}

// Deterministic summary composed from the facts embedded in the user message.
std::string stub_summary_text(const ordered_json& request) {
  std::string user = user_message_of(request);
  std::string type_name = "class";
  std::string pattern = "design";
  std::string role = "participant";
  int method_count = 0;
  size_t facts_at = user.find('{');
  size_t annotation_at = user.find("Pattern annotation:\n");
  if (facts_at != std::string::npos && annotation_at != std::string::npos) {
    try {
      auto facts = ordered_json::parse(user.substr(facts_at, annotation_at - facts_at));
      auto annotation = ordered_json::parse(
          user.substr(annotation_at + std::string_view("Pattern annotation:\n").size()));
      type_name = facts.value("type_name", type_name);
      method_count = static_cast<int>(facts.value("methods", ordered_json::array()).size());
      if (annotation["pattern"].is_string())
        pattern = annotation["pattern"].get<std::string>();
      else if (annotation["pattern"].is_array() && !annotation["pattern"].empty())
        pattern = annotation["pattern"][0].get<std::string>();
      role = annotation.value("focal_role", role);
    } catch (const nlohmann::json::exception&) {
      // keep placeholders; the stub must never fail
    }
  }
  uint64_t h = fnv1a64(user);
  static const char* openers[] = {
      "The %s class plays the %s role in the %s pattern.",
      "%s participates in the %s role of the %s pattern.",
      "Acting as the %s, the %s class anchors the %s pattern.",
  };
  char first[256];
  switch (h % 3) {
    case 0:
      std::snprintf(first, sizeof(first), openers[0], type_name.c_str(),
                    role.c_str(), pattern.c_str());
      break;
    case 1:
      std::snprintf(first, sizeof(first), openers[1], type_name.c_str(),
                    role.c_str(), pattern.c_str());
      break;
    default:
      std::snprintf(first, sizeof(first), openers[2], role.c_str(),
                    type_name.c_str(), pattern.c_str());
      break;
  }
  char second[256];
  std::snprintf(second, sizeof(second),
                " It declares %d method%s and collaborates with the "
                "participants recorded in its structural facts, delegating "
                "behaviour where the pattern prescribes it.",
                method_count, method_count == 1 ? "" : "s");
  return std::string(first) + second;
}

std::string stub_ranking_text(const ordered_json& request) {
  std::string user = user_message_of(request);
  static const char* orders[6] = {"ABC", "ACB", "BAC", "BCA", "CAB", "CBA"};
  const char* order = orders[fnv1a64(user) % 6];
  std::string out;
  for (int i = 0; i < 3; ++i) {
    out += std::to_string(i + 1) + ". " + order[i];
    if (i < 2) out += "\n";
  }
  return out;
}

}  // namespace

HttpResponse DeterministicStubTransport::post(const HttpRequest& request) {
  {
    std::lock_guard lock(mutex_);
    ++calls_;
  }
  ordered_json j;
  try {
    j = ordered_json::parse(request.body);
  } catch (const nlohmann::json::exception& e) {
    return HttpResponse{400, std::string("bad request: ") + e.what()};
  }
  std::string system;
  if (j.contains("messages") && j["messages"].is_array()) {
    for (const auto& m : j["messages"]) {
      if (m.value("role", "") == "system") system = m.value("content", "");
    }
  }
  bool judging = system.find("judge") != std::string::npos;
  std::string content =
      judging ? stub_ranking_text(j) : stub_summary_text(j);
  return HttpResponse{200, chat_response_body(content)};
}

int DeterministicStubTransport::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string chat_request_body(const PromptBundle& bundle) {
  ordered_json j;
  j["model"] = bundle.model_id;
  j["messages"] = ordered_json::array(
      {ordered_json{{"role", "system"}, {"content", bundle.system_text}},
       ordered_json{{"role", "user"}, {"content", bundle.user_text}}});
  j["temperature"] = bundle.temperature;
  j["max_tokens"] = bundle.max_tokens;
  return j.dump();
}

std::string cache_key_for(const PromptBundle& bundle, int iteration) {
  ordered_json j;
  j["request"] = chat_request_body(bundle);
  j["file_id"] = bundle.file_id;
  j["variant"] = to_string(bundle.variant);
  j["iteration"] = iteration;
  return sha256_hex(j.dump());
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path ResponseCache::path_for(const std::string& key) const {
  return dir_ / (key + ".response.json");
}

std::optional<GenerationRecord> ResponseCache::load(const std::string& key) const {
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  ordered_json j;
  try {
    j = ordered_json::parse(buffer.str());
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // corrupt entries are treated as misses
  }
  GenerationRecord record;
  record.cache_key = key;
  record.from_cache = true;
  try {
    record.bundle.system_text = j["request"]["system_text"];
    record.bundle.user_text = j["request"]["user_text"];
    record.bundle.model_id = j["request"]["model_id"];
    record.bundle.temperature = j["request"]["temperature"];
    record.bundle.max_tokens = j["request"]["max_tokens"];
    record.bundle.variant = variant_from_string(j["request"]["variant"]);
    record.bundle.file_id = j["request"]["file_id"];
    record.iteration = j["iteration"];
    record.raw_response = j["raw_response"];
    record.timestamp = j["timestamp"];
    record.summary =
        make_summary(record.bundle.file_id, Generator::LLM,
                     record.bundle.variant, record.iteration,
                     j["extracted_text"].get<std::string>());
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return record;
}

void ResponseCache::store(const GenerationRecord& record) {
  std::lock_guard lock(write_mutex_);
  ordered_json j;
  j["cache_key"] = record.cache_key;
  ordered_json request;
  request["system_text"] = record.bundle.system_text;
  request["user_text"] = record.bundle.user_text;
  request["model_id"] = record.bundle.model_id;
  request["temperature"] = record.bundle.temperature;
  request["max_tokens"] = record.bundle.max_tokens;
  request["variant"] = to_string(record.bundle.variant);
  request["file_id"] = record.bundle.file_id;
  j["request"] = std::move(request);
  j["iteration"] = record.iteration;
  j["raw_response"] = record.raw_response;
  j["extracted_text"] = record.summary.text;
  j["timestamp"] = record.timestamp;
  std::ofstream out(path_for(record.cache_key), std::ios::binary);
  if (!out) throw Error("cannot write cache entry: " + path_for(record.cache_key).string());
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

std::string extract_completion_text(const std::string& response_body) {
  ordered_json j;
  try {
    j = ordered_json::parse(response_body);
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed completion response: ") + e.what());
  }
  if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
    throw TransportError("completion response has no choices");
  const auto& message = j["choices"][0]["message"];
  if (!message.contains("content") || !message["content"].is_string())
    throw TransportError("completion response has no message content");
  std::string text = trim(message["content"].get<std::string>());
  if (text.empty()) throw EmptyCompletion("assistant message is empty");
  return text;
}

GenerationRecord generate(const PromptBundle& bundle, Transport& transport,
                          ResponseCache& cache, int iteration,
                          const RetryPolicy& retry) {
  if (iteration < 1) throw Error("iteration must be >= 1");
  std::string key = cache_key_for(bundle, iteration);
  if (auto cached = cache.load(key)) return *cached;

  auto sleep = retry.sleep ? retry.sleep : [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };

  HttpRequest request{"/chat/completions", {}, chat_request_body(bundle)};
  HttpResponse response;
  std::string last_error;
  bool rate_limited = false;
  std::chrono::milliseconds delay = retry.initial_delay;
  int attempts = std::max(1, retry.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    try {
      response = transport.post(request);
      if (response.status == 200) break;
      rate_limited = response.status == 429;
      last_error = "HTTP " + std::to_string(response.status);
    } catch (const TransportError& e) {
      last_error = e.what();
      rate_limited = false;
    }
    if (attempt == attempts) {
      std::string what = "generation for '" + bundle.file_id + "' failed after " +
                         std::to_string(attempts) + " attempts: " + last_error;
      if (rate_limited) throw RateLimited(what);
      throw TransportError(what);
    }
    sleep(delay);
    delay *= 2;
  }

  GenerationRecord record;
  record.bundle = bundle;
  record.iteration = iteration;
  record.raw_response = response.body;
  record.cache_key = key;
  record.timestamp = iso_utc_now();
  record.summary = make_summary(bundle.file_id, Generator::LLM, bundle.variant,
                                iteration, extract_completion_text(response.body));
  cache.store(record);
  return record;
}

RunResult run_iterations(std::span<const roles::EnrichedFacts> entries,
                         Variant variant, int n_iterations,
                         const std::string& model_id, Transport& transport,
                         ResponseCache& cache, const RetryPolicy& retry) {
  if (n_iterations < 1) throw Error("n_iterations must be >= 1");
  RunResult result;
  for (const auto& enriched : entries) {
    PromptBundle bundle;
    try {
      bundle = build_prompt(enriched, variant, model_id);
    } catch (const Error& e) {
      result.failures.emplace_back(enriched.facts.file_id, e.what());
      continue;
    }
    for (int iteration = 1; iteration <= n_iterations; ++iteration) {
      try {
        result.records.push_back(
            generate(bundle, transport, cache, iteration, retry));
      } catch (const Error& e) {
        result.failures.emplace_back(enriched.facts.file_id, e.what());
      }
    }
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const GenerationRecord& a, const GenerationRecord& b) {
              if (a.bundle.file_id != b.bundle.file_id)
                return a.bundle.file_id < b.bundle.file_id;
              return a.iteration < b.iteration;
            });
  return result;
}

}  // namespace dps::llm

#include "doctest.h"

#include <chrono>
#include <filesystem>

#include "json.hpp"

#include "dpslab/llm_client.hpp"
#include "fixtures.hpp"

using namespace dps::llm;
using dps::Variant;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("dpslab-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string ok_body(const std::string& content) {
  nlohmann::ordered_json j;
  j["choices"] = {{{"message", {{"role", "assistant"}, {"content", content}}}}};
  return j.dump();
}

RetryPolicy no_sleep_policy(std::vector<std::chrono::milliseconds>* sleeps) {
  RetryPolicy policy;
  policy.sleep = [sleeps](std::chrono::milliseconds d) {
    if (sleeps) sleeps->push_back(d);
  };
  return policy;
}

}  // namespace

TEST_SUITE_BEGIN("llm");

TEST_CASE("concise system prompt is the frozen default") {
  std::string prompt = system_prompt_for(Variant::Concise);
  CHECK(prompt == std::string(kSystemPromptConcise));
  CHECK(prompt.find("no longer than 50 words") != std::string::npos);
  CHECK(prompt.find("concise, factual summaries") != std::string::npos);
}

TEST_CASE("length variants differ only in the word limit") {
  const std::string base(kSystemPromptConcise);
  struct Case {
    Variant variant;
    const char* limit;
  };
  for (const Case& c : {Case{Variant::Len20, "20 words"},
                        Case{Variant::Len40, "40 words"},
                        Case{Variant::Len60, "60 words"},
                        Case{Variant::Len80, "80 words"}}) {
    std::string prompt = system_prompt_for(c.variant);
    CHECK(prompt.find(c.limit) != std::string::npos);
    // string-diff: replacing the limit back restores the base exactly
    std::string restored = prompt;
    size_t at = restored.find(c.limit);
    restored.replace(at, std::string(c.limit).size(), "50 words");
    CHECK(restored == base);
  }
}

TEST_CASE("non-concise variant deletes exactly one word") {
  const std::string base(kSystemPromptConcise);
  std::string prompt = system_prompt_for(Variant::NonConcise);
  CHECK(prompt.find("concise") == std::string::npos);
  // string-diff oracle: re-inserting "concise, " restores the base
  std::string restored = prompt;
  size_t at = restored.find("writes factual");
  REQUIRE(at != std::string::npos);
  restored.insert(at + std::string("writes ").size(), "concise, ");
  CHECK(restored == base);
  CHECK(base.size() - prompt.size() == std::string("concise, ").size());
}

TEST_CASE("default variant has no prompt") {
  CHECK_THROWS_AS(system_prompt_for(Variant::Default), UnknownVariant);
}

TEST_CASE("prompt bundle invariants and immutability across files") {
  auto w = fixtures::windows_os_factory();
  auto r = fixtures::round_peg();
  PromptBundle a = build_prompt(w, Variant::Concise, "model-x");
  PromptBundle b = build_prompt(r, Variant::Concise, "model-x");
  CHECK(a.temperature == 0.0);
  CHECK(a.max_tokens == 512);
  CHECK(a.system_text == b.system_text);
  CHECK(a.user_text != b.user_text);
  CHECK(a.user_text.rfind("Summarise the following Java class facts:\n", 0) == 0);
  CHECK(a.user_text.find("\"type_name\": \"WindowsOSFactory\"") !=
        std::string::npos);
  CHECK(a.user_text.find("Pattern annotation:") != std::string::npos);
  CHECK(a.file_id == "WindowsOSFactory");
}

TEST_CASE("generate extracts and caches") {
  fs::path dir = fresh_dir("cache-idempotence");
  ResponseCache cache(dir);
  ScriptedTransport transport({{200, ok_body("X.")}});
  PromptBundle bundle = build_prompt(fixtures::round_peg(), Variant::Concise,
                                     "model-x");
  GenerationRecord first = generate(bundle, transport, cache, 1,
                                    no_sleep_policy(nullptr));
  CHECK(first.summary.text == "X.");
  CHECK(first.summary.word_count == 1);
  CHECK(first.summary.generator == dps::Generator::LLM);
  CHECK(!first.from_cache);
  CHECK(fs::exists(cache.path_for(first.cache_key)));

  // Warm cache: byte-identical record, zero additional requests.
  GenerationRecord second = generate(bundle, transport, cache, 1,
                                     no_sleep_policy(nullptr));
  CHECK(second.from_cache);
  CHECK(second.summary == first.summary);
  CHECK(second.raw_response == first.raw_response);
  CHECK(second.timestamp == first.timestamp);
  CHECK(transport.calls() == 1);

  // A different iteration is a different cache key.
  ScriptedTransport transport2({{200, ok_body("Y.")}});
  GenerationRecord third = generate(bundle, transport2, cache, 2,
                                    no_sleep_policy(nullptr));
  CHECK(third.summary.text == "Y.");
  CHECK(third.cache_key != first.cache_key);
}

TEST_CASE("retry policy: three attempts with doubling backoff") {
  fs::path dir = fresh_dir("retry");
  ResponseCache cache(dir);
  ScriptedTransport transport(
      {{500, "boom"}, {500, "boom"}, {500, "boom"}, {200, ok_body("never")}});
  std::vector<std::chrono::milliseconds> sleeps;
  PromptBundle bundle = build_prompt(fixtures::round_peg(), Variant::Concise,
                                     "model-x");
  CHECK_THROWS_AS(
      generate(bundle, transport, cache, 1, no_sleep_policy(&sleeps)),
      TransportError);
  CHECK(transport.calls() == 3);
  REQUIRE(sleeps.size() == 2);
  CHECK(sleeps[0] == std::chrono::milliseconds(1000));
  CHECK(sleeps[1] == std::chrono::milliseconds(2000));
}

TEST_CASE("recovery within the retry budget") {
  fs::path dir = fresh_dir("retry-recovery");
  ResponseCache cache(dir);
  ScriptedTransport transport({{500, "boom"}, {200, ok_body("Recovered.")}});
  GenerationRecord record = generate(
      build_prompt(fixtures::round_peg(), Variant::Concise, "model-x"),
      transport, cache, 1, no_sleep_policy(nullptr));
  CHECK(record.summary.text == "Recovered.");
  CHECK(transport.calls() == 2);
}

TEST_CASE("rate limiting propagates after backoff exhaustion") {
  fs::path dir = fresh_dir("rate-limit");
  ResponseCache cache(dir);
  ScriptedTransport transport({{429, ""}, {429, ""}, {429, ""}});
  CHECK_THROWS_AS(
      generate(build_prompt(fixtures::round_peg(), Variant::Concise, "model-x"),
               transport, cache, 1, no_sleep_policy(nullptr)),
      RateLimited);
}

TEST_CASE("empty completion is an error") {
  fs::path dir = fresh_dir("empty");
  ResponseCache cache(dir);
  ScriptedTransport transport({{200, ok_body("   ")}});
  CHECK_THROWS_AS(
      generate(build_prompt(fixtures::round_peg(), Variant::Concise, "model-x"),
               transport, cache, 1, no_sleep_policy(nullptr)),
      EmptyCompletion);
  CHECK_THROWS_AS(extract_completion_text("not json"), TransportError);
  CHECK_THROWS_AS(extract_completion_text("{}"), TransportError);
}

TEST_CASE("run_iterations produces sorted records per file and iteration") {
  fs::path dir = fresh_dir("iterations");
  ResponseCache cache(dir);
  DeterministicStubTransport transport;
  std::vector<dps::roles::EnrichedFacts> entries = {
      fixtures::windows_os_factory(), fixtures::round_peg(),
      fixtures::event_manager()};
  RunResult result = run_iterations(entries, Variant::Concise, 2, "model-x",
                                    transport, cache, no_sleep_policy(nullptr));
  CHECK(result.failures.empty());
  REQUIRE(result.records.size() == 6);
  for (size_t i = 1; i < result.records.size(); ++i) {
    const auto& a = result.records[i - 1];
    const auto& b = result.records[i];
    bool ordered = a.bundle.file_id < b.bundle.file_id ||
                   (a.bundle.file_id == b.bundle.file_id &&
                    a.iteration < b.iteration);
    CHECK(ordered);
  }
  CHECK(result.records[0].bundle.file_id == "EventManager");
  CHECK(result.records[0].iteration == 1);
  CHECK(result.records[1].iteration == 2);
}

TEST_CASE("per-file failures do not abort the run") {
  fs::path dir = fresh_dir("partial");
  ResponseCache cache(dir);
  // First file fails three times; later files succeed.
  ScriptedTransport transport({{500, ""},
                               {500, ""},
                               {500, ""},
                               {200, ok_body("ok one")},
                               {200, ok_body("ok two")}});
  std::vector<dps::roles::EnrichedFacts> entries = {
      fixtures::event_manager(), fixtures::round_peg(),
      fixtures::windows_os_factory()};
  RunResult result = run_iterations(entries, Variant::Concise, 1, "model-x",
                                    transport, cache, no_sleep_policy(nullptr));
  CHECK(result.records.size() == 2);
  REQUIRE(result.failures.size() == 1);
  CHECK(result.failures[0].first == "EventManager");
}

TEST_CASE("sha256 known vector") {
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_SUITE_END();

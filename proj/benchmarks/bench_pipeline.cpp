#include <benchmark/benchmark.h>

#include <string>

#include "dpslab/code_facts.hpp"
#include "dpslab/metrics.hpp"
#include "dpslab/nlg_generator.hpp"
#include "dpslab/pattern_roles.hpp"
#include "dpslab/swum.hpp"

namespace {

// Synthetic class with `methods` methods, each calling its successor.
std::string synth_source(int methods) {
  std::string out = "public class Synth implements Runnable {\n";
  for (int i = 0; i < methods; ++i) {
    out += "    public int method" + std::to_string(i) + "(int value) {\n";
    if (i + 1 < methods)
      out += "        return method" + std::to_string(i + 1) + "(value) + 1;\n";
    else
      out += "        return value;\n";
    out += "    }\n";
  }
  out += "}\n";
  return out;
}

dps::roles::EnrichedFacts synth_enriched(int methods) {
  dps::facts::CodeFacts facts =
      dps::facts::parse_source(synth_source(methods), "Synth");
  dps::roles::PatternAnnotation annotation;
  annotation.pattern = dps::roles::PatternKind::Facade;
  annotation.focal_role = "facade";
  annotation.collaborators = {{"subsystem", {"Runnable"}}};
  return dps::roles::enrich(std::move(facts), std::move(annotation));
}

void BM_ParseSource(benchmark::State& state) {
  std::string source = synth_source(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto facts = dps::facts::parse_source(source, "Synth");
    benchmark::DoNotOptimize(facts);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ParseSource)->Range(4, 256)->Complexity();

void BM_RealizeNlg(benchmark::State& state) {
  auto enriched = synth_enriched(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto summary = dps::nlg::realize(enriched);
    benchmark::DoNotOptimize(summary);
  }
}
BENCHMARK(BM_RealizeNlg)->Range(4, 64);

void BM_RealizeSwum(benchmark::State& state) {
  auto enriched = synth_enriched(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto summary = dps::swum::realize(enriched);
    benchmark::DoNotOptimize(summary);
  }
}
BENCHMARK(BM_RealizeSwum)->Range(4, 64);

void BM_SplitIdentifier(benchmark::State& state) {
  for (auto _ : state) {
    auto tokens = dps::swum::split_identifier("buildHTTPQueryForTraceContext42");
    benchmark::DoNotOptimize(tokens);
  }
}
BENCHMARK(BM_SplitIdentifier);

std::string synth_text(int words, uint64_t seed) {
  static const char* vocabulary[] = {"class",  "factory", "event", "adapter",
                                     "method", "creates", "value", "buffer"};
  std::string out;
  for (int i = 0; i < words; ++i) {
    seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
    if (i > 0) out += " ";
    out += vocabulary[(seed >> 33) % 8];
  }
  return out;
}

void BM_CosineSimilarity(benchmark::State& state) {
  std::string a = synth_text(static_cast<int>(state.range(0)), 1);
  std::string b = synth_text(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dps::metrics::cosine_similarity(a, b));
  }
}
BENCHMARK(BM_CosineSimilarity)->Range(16, 128);

void BM_GreedyMatch(benchmark::State& state) {
  dps::metrics::HashedRandomProvider provider(17, 64);
  std::string a = synth_text(static_cast<int>(state.range(0)), 1);
  std::string b = synth_text(static_cast<int>(state.range(0)), 2);
  // warm the per-token cache so steady-state matching is measured
  dps::metrics::greedy_match_score(a, b, provider);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dps::metrics::greedy_match_score(a, b, provider));
  }
}
BENCHMARK(BM_GreedyMatch)->Range(16, 128);

}  // namespace

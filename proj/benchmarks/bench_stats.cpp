#include <benchmark/benchmark.h>

#include <vector>

#include "dpslab/stats.hpp"

namespace {

std::vector<double> synth_diffs(int n, uint64_t seed) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
    double magnitude = 1.0 + static_cast<double>((seed >> 33) % 1000) / 10.0;
    out.push_back(((seed >> 32) & 1) ? magnitude : -magnitude);
  }
  return out;
}

void BM_WilcoxonExact(benchmark::State& state) {
  std::vector<double> diffs = synth_diffs(static_cast<int>(state.range(0)), 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dps::stats::wilcoxon_signed_rank_diffs(diffs));
  }
}
BENCHMARK(BM_WilcoxonExact)->Arg(12)->Arg(25);

void BM_WilcoxonApprox(benchmark::State& state) {
  std::vector<double> diffs = synth_diffs(150, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dps::stats::wilcoxon_signed_rank_diffs(diffs));
  }
}
BENCHMARK(BM_WilcoxonApprox);

void BM_Friedman(benchmark::State& state) {
  std::vector<std::vector<double>> rows;
  uint64_t seed = 11;
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i) {
    std::vector<double> scores;
    for (int j = 0; j < 3; ++j) {
      seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
      scores.push_back(static_cast<double>(seed >> 33));
    }
    rows.push_back(scores);
  }
  auto ranks = dps::stats::rank_rows_descending(rows);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dps::stats::friedman(ranks));
  }
}
BENCHMARK(BM_Friedman)->Arg(150)->Arg(750);

void BM_Spearman(benchmark::State& state) {
  std::vector<double> x, y;
  uint64_t seed = 13;
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i) {
    seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
    x.push_back(static_cast<double>((seed >> 33) % 1000));
    seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
    y.push_back(static_cast<double>((seed >> 33) % 1000));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(dps::stats::spearman(x, y));
  }
}
BENCHMARK(BM_Spearman)->Arg(450);

}  // namespace

BENCHMARK_MAIN();

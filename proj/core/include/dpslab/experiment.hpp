#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpslab/corpus.hpp"
#include "dpslab/judge.hpp"
#include "dpslab/llm_client.hpp"
#include "dpslab/metrics.hpp"
#include "dpslab/stats.hpp"
#include "dpslab/summary.hpp"

namespace dps::pipeline {

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error(message) {}
};

class NoResults : public Error {
 public:
  explicit NoResults(const std::string& message) : Error(message) {}
};

struct ExperimentConfig {
  std::filesystem::path corpus_root = "corpus";
  std::filesystem::path out_dir = "out";

  bool run_nlg = true;
  bool run_swum = true;
  bool run_llm = true;
  std::vector<Variant> llm_variants = {Variant::Concise};
  int iterations = 1;

  bool judge_enabled = true;
  std::vector<judge::Criterion> criteria{judge::kAllCriteria.begin(),
                                         judge::kAllCriteria.end()};
  uint64_t judge_seed = 7;

  std::string metrics_provider = "hashed";  // hashed | onehot | service
  uint64_t metrics_seed = 17;
  int metrics_dimension = 64;
  std::string embedding_model = "text-embedding-3-small";

  std::string llm_transport = "http";  // http | stub
  std::string judge_transport = "http";
  std::string llm_model = "mistralai/mixtral-8x22b-instruct";
  std::string judge_model = "meta-llama/llama-3-70b-instruct";
  std::string base_url = "https://openrouter.ai/api/v1";
  int retry_attempts = 3;
  int retry_initial_delay_ms = 1000;
  int max_in_flight = 4;  // concurrent HTTP requests

  int workers = 1;
  stats::Adjustment adjustment = stats::Adjustment::Bonferroni;
  int min_pairs_for_wilcoxon = 5;
};

// Key/value config file: `key = value`, one per line, '#' comments, optional
// double quotes around values. Unknown keys are rejected.
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Structural validation; throws ConfigError. The judge model must differ
// from the generation model when both stages are enabled.
void validate(const ExperimentConfig& config);

struct ScoreRow {
  metrics::MetricScore score;
  metrics::TextStats text;
};

struct StatsBlock {
  // Wilcoxon comparisons on matched per-file metric pairs.
  std::vector<stats::StatResult> metric_tests;
  std::vector<std::pair<judge::Criterion, stats::StatResult>> friedman_per_criterion;
  std::vector<std::pair<judge::Criterion, std::vector<stats::PairwiseResult>>>
      posthoc_per_criterion;
  // Cross-criteria concordance, in both modes: over the per-criterion
  // mean-rank matrix and over pooled per-file rankings.
  std::optional<stats::StatResult> cross_criteria_mean_mode;
  std::optional<stats::StatResult> cross_criteria_pooled_mode;
  std::vector<std::pair<judge::Criterion, stats::StatResult>> spearman_per_criterion;
  std::vector<std::string> notes;  // skipped tests, small-n remarks
};

struct ResultsBundle {
  std::vector<corpus::CorpusEntry> entries;
  std::vector<Summary> summaries;
  std::vector<ScoreRow> scores;
  std::vector<judge::RankingRecord> rankings;
  StatsBlock stats;
  std::vector<std::string> diagnostics;
};

// Runs the full pipeline for every corpus entry and persists all
// intermediates under config.out_dir: facts/, cache/, summaries.jsonl,
// scores.csv, rankings.csv, stats.csv and diagnostics.txt. Idempotent under
// a warm cache. Per-file failures are diagnosed and excluded, not fatal.
// Transport overrides replace the config-selected transports; tests use them
// to observe that warm-cache reruns make no calls.
ResultsBundle run_experiment(const ExperimentConfig& config,
                             llm::Transport* llm_override = nullptr,
                             llm::Transport* judge_override = nullptr);

// Persisted artifact round-trips used by the staged CLI subcommands.
void write_summaries_jsonl(const std::filesystem::path& path,
                           std::span<const Summary> summaries);
std::vector<Summary> read_summaries_jsonl(const std::filesystem::path& path);
void write_scores_csv(const std::filesystem::path& path,
                      std::span<const ScoreRow> rows);
std::vector<ScoreRow> read_scores_csv(const std::filesystem::path& path);
void write_rankings_csv(const std::filesystem::path& path,
                        std::span<const judge::RankingRecord> records);
std::vector<judge::RankingRecord> read_rankings_csv(
    const std::filesystem::path& path);
void write_stats_csv(const std::filesystem::path& path, const StatsBlock& block);

// Statistics over already-computed artifacts (also used by `dpslab stats`).
StatsBlock compute_statistics(const ExperimentConfig& config,
                              std::span<const ScoreRow> scores,
                              std::span<const judge::RankingRecord> rankings);

}  // namespace dps::pipeline

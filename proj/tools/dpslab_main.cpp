#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "dpslab/code_facts.hpp"
#include "dpslab/corpus.hpp"
#include "dpslab/experiment.hpp"
#include "dpslab/judge.hpp"
#include "dpslab/llm_client.hpp"
#include "dpslab/metrics.hpp"
#include "dpslab/nlg_generator.hpp"
#include "dpslab/report.hpp"
#include "dpslab/swum.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dps::Error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct CommonOptions {
  std::string corpus_root = "corpus";
  std::string out_dir = "out";
};

void add_common(CLI::App* cmd, CommonOptions& options) {
  cmd->add_option("--corpus", options.corpus_root, "Corpus root directory");
  cmd->add_option("--out", options.out_dir, "Output directory");
}

dps::pipeline::ExperimentConfig base_config(const CommonOptions& options) {
  dps::pipeline::ExperimentConfig config;
  config.corpus_root = options.corpus_root;
  config.out_dir = options.out_dir;
  return config;
}

// Facts + enrichment for every ingested entry, with per-file diagnostics.
std::vector<dps::roles::EnrichedFacts> enrich_corpus(
    const dps::corpus::IngestResult& ingested,
    std::vector<std::string>& diagnostics) {
  std::vector<dps::roles::EnrichedFacts> out;
  for (const auto& entry : ingested.entries) {
    try {
      dps::facts::CodeFacts facts =
          dps::facts::parse_source(slurp(entry.source_path), entry.file_id);
      dps::roles::PatternAnnotation annotation =
          dps::roles::read_annotation(slurp(entry.annotation_path));
      out.push_back(dps::roles::enrich(std::move(facts), std::move(annotation)));
    } catch (const dps::Error& e) {
      diagnostics.push_back(entry.file_id + ": " + e.what());
    }
  }
  return out;
}

int cmd_ingest(const CommonOptions& options) {
  dps::corpus::IngestResult result =
      dps::corpus::ingest_corpus(options.corpus_root);
  std::map<dps::roles::PatternKind, int> histogram;
  for (const auto& entry : result.entries) ++histogram[entry.pattern];
  std::cout << "entries: " << result.entries.size() << "\n";
  for (const auto& [pattern, count] : histogram) {
    std::cout << "  " << dps::roles::display_name(pattern) << ": " << count
              << "\n";
  }
  for (const auto& d : result.diagnostics) std::cout << "warning: " << d << "\n";
  return 0;
}

int cmd_facts(const CommonOptions& options) {
  auto ingested = dps::corpus::ingest_corpus(options.corpus_root);
  fs::create_directories(fs::path(options.out_dir) / "facts");
  int written = 0;
  for (const auto& entry : ingested.entries) {
    try {
      dps::facts::CodeFacts facts =
          dps::facts::parse_source(slurp(entry.source_path), entry.file_id);
      std::ofstream out(fs::path(options.out_dir) / "facts" /
                        (entry.file_id + ".facts.json"));
      out << dps::facts::write_facts_document(facts);
      ++written;
    } catch (const dps::Error& e) {
      std::cerr << "warning: " << entry.file_id << ": " << e.what() << "\n";
    }
  }
  std::cout << "wrote " << written << " facts documents\n";
  return 0;
}

int cmd_summarize(const CommonOptions& options, const std::string& generator,
                  const std::string& variant, int iterations,
                  const std::string& transport, const std::string& model,
                  const std::string& base_url) {
  auto ingested = dps::corpus::ingest_corpus(options.corpus_root);
  std::vector<std::string> diagnostics;
  auto enriched = enrich_corpus(ingested, diagnostics);

  std::vector<dps::Summary> summaries;
  if (generator == "nlg" || generator == "swum") {
    for (const auto& e : enriched) {
      try {
        summaries.push_back(generator == "nlg" ? dps::nlg::realize(e)
                                               : dps::swum::realize(e));
      } catch (const dps::Error& err) {
        diagnostics.push_back(e.facts.file_id + ": " + err.what());
      }
    }
  } else if (generator == "llm") {
    std::unique_ptr<dps::llm::Transport> t;
    if (transport == "stub") {
      t = std::make_unique<dps::llm::DeterministicStubTransport>();
    } else {
      t = std::make_unique<dps::llm::HttpTransport>(base_url);
    }
    dps::llm::ResponseCache cache(fs::path(options.out_dir) / "cache");
    dps::llm::RunResult run = dps::llm::run_iterations(
        enriched, dps::variant_from_string(variant), iterations, model, *t,
        cache);
    for (const auto& record : run.records) summaries.push_back(record.summary);
    for (const auto& [file_id, reason] : run.failures)
      diagnostics.push_back(file_id + ": " + reason);
  } else {
    std::cerr << "unknown generator: " << generator << "\n";
    return 2;
  }

  fs::create_directories(options.out_dir);
  fs::path path = fs::path(options.out_dir) /
                  ("summaries." + generator + ".jsonl");
  dps::pipeline::write_summaries_jsonl(path, summaries);
  std::cout << "wrote " << summaries.size() << " summaries to " << path.string()
            << "\n";
  for (const auto& d : diagnostics) std::cerr << "warning: " << d << "\n";
  return 0;
}

// Collects summaries.*.jsonl (or summaries.jsonl) under out/.
std::vector<dps::Summary> load_all_summaries(const fs::path& out_dir) {
  std::vector<dps::Summary> all;
  std::vector<fs::path> files;
  if (fs::is_regular_file(out_dir / "summaries.jsonl"))
    files.push_back(out_dir / "summaries.jsonl");
  if (fs::is_directory(out_dir)) {
    for (const auto& entry : fs::directory_iterator(out_dir)) {
      std::string name = entry.path().filename().string();
      if (name.rfind("summaries.", 0) == 0 && name != "summaries.jsonl" &&
          entry.path().extension() == ".jsonl") {
        files.push_back(entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto batch = dps::pipeline::read_summaries_jsonl(f);
    all.insert(all.end(), batch.begin(), batch.end());
  }
  return all;
}

int cmd_score(const CommonOptions& options, const std::string& provider_name,
              uint64_t seed, int dimension) {
  auto ingested = dps::corpus::ingest_corpus(options.corpus_root);
  std::vector<dps::Summary> summaries = load_all_summaries(options.out_dir);
  if (summaries.empty()) {
    std::cerr << "no summaries under " << options.out_dir
              << "; run summarize first\n";
    return 2;
  }
  std::unique_ptr<dps::metrics::EmbeddingProvider> provider;
  if (provider_name == "onehot") {
    provider = std::make_unique<dps::metrics::OneHotProvider>(4096);
  } else {
    provider = std::make_unique<dps::metrics::HashedRandomProvider>(seed,
                                                                    dimension);
  }
  std::map<std::string, const dps::Summary*> references;
  for (const auto& entry : ingested.entries)
    references[entry.file_id] = &entry.reference_summary;
  std::vector<dps::pipeline::ScoreRow> rows;
  for (const auto& s : summaries) {
    auto ref = references.find(s.file_id);
    if (ref == references.end()) continue;
    dps::pipeline::ScoreRow row;
    row.score = dps::metrics::score_summary(s, *ref->second, *provider);
    row.text = dps::metrics::text_stats(s.text);
    rows.push_back(std::move(row));
  }
  fs::path path = fs::path(options.out_dir) / "scores.csv";
  dps::pipeline::write_scores_csv(path, rows);
  std::cout << "wrote " << rows.size() << " score rows to " << path.string()
            << "\n";
  return 0;
}

int cmd_judge(const CommonOptions& options, const std::string& criteria_csv,
              uint64_t seed, const std::string& transport,
              const std::string& model) {
  auto ingested = dps::corpus::ingest_corpus(options.corpus_root);
  std::vector<dps::Summary> summaries = load_all_summaries(options.out_dir);
  std::vector<dps::judge::Criterion> criteria;
  {
    std::istringstream in(criteria_csv);
    std::string item;
    while (std::getline(in, item, ','))
      if (!item.empty()) criteria.push_back(dps::judge::criterion_from_string(item));
  }
  if (criteria.empty())
    for (auto c : dps::judge::kAllCriteria) criteria.push_back(c);

  std::unique_ptr<dps::llm::Transport> t;
  if (transport == "stub") {
    t = std::make_unique<dps::llm::DeterministicStubTransport>();
  } else {
    t = std::make_unique<dps::llm::HttpTransport>(
        "https://openrouter.ai/api/v1");
  }
  dps::llm::ResponseCache cache(fs::path(options.out_dir) / "cache");

  std::map<std::string, std::map<int, const dps::Summary*>> llm;
  std::map<std::string, const dps::Summary*> nlg, swum;
  for (const auto& s : summaries) {
    if (s.generator == dps::Generator::NLG) nlg[s.file_id] = &s;
    if (s.generator == dps::Generator::SWUM) swum[s.file_id] = &s;
    if (s.generator == dps::Generator::LLM) llm[s.file_id][s.iteration] = &s;
  }
  std::vector<dps::judge::RankingRecord> records;
  for (const auto& entry : ingested.entries) {
    if (!nlg.count(entry.file_id) || !swum.count(entry.file_id) ||
        !llm.count(entry.file_id)) {
      continue;
    }
    for (const auto& [iteration, llm_summary] : llm[entry.file_id]) {
      std::array<dps::Summary, 3> candidates = {
          *nlg[entry.file_id], *swum[entry.file_id], *llm_summary};
      for (auto criterion : criteria) {
        auto permutation =
            dps::judge::label_permutation(entry.file_id, criterion, seed);
        auto prompt = dps::judge::build_ranking_prompt(
            entry.reference_summary, candidates, criterion, permutation, model);
        auto response = dps::llm::generate(prompt, *t, cache, iteration);
        auto record =
            dps::judge::parse_ranking(response.summary.text, permutation);
        record.file_id = entry.file_id;
        record.criterion = criterion;
        record.iteration = iteration;
        records.push_back(std::move(record));
      }
    }
  }
  fs::path path = fs::path(options.out_dir) / "rankings.csv";
  dps::pipeline::write_rankings_csv(path, records);
  std::cout << "wrote " << records.size() << " ranking records to "
            << path.string() << "\n";
  return 0;
}

int cmd_stats(const CommonOptions& options) {
  dps::pipeline::ExperimentConfig config = base_config(options);
  std::vector<dps::pipeline::ScoreRow> scores;
  std::vector<dps::judge::RankingRecord> rankings;
  fs::path scores_path = fs::path(options.out_dir) / "scores.csv";
  fs::path rankings_path = fs::path(options.out_dir) / "rankings.csv";
  if (fs::is_regular_file(scores_path))
    scores = dps::pipeline::read_scores_csv(scores_path);
  if (fs::is_regular_file(rankings_path))
    rankings = dps::pipeline::read_rankings_csv(rankings_path);
  if (scores.empty() && rankings.empty()) {
    std::cerr << "nothing to analyse under " << options.out_dir << "\n";
    return 2;
  }
  auto block = dps::pipeline::compute_statistics(config, scores, rankings);
  fs::path path = fs::path(options.out_dir) / "stats.csv";
  dps::pipeline::write_stats_csv(path, block);
  std::cout << "wrote statistics to " << path.string() << "\n";
  return 0;
}

int cmd_report(const CommonOptions& options) {
  dps::pipeline::ExperimentConfig config = base_config(options);
  dps::pipeline::ResultsBundle bundle;
  auto ingested = dps::corpus::ingest_corpus(options.corpus_root);
  bundle.entries = ingested.entries;
  fs::path out(options.out_dir);
  if (fs::is_regular_file(out / "summaries.jsonl"))
    bundle.summaries = dps::pipeline::read_summaries_jsonl(out / "summaries.jsonl");
  else
    bundle.summaries = load_all_summaries(out);
  if (fs::is_regular_file(out / "scores.csv"))
    bundle.scores = dps::pipeline::read_scores_csv(out / "scores.csv");
  if (fs::is_regular_file(out / "rankings.csv"))
    bundle.rankings = dps::pipeline::read_rankings_csv(out / "rankings.csv");
  bundle.stats =
      dps::pipeline::compute_statistics(config, bundle.scores, bundle.rankings);
  dps::report::render(bundle, config, out / "report");
  std::cout << "wrote report under " << (out / "report").string() << "\n";
  return 0;
}

int cmd_run_all(const std::string& config_path) {
  dps::pipeline::ExperimentConfig config =
      dps::pipeline::parse_config_file(config_path);
  dps::pipeline::ResultsBundle bundle = dps::pipeline::run_experiment(config);
  dps::report::render(bundle, config, config.out_dir / "report");
  std::cout << "entries: " << bundle.entries.size() << "\n"
            << "summaries: " << bundle.summaries.size() << "\n"
            << "score rows: " << bundle.scores.size() << "\n"
            << "ranking records: " << bundle.rankings.size() << "\n"
            << "report: " << (config.out_dir / "report" / "report.txt").string()
            << "\n";
  for (const auto& d : bundle.diagnostics) std::cerr << "warning: " << d << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design-pattern code summary generation and evaluation"};
  app.require_subcommand(1);

  CommonOptions common;

  CLI::App* ingest = app.add_subcommand("ingest", "Scan and validate a corpus");
  add_common(ingest, common);

  CLI::App* facts = app.add_subcommand("facts", "Extract facts documents");
  add_common(facts, common);

  CLI::App* summarize =
      app.add_subcommand("summarize", "Generate summaries with one backend");
  add_common(summarize, common);
  std::string generator = "nlg";
  std::string variant = "concise";
  int iterations = 1;
  std::string transport = "http";
  std::string model = "mistralai/mixtral-8x22b-instruct";
  std::string base_url = "https://openrouter.ai/api/v1";
  summarize->add_option("--generator", generator, "nlg | swum | llm")
      ->required();
  summarize->add_option("--variant", variant,
                        "LLM prompt variant (concise, non_concise, len20...)");
  summarize->add_option("--iterations", iterations, "LLM iterations per file");
  summarize->add_option("--transport", transport, "http | stub");
  summarize->add_option("--model", model, "LLM model id");
  summarize->add_option("--base-url", base_url, "Chat-completions base URL");

  CLI::App* score = app.add_subcommand("score", "Score summaries vs references");
  add_common(score, common);
  std::string provider = "hashed";
  uint64_t metrics_seed = 17;
  int dimension = 64;
  score->add_option("--provider", provider, "hashed | onehot");
  score->add_option("--seed", metrics_seed, "Embedding seed");
  score->add_option("--dimension", dimension, "Embedding dimension");

  CLI::App* judge = app.add_subcommand("judge", "Rank summaries per criterion");
  add_common(judge, common);
  std::string criteria;
  uint64_t judge_seed = 7;
  std::string judge_transport = "http";
  std::string judge_model = "meta-llama/llama-3-70b-instruct";
  judge->add_option("--criteria", criteria,
                    "Comma-separated criteria (default: all five)");
  judge->add_option("--seed", judge_seed, "Label randomization seed");
  judge->add_option("--transport", judge_transport, "http | stub");
  judge->add_option("--model", judge_model, "Judge model id");

  CLI::App* stats = app.add_subcommand("stats", "Hypothesis tests over results");
  add_common(stats, common);

  CLI::App* report = app.add_subcommand("report", "Render result tables");
  add_common(report, common);

  CLI::App* run_all = app.add_subcommand("run-all", "Full pipeline from config");
  std::string config_path;
  run_all->add_option("--config", config_path, "Experiment config file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) return cmd_ingest(common);
    if (facts->parsed()) return cmd_facts(common);
    if (summarize->parsed())
      return cmd_summarize(common, generator, variant, iterations, transport,
                           model, base_url);
    if (score->parsed()) return cmd_score(common, provider, metrics_seed, dimension);
    if (judge->parsed())
      return cmd_judge(common, criteria, judge_seed, judge_transport, judge_model);
    if (stats->parsed()) return cmd_stats(common);
    if (report->parsed()) return cmd_report(common);
    if (run_all->parsed()) return cmd_run_all(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

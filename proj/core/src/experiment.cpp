#include "dpslab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "dpslab/code_facts.hpp"
#include "dpslab/nlg_generator.hpp"
#include "dpslab/swum.hpp"

namespace dps::pipeline {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spew(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

template <typename Fn>
void parallel_for(size_t count, int workers, Fn&& fn) {
  int bounded = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (bounded == 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(bounded);
  for (int w = 0; w < bounded; ++w) {
    pool.emplace_back([&next, count, &fn] {
      for (size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::unique_ptr<llm::Transport> make_transport(const std::string& kind,
                                               const std::string& base_url,
                                               int max_in_flight) {
  if (kind == "stub") return std::make_unique<llm::DeterministicStubTransport>();
  if (kind == "http")
    return std::make_unique<llm::HttpTransport>(base_url, "", max_in_flight);
  throw ConfigError("unknown transport kind: " + kind);
}

std::unique_ptr<metrics::EmbeddingProvider> make_provider(
    const ExperimentConfig& config, llm::Transport& transport) {
  if (config.metrics_provider == "hashed") {
    return std::make_unique<metrics::HashedRandomProvider>(
        config.metrics_seed, config.metrics_dimension);
  }
  if (config.metrics_provider == "onehot") {
    return std::make_unique<metrics::OneHotProvider>(4096);
  }
  if (config.metrics_provider == "service") {
    return std::make_unique<metrics::ServiceEmbeddingProvider>(
        transport, config.embedding_model, config.metrics_dimension);
  }
  throw ConfigError("unknown metrics provider: " + config.metrics_provider);
}

int generator_order(Generator g) {
  switch (g) {
    case Generator::NLG:
      return 0;
    case Generator::SWUM:
      return 1;
    case Generator::LLM:
      return 2;
    case Generator::Human:
      return 3;
  }
  return 3;
}

void sort_summaries(std::vector<Summary>& summaries) {
  std::sort(summaries.begin(), summaries.end(),
            [](const Summary& a, const Summary& b) {
              if (a.file_id != b.file_id) return a.file_id < b.file_id;
              if (a.generator != b.generator)
                return generator_order(a.generator) < generator_order(b.generator);
              if (a.variant != b.variant) return a.variant < b.variant;
              return a.iteration < b.iteration;
            });
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto equals = line.find('=');
    if (equals == std::string::npos)
      throw ConfigError("line " + std::to_string(line_number) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, equals));
    std::string value = trim(line.substr(equals + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);

    try {
      if (key == "corpus_root") {
        config.corpus_root = value;
      } else if (key == "out_dir") {
        config.out_dir = value;
      } else if (key == "generators") {
        config.run_nlg = config.run_swum = config.run_llm = false;
        for (const auto& g : split_csv_list(value)) {
          if (g == "nlg") config.run_nlg = true;
          else if (g == "swum") config.run_swum = true;
          else if (g == "llm") config.run_llm = true;
          else throw ConfigError("unknown generator: " + g);
        }
      } else if (key == "llm_variants") {
        config.llm_variants.clear();
        for (const auto& v : split_csv_list(value))
          config.llm_variants.push_back(variant_from_string(v));
      } else if (key == "iterations") {
        config.iterations = std::stoi(value);
      } else if (key == "judge_enabled") {
        config.judge_enabled = value == "true";
      } else if (key == "judge_criteria") {
        config.criteria.clear();
        for (const auto& c : split_csv_list(value))
          config.criteria.push_back(judge::criterion_from_string(c));
      } else if (key == "judge_seed") {
        config.judge_seed = std::stoull(value);
      } else if (key == "metrics_provider") {
        config.metrics_provider = value;
      } else if (key == "metrics_seed") {
        config.metrics_seed = std::stoull(value);
      } else if (key == "metrics_dimension") {
        config.metrics_dimension = std::stoi(value);
      } else if (key == "embedding_model") {
        config.embedding_model = value;
      } else if (key == "llm_transport") {
        config.llm_transport = value;
      } else if (key == "judge_transport") {
        config.judge_transport = value;
      } else if (key == "llm_model") {
        config.llm_model = value;
      } else if (key == "judge_model") {
        config.judge_model = value;
      } else if (key == "base_url") {
        config.base_url = value;
      } else if (key == "retry_attempts") {
        config.retry_attempts = std::stoi(value);
      } else if (key == "retry_initial_delay_ms") {
        config.retry_initial_delay_ms = std::stoi(value);
      } else if (key == "max_in_flight") {
        config.max_in_flight = std::stoi(value);
      } else if (key == "workers") {
        config.workers = std::stoi(value);
      } else if (key == "adjustment") {
        if (value == "bonferroni") config.adjustment = stats::Adjustment::Bonferroni;
        else if (value == "holm") config.adjustment = stats::Adjustment::Holm;
        else throw ConfigError("unknown adjustment: " + value);
      } else if (key == "min_pairs_for_wilcoxon") {
        config.min_pairs_for_wilcoxon = std::stoi(value);
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("line " + std::to_string(line_number) + " (" + key +
                        "): " + e.what());
    }
  }
  return config;
}

ExperimentConfig parse_config_file(const fs::path& path) {
  return parse_config_text(slurp(path));
}

void validate(const ExperimentConfig& config) {
  if (config.iterations < 1) throw ConfigError("iterations must be >= 1");
  if (config.workers < 1) throw ConfigError("workers must be >= 1");
  if (config.run_llm && config.llm_variants.empty())
    throw ConfigError("llm generator enabled but no llm_variants configured");
  for (Variant v : config.llm_variants) {
    if (v == Variant::Default)
      throw ConfigError("llm_variants must name prompt variants, not 'default'");
  }
  if (config.judge_enabled && config.criteria.empty())
    throw ConfigError("judge enabled but no criteria configured");
  if (config.judge_enabled && config.run_llm &&
      config.judge_model == config.llm_model) {
    throw ConfigError(
        "judge model must differ from the generation model (got '" +
        config.judge_model + "' for both)");
  }
  if (config.metrics_provider != "hashed" && config.metrics_provider != "onehot" &&
      config.metrics_provider != "service") {
    throw ConfigError("unknown metrics provider: " + config.metrics_provider);
  }
  for (const auto& kind : {config.llm_transport, config.judge_transport}) {
    if (kind != "http" && kind != "stub")
      throw ConfigError("unknown transport kind: " + kind);
  }
  if (config.retry_attempts < 1) throw ConfigError("retry_attempts must be >= 1");
  if (config.max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  if (config.min_pairs_for_wilcoxon < 1)
    throw ConfigError("min_pairs_for_wilcoxon must be >= 1");
}

// ---------------------------------------------------------------------------
// Persisted artifacts
// ---------------------------------------------------------------------------

void write_summaries_jsonl(const fs::path& path,
                           std::span<const Summary> summaries) {
  std::ostringstream out;
  for (const auto& s : summaries) {
    ordered_json j;
    j["file_id"] = s.file_id;
    j["generator"] = to_string(s.generator);
    j["variant"] = to_string(s.variant);
    j["iteration"] = s.iteration;
    j["text"] = s.text;
    j["word_count"] = s.word_count;
    out << j.dump() << "\n";
  }
  spew(path, out.str());
}

std::vector<Summary> read_summaries_jsonl(const fs::path& path) {
  std::vector<Summary> out;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ordered_json j = ordered_json::parse(line);
    Summary s;
    s.file_id = j.at("file_id").get<std::string>();
    s.generator = generator_from_string(j.at("generator").get<std::string>());
    s.variant = variant_from_string(j.at("variant").get<std::string>());
    s.iteration = j.at("iteration").get<int>();
    s.text = j.at("text").get<std::string>();
    s.word_count = j.at("word_count").get<int>();
    out.push_back(std::move(s));
  }
  return out;
}

void write_scores_csv(const fs::path& path, std::span<const ScoreRow> rows) {
  std::ostringstream out;
  out << "file_id,generator,variant,iteration,cosine,bert_p,bert_r,bert_f1,"
         "combined,word_count,char_count,words_per_sentence,ttr\n";
  for (const auto& row : rows) {
    out << csv_escape(row.score.file_id) << "," << to_string(row.score.generator)
        << "," << to_string(row.score.variant) << "," << row.score.iteration
        << "," << format_double(row.score.cosine) << ","
        << format_double(row.score.bert_precision) << ","
        << format_double(row.score.bert_recall) << ","
        << format_double(row.score.bert_f1) << ","
        << format_double(row.score.combined) << "," << row.text.word_count << ","
        << row.text.char_count << ","
        << format_double(row.text.words_per_sentence) << ","
        << format_double(row.text.ttr) << "\n";
  }
  spew(path, out.str());
}

std::vector<ScoreRow> read_scores_csv(const fs::path& path) {
  std::vector<ScoreRow> rows;
  std::istringstream in(slurp(path));
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (trim(line).empty()) continue;
    std::vector<std::string> f = csv_split(line);
    if (f.size() != 13) throw Error("malformed scores.csv row: " + line);
    ScoreRow row;
    row.score.file_id = f[0];
    row.score.generator = generator_from_string(f[1]);
    row.score.variant = variant_from_string(f[2]);
    row.score.iteration = std::stoi(f[3]);
    row.score.cosine = std::stod(f[4]);
    row.score.bert_precision = std::stod(f[5]);
    row.score.bert_recall = std::stod(f[6]);
    row.score.bert_f1 = std::stod(f[7]);
    row.score.combined = std::stod(f[8]);
    row.text.word_count = std::stoi(f[9]);
    row.text.char_count = std::stoi(f[10]);
    row.text.words_per_sentence = std::stod(f[11]);
    row.text.ttr = std::stod(f[12]);
    row.text.sentence_count =
        row.text.words_per_sentence > 0.0
            ? static_cast<int>(row.text.word_count / row.text.words_per_sentence + 0.5)
            : 1;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_rankings_csv(const fs::path& path,
                        std::span<const judge::RankingRecord> records) {
  std::ostringstream out;
  out << "file_id,criterion,generator,rank,valid,permutation,iteration\n";
  for (const auto& r : records) {
    for (Generator g : {Generator::NLG, Generator::SWUM, Generator::LLM}) {
      out << csv_escape(r.file_id) << "," << judge::to_string(r.criterion) << ","
          << to_string(g) << ",";
      if (r.valid) out << r.ranks.at(g);
      out << "," << (r.valid ? "true" : "false") << ","
          << r.permutation.encode() << "," << r.iteration << "\n";
    }
  }
  spew(path, out.str());
}

std::vector<judge::RankingRecord> read_rankings_csv(const fs::path& path) {
  std::map<std::tuple<std::string, std::string, int>, judge::RankingRecord> grouped;
  std::istringstream in(slurp(path));
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (trim(line).empty()) continue;
    std::vector<std::string> f = csv_split(line);
    if (f.size() != 7) throw Error("malformed rankings.csv row: " + line);
    auto key = std::make_tuple(f[0], f[1], std::stoi(f[6]));
    judge::RankingRecord& record = grouped[key];
    record.file_id = f[0];
    record.criterion = judge::criterion_from_string(f[1]);
    record.iteration = std::stoi(f[6]);
    record.permutation = judge::LabelPermutation::decode(f[5]);
    record.valid = f[4] == "true";
    if (record.valid && !f[3].empty())
      record.ranks[generator_from_string(f[2])] = std::stoi(f[3]);
  }
  std::vector<judge::RankingRecord> out;
  out.reserve(grouped.size());
  for (auto& [key, record] : grouped) out.push_back(std::move(record));
  return out;
}

namespace {

std::string opt_to_string(const std::optional<double>& v) {
  return v ? format_double(*v) : "";
}

void append_stat_row(std::ostringstream& out, const std::string& section,
                     const stats::StatResult& r, const std::string& note = "") {
  out << csv_escape(section) << "," << csv_escape(r.test_name) << "," << r.n
      << "," << format_double(r.statistic) << "," << format_double(r.p_value)
      << "," << opt_to_string(r.adjusted_p) << ","
      << opt_to_string(r.effect_size) << ","
      << opt_to_string(r.median_difference) << ","
      << opt_to_string(r.kendall_w) << "," << opt_to_string(r.rho) << ","
      << csv_escape(note) << "\n";
}

}  // namespace

void write_stats_csv(const fs::path& path, const StatsBlock& block) {
  std::ostringstream out;
  out << "section,test,n,statistic,p_value,adjusted_p,effect_size,"
         "median_difference,kendall_w,rho,note\n";
  for (const auto& r : block.metric_tests) append_stat_row(out, "metrics", r);
  for (const auto& [criterion, r] : block.friedman_per_criterion)
    append_stat_row(out, "friedman:" + judge::to_string(criterion), r);
  for (const auto& [criterion, pairs] : block.posthoc_per_criterion) {
    for (const auto& pr : pairs) {
      append_stat_row(out, "posthoc:" + judge::to_string(criterion), pr.result,
                      pr.skipped ? "skipped" : "");
    }
  }
  if (block.cross_criteria_mean_mode)
    append_stat_row(out, "cross-criteria", *block.cross_criteria_mean_mode);
  if (block.cross_criteria_pooled_mode)
    append_stat_row(out, "cross-criteria", *block.cross_criteria_pooled_mode);
  for (const auto& [criterion, r] : block.spearman_per_criterion)
    append_stat_row(out, "spearman:" + judge::to_string(criterion), r);
  for (const auto& note : block.notes) {
    out << "note," << csv_escape(note) << ",,,,,,,,,\n";
  }
  spew(path, out.str());
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

namespace {

// Fixed treatment order for rank matrices and posthoc labels.
constexpr std::array<Generator, 3> kTreatments = {Generator::NLG, Generator::SWUM,
                                                  Generator::LLM};

std::string treatment_name(int index) {
  return to_string(kTreatments[static_cast<size_t>(index)]);
}

}  // namespace

StatsBlock compute_statistics(const ExperimentConfig& config,
                              std::span<const ScoreRow> scores,
                              std::span<const judge::RankingRecord> rankings) {
  StatsBlock block;
  Variant primary =
      config.llm_variants.empty() ? Variant::Concise : config.llm_variants.front();

  // Matched per-file metric values at iteration 1 / the primary LLM variant.
  auto metric_of = [&](Generator g, bool use_f1)
      -> std::map<std::string, double> {
    std::map<std::string, double> out;
    for (const auto& row : scores) {
      if (row.score.generator != g || row.score.iteration != 1) continue;
      if (g == Generator::LLM && row.score.variant != primary) continue;
      out[row.score.file_id] = use_f1 ? row.score.bert_f1 : row.score.cosine;
    }
    return out;
  };

  for (bool use_f1 : {false, true}) {
    const std::string metric_name = use_f1 ? "bert_f1" : "cosine";
    const std::vector<std::pair<Generator, Generator>> comparisons = {
        {Generator::LLM, Generator::NLG},
        {Generator::LLM, Generator::SWUM},
        {Generator::SWUM, Generator::NLG},
    };
    for (const auto& [a, b] : comparisons) {
      std::map<std::string, double> va = metric_of(a, use_f1);
      std::map<std::string, double> vb = metric_of(b, use_f1);
      std::vector<std::pair<double, double>> pairs;
      for (const auto& [file_id, value] : va) {
        auto it = vb.find(file_id);
        if (it != vb.end()) pairs.emplace_back(value, it->second);
      }
      std::string label =
          "wilcoxon " + metric_name + ": " + to_string(a) + " vs " + to_string(b);
      if (pairs.empty()) continue;
      if (static_cast<int>(pairs.size()) < config.min_pairs_for_wilcoxon) {
        block.notes.push_back(label + " skipped: only " +
                              std::to_string(pairs.size()) +
                              " matched pairs (minimum " +
                              std::to_string(config.min_pairs_for_wilcoxon) + ")");
        continue;
      }
      try {
        stats::StatResult r = stats::wilcoxon_signed_rank(pairs);
        r.test_name = label;
        block.metric_tests.push_back(std::move(r));
      } catch (const stats::AllZeroDifferences&) {
        block.notes.push_back(label + " skipped: all differences are zero");
      }
    }
  }

  // Rank matrices from valid judge records.
  auto rank_matrix = [&](judge::Criterion criterion, bool first_iteration_only)
      -> std::vector<std::vector<double>> {
    std::vector<std::vector<double>> matrix;
    for (const auto& record : rankings) {
      if (!record.valid || record.criterion != criterion) continue;
      if (first_iteration_only && record.iteration != 1) continue;
      std::vector<double> row;
      row.reserve(3);
      bool complete = true;
      for (Generator g : kTreatments) {
        auto it = record.ranks.find(g);
        if (it == record.ranks.end()) {
          complete = false;
          break;
        }
        row.push_back(static_cast<double>(it->second));
      }
      if (complete) matrix.push_back(std::move(row));
    }
    return matrix;
  };

  for (judge::Criterion criterion : config.criteria) {
    std::vector<std::vector<double>> matrix = rank_matrix(criterion, true);
    if (matrix.size() < 2) {
      if (!rankings.empty()) {
        block.notes.push_back("friedman " + judge::to_string(criterion) +
                              " skipped: fewer than 2 valid rankings");
      }
      continue;
    }
    stats::StatResult fr = stats::friedman(matrix);
    fr.test_name = "friedman " + judge::to_string(criterion);
    block.friedman_per_criterion.emplace_back(criterion, std::move(fr));
    std::vector<stats::PairwiseResult> posthoc =
        stats::pairwise_posthoc(matrix, config.adjustment);
    for (auto& pr : posthoc) {
      std::string suffix = pr.skipped ? " (skipped: identical columns)" : "";
      pr.result.test_name = "wilcoxon " + treatment_name(pr.treatment_a) +
                            " vs " + treatment_name(pr.treatment_b) + suffix;
    }
    block.posthoc_per_criterion.emplace_back(criterion, std::move(posthoc));
  }

  // Cross-criteria concordance, mean-rank mode: one row per criterion holding
  // the within-criterion ranking of the generators' mean ranks.
  {
    std::vector<std::vector<double>> matrix;
    for (judge::Criterion criterion : config.criteria) {
      std::vector<std::vector<double>> per_file = rank_matrix(criterion, true);
      if (per_file.empty()) continue;
      std::vector<double> means(3, 0.0);
      for (const auto& row : per_file) {
        for (size_t j = 0; j < 3; ++j) means[j] += row[j];
      }
      for (double& m : means) m /= static_cast<double>(per_file.size());
      matrix.push_back(stats::average_ranks(means));
    }
    if (matrix.size() >= 2) {
      stats::StatResult r = stats::friedman(matrix);
      r.test_name = "friedman cross-criteria (mean-rank mode)";
      block.cross_criteria_mean_mode = std::move(r);
    }
  }
  // Pooled mode: every valid per-file ranking, all criteria and iterations.
  {
    std::vector<std::vector<double>> matrix;
    for (judge::Criterion criterion : config.criteria) {
      for (auto& row : rank_matrix(criterion, false)) matrix.push_back(row);
    }
    if (matrix.size() >= 2) {
      stats::StatResult r = stats::friedman(matrix);
      r.test_name = "friedman cross-criteria (pooled mode)";
      block.cross_criteria_pooled_mode = std::move(r);
    }
  }

  // Judge-consistency: per criterion, correlate criterion-level ranks with
  // the aggregate (mean across criteria) ranks over (file, generator)
  // observations at iteration 1.
  {
    std::map<std::pair<std::string, Generator>, std::pair<double, int>> aggregate;
    for (const auto& record : rankings) {
      if (!record.valid || record.iteration != 1) continue;
      for (const auto& [generator, rank] : record.ranks) {
        auto& [sum, count] = aggregate[{record.file_id, generator}];
        sum += rank;
        ++count;
      }
    }
    for (judge::Criterion criterion : config.criteria) {
      std::vector<double> x;
      std::vector<double> y;
      for (const auto& record : rankings) {
        if (!record.valid || record.iteration != 1 ||
            record.criterion != criterion) {
          continue;
        }
        for (const auto& [generator, rank] : record.ranks) {
          const auto& [sum, count] = aggregate.at({record.file_id, generator});
          x.push_back(static_cast<double>(rank));
          y.push_back(sum / count);
        }
      }
      if (x.size() < 3) continue;
      try {
        stats::StatResult r = stats::spearman(x, y);
        r.test_name = "spearman " + judge::to_string(criterion) + " vs aggregate";
        block.spearman_per_criterion.emplace_back(criterion, std::move(r));
      } catch (const stats::ConstantInput&) {
        block.notes.push_back("spearman " + judge::to_string(criterion) +
                              " skipped: constant ranks");
      }
    }
  }
  return block;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

ResultsBundle run_experiment(const ExperimentConfig& config,
                             llm::Transport* llm_override,
                             llm::Transport* judge_override) {
  validate(config);
  ResultsBundle bundle;

  corpus::IngestResult ingested = corpus::ingest_corpus(config.corpus_root);
  bundle.entries = std::move(ingested.entries);
  bundle.diagnostics = std::move(ingested.diagnostics);

  fs::create_directories(config.out_dir / "facts");
  fs::create_directories(config.out_dir / "report");

  // Stage i/ii: facts + enrichment, persisted as facts documents.
  size_t entry_count = bundle.entries.size();
  std::vector<std::optional<roles::EnrichedFacts>> enriched(entry_count);
  std::vector<std::string> stage_errors(entry_count);
  parallel_for(entry_count, config.workers, [&](size_t i) {
    const corpus::CorpusEntry& entry = bundle.entries[i];
    try {
      facts::CodeFacts facts =
          facts::parse_source(slurp(entry.source_path), entry.file_id);
      spew(config.out_dir / "facts" / (entry.file_id + ".facts.json"),
           facts::write_facts_document(facts));
      roles::PatternAnnotation annotation =
          roles::read_annotation(slurp(entry.annotation_path));
      enriched[i] = roles::enrich(std::move(facts), std::move(annotation));
    } catch (const std::exception& e) {
      stage_errors[i] = e.what();
    }
  });
  std::vector<corpus::CorpusEntry> usable_entries;
  std::vector<roles::EnrichedFacts> usable;
  for (size_t i = 0; i < entry_count; ++i) {
    if (enriched[i]) {
      usable.push_back(std::move(*enriched[i]));
      usable_entries.push_back(bundle.entries[i]);
    } else {
      bundle.diagnostics.push_back(bundle.entries[i].file_id + ": " +
                                   stage_errors[i] + " (excluded)");
    }
  }

  // Stage iii: generators.
  std::unique_ptr<llm::Transport> owned_llm_transport;
  std::unique_ptr<llm::Transport> owned_judge_transport;
  llm::Transport* llm_transport = llm_override;
  if (llm_transport == nullptr) {
    owned_llm_transport = make_transport(config.llm_transport, config.base_url,
                                         config.max_in_flight);
    llm_transport = owned_llm_transport.get();
  }
  llm::Transport* judge_transport = judge_override;
  if (judge_transport == nullptr) {
    owned_judge_transport =
        make_transport(config.judge_transport, config.base_url,
                       config.max_in_flight);
    judge_transport = owned_judge_transport.get();
  }
  llm::ResponseCache cache(config.out_dir / "cache");
  llm::RetryPolicy retry;
  retry.max_attempts = config.retry_attempts;
  retry.initial_delay = std::chrono::milliseconds(config.retry_initial_delay_ms);

  std::mutex collect_mutex;
  parallel_for(usable.size(), config.workers, [&](size_t i) {
    const roles::EnrichedFacts& e = usable[i];
    std::vector<Summary> local;
    std::vector<std::string> local_diagnostics;
    if (config.run_nlg) {
      try {
        local.push_back(nlg::realize(e));
      } catch (const std::exception& ex) {
        local_diagnostics.push_back(e.facts.file_id + ": nlg: " + ex.what());
      }
    }
    if (config.run_swum) {
      try {
        local.push_back(swum::realize(e));
      } catch (const std::exception& ex) {
        local_diagnostics.push_back(e.facts.file_id + ": swum: " + ex.what());
      }
    }
    if (config.run_llm) {
      for (Variant variant : config.llm_variants) {
        for (int iteration = 1; iteration <= config.iterations; ++iteration) {
          try {
            llm::PromptBundle prompt =
                llm::build_prompt(e, variant, config.llm_model);
            local.push_back(
                llm::generate(prompt, *llm_transport, cache, iteration, retry)
                    .summary);
          } catch (const std::exception& ex) {
            local_diagnostics.push_back(e.facts.file_id + ": llm(" +
                                        to_string(variant) + ", iteration " +
                                        std::to_string(iteration) +
                                        "): " + ex.what());
          }
        }
      }
    }
    std::lock_guard lock(collect_mutex);
    for (auto& s : local) bundle.summaries.push_back(std::move(s));
    for (auto& d : local_diagnostics) bundle.diagnostics.push_back(std::move(d));
  });
  sort_summaries(bundle.summaries);
  write_summaries_jsonl(config.out_dir / "summaries.jsonl", bundle.summaries);

  // Scores against references.
  std::unique_ptr<metrics::EmbeddingProvider> provider =
      make_provider(config, *llm_transport);
  std::map<std::string, const Summary*> references;
  for (const auto& entry : usable_entries)
    references[entry.file_id] = &entry.reference_summary;
  for (const auto& summary : bundle.summaries) {
    auto ref = references.find(summary.file_id);
    if (ref == references.end()) continue;
    try {
      ScoreRow row;
      row.score = metrics::score_summary(summary, *ref->second, *provider);
      row.text = metrics::text_stats(summary.text);
      bundle.scores.push_back(std::move(row));
    } catch (const std::exception& e) {
      bundle.diagnostics.push_back(summary.file_id + ": scoring: " + e.what());
    }
  }
  write_scores_csv(config.out_dir / "scores.csv", bundle.scores);

  // Judge rankings: one strict ranking per file x criterion x iteration.
  bool all_generators = config.run_nlg && config.run_swum && config.run_llm;
  if (config.judge_enabled && all_generators) {
    Variant primary = config.llm_variants.front();
    std::map<std::string, std::map<int, const Summary*>> llm_by_file;
    std::map<std::string, const Summary*> nlg_by_file;
    std::map<std::string, const Summary*> swum_by_file;
    for (const auto& s : bundle.summaries) {
      if (s.generator == Generator::NLG) nlg_by_file[s.file_id] = &s;
      if (s.generator == Generator::SWUM) swum_by_file[s.file_id] = &s;
      if (s.generator == Generator::LLM && s.variant == primary)
        llm_by_file[s.file_id][s.iteration] = &s;
    }
    parallel_for(usable_entries.size(), config.workers, [&](size_t i) {
      const corpus::CorpusEntry& entry = usable_entries[i];
      auto nlg_it = nlg_by_file.find(entry.file_id);
      auto swum_it = swum_by_file.find(entry.file_id);
      auto llm_it = llm_by_file.find(entry.file_id);
      if (nlg_it == nlg_by_file.end() || swum_it == swum_by_file.end() ||
          llm_it == llm_by_file.end()) {
        return;
      }
      std::vector<judge::RankingRecord> local;
      std::vector<std::string> local_diagnostics;
      for (int iteration = 1; iteration <= config.iterations; ++iteration) {
        auto llm_summary = llm_it->second.find(iteration);
        if (llm_summary == llm_it->second.end()) continue;
        std::array<Summary, 3> candidates = {
            *nlg_it->second, *swum_it->second, *llm_summary->second};
        for (judge::Criterion criterion : config.criteria) {
          judge::LabelPermutation permutation = judge::label_permutation(
              entry.file_id, criterion, config.judge_seed);
          try {
            llm::PromptBundle prompt = judge::build_ranking_prompt(
                entry.reference_summary, candidates, criterion, permutation,
                config.judge_model);
            llm::GenerationRecord response =
                llm::generate(prompt, *judge_transport, cache, iteration, retry);
            judge::RankingRecord record =
                judge::parse_ranking(response.summary.text, permutation);
            record.file_id = entry.file_id;
            record.criterion = criterion;
            record.iteration = iteration;
            local.push_back(std::move(record));
          } catch (const std::exception& e) {
            local_diagnostics.push_back(entry.file_id + ": judge(" +
                                        judge::to_string(criterion) +
                                        "): " + e.what());
          }
        }
      }
      std::lock_guard lock(collect_mutex);
      for (auto& r : local) bundle.rankings.push_back(std::move(r));
      for (auto& d : local_diagnostics)
        bundle.diagnostics.push_back(std::move(d));
    });
    std::sort(bundle.rankings.begin(), bundle.rankings.end(),
              [](const judge::RankingRecord& a, const judge::RankingRecord& b) {
                if (a.file_id != b.file_id) return a.file_id < b.file_id;
                if (a.criterion != b.criterion) return a.criterion < b.criterion;
                return a.iteration < b.iteration;
              });
  } else if (config.judge_enabled) {
    bundle.diagnostics.push_back(
        "judge skipped: rankings require all three generators");
  }
  write_rankings_csv(config.out_dir / "rankings.csv", bundle.rankings);

  bundle.stats = compute_statistics(config, bundle.scores, bundle.rankings);
  write_stats_csv(config.out_dir / "stats.csv", bundle.stats);

  std::ostringstream diag;
  for (const auto& d : bundle.diagnostics) diag << d << "\n";
  spew(config.out_dir / "diagnostics.txt", diag.str());
  return bundle;
}

}  // namespace dps::pipeline

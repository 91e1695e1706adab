#include "dpslab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dpslab/metrics.hpp"

namespace dps::report {
namespace {

namespace fs = std::filesystem;
using corpus::CorpusEntry;
using judge::Criterion;
using pipeline::ExperimentConfig;
using pipeline::ResultsBundle;
using pipeline::ScoreRow;

void spew(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

std::string fmt(double value, int decimals) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  return buffer;
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_std(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  double m = mean(values);
  double sum = 0.0;
  for (double v : values) sum += (v - m) * (v - m);
  return std::sqrt(sum / static_cast<double>(values.size() - 1));
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  size_t n = values.size();
  if (n == 0) return 0.0;
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string criterion_label(Criterion c) {
  switch (c) {
    case Criterion::Accuracy:
      return "ACCURACY";
    case Criterion::Conciseness:
      return "CONCISENESS";
    case Criterion::Adequacy:
      return "ADEQUACY";
    case Criterion::CodeContext:
      return "CODE CONTEXT";
    case Criterion::DesignPattern:
      return "DESIGN PATTERN";
  }
  return "";
}

constexpr std::array<Generator, 3> kGenerators = {Generator::NLG,
                                                  Generator::SWUM,
                                                  Generator::LLM};

struct ReportContext {
  const ResultsBundle& results;
  const ExperimentConfig& config;
  Variant primary;
  std::map<std::string, roles::PatternKind> pattern_of;
  std::vector<roles::PatternKind> patterns_present;  // sorted by display name
};

// A score row belongs to a generator's headline column if it is iteration 1
// and, for the LLM, the primary prompt variant.
bool is_headline_row(const ReportContext& ctx, const ScoreRow& row,
                     Generator g) {
  if (row.score.generator != g || row.score.iteration != 1) return false;
  if (g == Generator::LLM && row.score.variant != ctx.primary) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Table 2: mean similarity per generator (plus LLM non-concise when present)
// ---------------------------------------------------------------------------

struct Column {
  std::string name;
  std::vector<double> cosine, precision, recall, f1;
};

std::vector<Column> table2_columns(const ReportContext& ctx) {
  std::vector<Column> columns;
  for (Generator g : kGenerators) {
    Column column;
    column.name = to_string(g);
    for (const auto& row : ctx.results.scores) {
      if (!is_headline_row(ctx, row, g)) continue;
      column.cosine.push_back(row.score.cosine);
      column.precision.push_back(row.score.bert_precision);
      column.recall.push_back(row.score.bert_recall);
      column.f1.push_back(row.score.bert_f1);
    }
    if (!column.cosine.empty()) columns.push_back(std::move(column));
  }
  Column non_concise;
  non_concise.name = "LLM (non-concise)";
  for (const auto& row : ctx.results.scores) {
    if (row.score.generator != Generator::LLM || row.score.iteration != 1 ||
        row.score.variant != Variant::NonConcise ||
        ctx.primary == Variant::NonConcise) {
      continue;
    }
    non_concise.cosine.push_back(row.score.cosine);
    non_concise.precision.push_back(row.score.bert_precision);
    non_concise.recall.push_back(row.score.bert_recall);
    non_concise.f1.push_back(row.score.bert_f1);
  }
  if (!non_concise.cosine.empty()) columns.push_back(std::move(non_concise));
  return columns;
}

void render_table2(const ReportContext& ctx, std::ostringstream& text,
                   const fs::path& dir) {
  std::vector<Column> columns = table2_columns(ctx);
  if (columns.empty()) {
    text << "Table 2 omitted: no metric scores available.\n\n";
    return;
  }
  std::ostringstream csv;
  csv << "metric";
  for (const auto& c : columns) csv << "," << c.name;
  csv << "\n";
  struct Row {
    const char* label;
    std::vector<double> Column::* values;
  };
  const Row rows[] = {
      {"Average Cosine Similarity", &Column::cosine},
      {"Average BERTScore Precision", &Column::precision},
      {"Average BERTScore Recall", &Column::recall},
      {"Average BERTScore F1", &Column::f1},
  };
  text << "Table 2. Mean similarity against human references\n";
  for (const auto& row : rows) {
    csv << row.label;
    text << "  " << row.label << ":";
    for (const auto& c : columns) {
      std::string value = fmt(mean(c.*(row.values)), 4);
      csv << "," << value;
      text << "  " << c.name << "=" << value;
    }
    csv << "\n";
    text << "\n";
  }
  text << "\n";
  spew(dir / "table2.csv", csv.str());
}

// ---------------------------------------------------------------------------
// Table 3: per-pattern text statistics
// ---------------------------------------------------------------------------

void render_table3(const ReportContext& ctx, std::ostringstream& text,
                   const fs::path& dir) {
  std::ostringstream csv;
  csv << "generator,pattern,count,avg_words,median_words,std_words,avg_chars,"
         "avg_words_per_sentence,avg_ttr\n";
  bool any = false;
  text << "Table 3. Per-pattern text statistics\n";
  for (Generator g : kGenerators) {
    std::map<roles::PatternKind, std::vector<const ScoreRow*>> by_pattern;
    for (const auto& row : ctx.results.scores) {
      if (!is_headline_row(ctx, row, g)) continue;
      auto it = ctx.pattern_of.find(row.score.file_id);
      if (it == ctx.pattern_of.end()) continue;
      by_pattern[it->second].push_back(&row);
    }
    if (by_pattern.empty()) continue;
    any = true;
    text << "  [" << to_string(g) << "]\n";
    for (roles::PatternKind pattern : ctx.patterns_present) {
      auto it = by_pattern.find(pattern);
      if (it == by_pattern.end()) continue;
      std::vector<double> words, chars, wps, ttr;
      for (const ScoreRow* row : it->second) {
        words.push_back(row->text.word_count);
        chars.push_back(row->text.char_count);
        wps.push_back(row->text.words_per_sentence);
        ttr.push_back(row->text.ttr);
      }
      csv << to_string(g) << "," << roles::display_name(pattern) << ","
          << words.size() << "," << fmt(mean(words), 2) << ","
          << fmt(median(words), 2) << "," << fmt(sample_std(words), 2) << ","
          << fmt(mean(chars), 2) << "," << fmt(mean(wps), 2) << ","
          << fmt(mean(ttr), 2) << "\n";
      text << "    " << roles::display_name(pattern) << ": count="
           << words.size() << " avg_words=" << fmt(mean(words), 2)
           << " median=" << fmt(median(words), 2)
           << " std=" << fmt(sample_std(words), 2)
           << " avg_chars=" << fmt(mean(chars), 2)
           << " words/sent=" << fmt(mean(wps), 2)
           << " ttr=" << fmt(mean(ttr), 2) << "\n";
    }
  }
  if (!any) {
    text << "  (omitted: no scored summaries)\n";
  } else {
    spew(dir / "table3.csv", csv.str());
  }
  text << "\n";
}

// ---------------------------------------------------------------------------
// Tables 4 and 8: ranking counts per criterion
// ---------------------------------------------------------------------------

void render_table4(const ReportContext& ctx, std::ostringstream& text,
                   const fs::path& dir) {
  std::vector<judge::RankingRecord> first_iteration;
  for (const auto& r : ctx.results.rankings) {
    if (r.iteration == 1) first_iteration.push_back(r);
  }
  if (first_iteration.empty()) {
    text << "Table 4 omitted: no judge rankings (requires all three "
            "generators and an enabled judge).\n\n";
    return;
  }
  judge::RankingTable table = judge::aggregate(first_iteration);
  std::ostringstream csv;
  csv << "criterion,generator,first,second,third,valid_total,mean_score\n";
  text << "Table 4. Ranking counts per criterion (iteration 1)\n";
  for (Criterion c : ctx.config.criteria) {
    auto it = table.counts.find(c);
    if (it == table.counts.end()) continue;
    int total = table.valid_total[c];
    text << "  " << criterion_label(c) << " (valid " << total << "):";
    for (Generator g : kGenerators) {
      const judge::GeneratorCounts& counts = it->second[g];
      csv << judge::to_string(c) << "," << to_string(g) << "," << counts.first
          << "," << counts.second << "," << counts.third << "," << total << ","
          << fmt(table.mean_score[c][g], 2) << "\n";
      text << "  " << to_string(g) << "=" << counts.first << "/"
           << counts.second << "/" << counts.third;
    }
    text << "\n";
  }
  text << "  3-2-1 mean scores pooled over criteria:";
  for (Generator g : kGenerators) {
    if (table.overall_mean_score.count(g))
      text << "  " << to_string(g) << "=" << fmt(table.overall_mean_score[g], 2);
  }
  text << "\n\n";
  spew(dir / "table4.csv", csv.str());
}

void render_table8(const ReportContext& ctx, std::ostringstream& text,
                   const fs::path& dir) {
  if (ctx.results.rankings.empty()) {
    text << "Table 8 omitted: no judge rankings.\n\n";
    return;
  }
  std::ostringstream csv;
  csv << "criterion,total,nlg_count,nlg_pct,llm_count,llm_pct,swum_count,"
         "swum_pct\n";
  text << "Table 8. First-place counts pooled over iterations\n";
  for (Criterion c : ctx.config.criteria) {
    int total = 0;
    std::map<Generator, int> firsts;
    for (const auto& r : ctx.results.rankings) {
      if (!r.valid || r.criterion != c) continue;
      ++total;
      for (const auto& [g, rank] : r.ranks) {
        if (rank == 1) ++firsts[g];
      }
    }
    if (total == 0) continue;
    auto pct = [total](int count) {
      return fmt(100.0 * count / total, 1);
    };
    csv << judge::to_string(c) << "," << total << "," << firsts[Generator::NLG]
        << "," << pct(firsts[Generator::NLG]) << "," << firsts[Generator::LLM]
        << "," << pct(firsts[Generator::LLM]) << "," << firsts[Generator::SWUM]
        << "," << pct(firsts[Generator::SWUM]) << "\n";
    text << "  " << criterion_label(c) << ": total=" << total
         << "  NLG=" << firsts[Generator::NLG] << " ("
         << pct(firsts[Generator::NLG]) << "%)"
         << "  LLM=" << firsts[Generator::LLM] << " ("
         << pct(firsts[Generator::LLM]) << "%)"
         << "  SWUM=" << firsts[Generator::SWUM] << " ("
         << pct(firsts[Generator::SWUM]) << "%)\n";
  }
  text << "\n";
  spew(dir / "table8.csv", csv.str());
}

// ---------------------------------------------------------------------------
// Table 5: per-pattern cosine / F1 / combined
// ---------------------------------------------------------------------------

void render_table5(const ReportContext& ctx, std::ostringstream& text,
                   const fs::path& dir) {
  std::ostringstream csv;
  csv << "pattern,generator,pairs,cosine,f1,combined\n";
  bool any = false;
  text << "Table 5. Per-pattern mean cosine / F1 / combined\n";
  for (roles::PatternKind pattern : ctx.patterns_present) {
    for (Generator g : kGenerators) {
      std::vector<double> cosine, f1;
      for (const auto& row : ctx.results.scores) {
        if (!is_headline_row(ctx, row, g)) continue;
        auto it = ctx.pattern_of.find(row.score.file_id);
        if (it == ctx.pattern_of.end() || it->second != pattern) continue;
        cosine.push_back(row.score.cosine);
        f1.push_back(row.score.bert_f1);
      }
      if (cosine.empty()) continue;
      any = true;
      double mean_cosine = mean(cosine);
      double mean_f1 = mean(f1);
      double combined = metrics::combined_score(mean_cosine, mean_f1);
      csv << roles::display_name(pattern) << "," << to_string(g) << ","
          << cosine.size() << "," << fmt(mean_cosine, 4) << ","
          << fmt(mean_f1, 4) << "," << fmt(combined, 4) << "\n";
      text << "  " << roles::display_name(pattern) << " / " << to_string(g)
           << ": pairs=" << cosine.size() << " cos=" << fmt(mean_cosine, 4)
           << " f1=" << fmt(mean_f1, 4) << " comb=" << fmt(combined, 4) << "\n";
    }
  }
  if (!any) {
    text << "  (omitted: no scored summaries)\n";
  } else {
    spew(dir / "table5.csv", csv.str());
  }
  text << "\n";
}

// ---------------------------------------------------------------------------
// Table 6: per-pattern aggregate ranking counts
// ---------------------------------------------------------------------------

void render_table6(const ReportContext& ctx, std::ostringstream& text,
                   const fs::path& dir) {
  if (ctx.results.rankings.empty()) {
    text << "Table 6 omitted: no judge rankings.\n\n";
    return;
  }
  // Aggregate per-file ranking: order generators by their mean rank across
  // valid iteration-1 criteria; ties resolve in NLG, SWUM, LLM order.
  std::map<std::string, std::map<Generator, std::pair<double, int>>> sums;
  for (const auto& r : ctx.results.rankings) {
    if (!r.valid || r.iteration != 1) continue;
    for (const auto& [g, rank] : r.ranks) {
      auto& [sum, count] = sums[r.file_id][g];
      sum += rank;
      ++count;
    }
  }
  std::map<roles::PatternKind, std::map<Generator, std::array<int, 3>>> counts;
  std::map<roles::PatternKind, int> totals;
  for (const auto& [file_id, per_generator] : sums) {
    if (per_generator.size() != kGenerators.size()) continue;
    auto pattern_it = ctx.pattern_of.find(file_id);
    if (pattern_it == ctx.pattern_of.end()) continue;
    std::vector<std::pair<double, Generator>> order;
    for (Generator g : kGenerators) {
      const auto& [sum, count] = per_generator.at(g);
      order.emplace_back(sum / count, g);
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (size_t place = 0; place < order.size(); ++place)
      ++counts[pattern_it->second][order[place].second][place];
    ++totals[pattern_it->second];
  }
  if (totals.empty()) {
    text << "Table 6 omitted: no valid first-iteration rankings.\n\n";
    return;
  }
  std::ostringstream csv;
  csv << "pattern,generator,first,second,third,total\n";
  text << "Table 6. Per-pattern aggregate ranking counts (iteration 1)\n";
  for (roles::PatternKind pattern : ctx.patterns_present) {
    auto it = counts.find(pattern);
    if (it == counts.end()) continue;
    text << "  " << roles::display_name(pattern) << " (files "
         << totals[pattern] << "):";
    for (Generator g : kGenerators) {
      const std::array<int, 3>& c = it->second[g];
      csv << roles::display_name(pattern) << "," << to_string(g) << "," << c[0]
          << "," << c[1] << "," << c[2] << "," << totals[pattern] << "\n";
      text << "  " << to_string(g) << "=" << c[0] << "/" << c[1] << "/" << c[2];
    }
    text << "\n";
  }
  text << "\n";
  spew(dir / "table6.csv", csv.str());
}

// ---------------------------------------------------------------------------
// Table 7: per-iteration metric spread for the LLM
// ---------------------------------------------------------------------------

void render_table7(const ReportContext& ctx, std::ostringstream& text,
                   const fs::path& dir) {
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_iteration;
  for (const auto& row : ctx.results.scores) {
    if (row.score.generator != Generator::LLM ||
        row.score.variant != ctx.primary) {
      continue;
    }
    by_iteration[row.score.iteration].first.push_back(row.score.cosine);
    by_iteration[row.score.iteration].second.push_back(row.score.bert_f1);
  }
  if (by_iteration.empty()) {
    text << "Table 7 omitted: no LLM scores.\n\n";
    return;
  }
  std::ostringstream csv;
  csv << "iteration,cosine_min,cosine_max,cosine_avg,f1_min,f1_max,f1_avg\n";
  text << "Table 7. Cosine and F1 spread across iterations (LLM, "
       << to_string(ctx.primary) << ")\n";
  auto emit = [&](const std::string& label, const std::vector<double>& cosine,
                  const std::vector<double>& f1) {
    double cmin = *std::min_element(cosine.begin(), cosine.end());
    double cmax = *std::max_element(cosine.begin(), cosine.end());
    double fmin = *std::min_element(f1.begin(), f1.end());
    double fmax = *std::max_element(f1.begin(), f1.end());
    csv << label << "," << fmt(cmin, 4) << "," << fmt(cmax, 4) << ","
        << fmt(mean(cosine), 4) << "," << fmt(fmin, 4) << "," << fmt(fmax, 4)
        << "," << fmt(mean(f1), 4) << "\n";
    text << "  " << label << ": cos " << fmt(cmin, 4) << " / " << fmt(cmax, 4)
         << " / " << fmt(mean(cosine), 4) << "  f1 " << fmt(fmin, 4) << " / "
         << fmt(fmax, 4) << " / " << fmt(mean(f1), 4) << "\n";
  };
  std::vector<double> all_cosine, all_f1;
  for (const auto& [iteration, values] : by_iteration) {
    emit("Iteration " + std::to_string(iteration), values.first, values.second);
    all_cosine.insert(all_cosine.end(), values.first.begin(), values.first.end());
    all_f1.insert(all_f1.end(), values.second.begin(), values.second.end());
  }
  emit("Overall", all_cosine, all_f1);
  text << "\n";
  spew(dir / "table7.csv", csv.str());
}

// ---------------------------------------------------------------------------
// Statistics section
// ---------------------------------------------------------------------------

void render_stats(const ReportContext& ctx, std::ostringstream& text) {
  const pipeline::StatsBlock& block = ctx.results.stats;
  text << "Statistical tests\n";
  auto describe = [&text](const stats::StatResult& r) {
    text << "  " << r.test_name << ": n=" << r.n
         << " statistic=" << fmt(r.statistic, 4) << " p=" << fmt(r.p_value, 6);
    if (r.adjusted_p) text << " adj_p=" << fmt(*r.adjusted_p, 6);
    if (r.effect_size) text << " r=" << fmt(*r.effect_size, 4);
    if (r.median_difference)
      text << " median_diff=" << fmt(*r.median_difference, 4);
    if (r.kendall_w) text << " W=" << fmt(*r.kendall_w, 4);
    if (r.rho) text << " rho=" << fmt(*r.rho, 4);
    text << "\n";
  };
  for (const auto& r : block.metric_tests) describe(r);
  for (const auto& [criterion, r] : block.friedman_per_criterion) describe(r);
  for (const auto& [criterion, pairs] : block.posthoc_per_criterion) {
    for (const auto& pr : pairs) {
      if (pr.skipped) {
        text << "  " << pr.result.test_name << "\n";
      } else {
        describe(pr.result);
      }
    }
  }
  if (block.cross_criteria_mean_mode) describe(*block.cross_criteria_mean_mode);
  if (block.cross_criteria_pooled_mode)
    describe(*block.cross_criteria_pooled_mode);
  for (const auto& [criterion, r] : block.spearman_per_criterion) describe(r);
  for (const auto& note : block.notes) text << "  note: " << note << "\n";
  if (block.metric_tests.empty() && block.friedman_per_criterion.empty() &&
      block.notes.empty()) {
    text << "  (no tests were applicable)\n";
  }
  text << "\n";
}

}  // namespace

void render(const ResultsBundle& results, const ExperimentConfig& config,
            const fs::path& report_dir) {
  if (results.summaries.empty())
    throw pipeline::NoResults("nothing to report: no summaries were generated");
  fs::create_directories(report_dir);

  ReportContext ctx{results, config,
                    config.llm_variants.empty() ? Variant::Concise
                                                : config.llm_variants.front(),
                    {},
                    {}};
  std::set<roles::PatternKind> seen;
  for (const auto& entry : results.entries) {
    ctx.pattern_of[entry.file_id] = entry.pattern;
    seen.insert(entry.pattern);
  }
  ctx.patterns_present.assign(seen.begin(), seen.end());
  std::sort(ctx.patterns_present.begin(), ctx.patterns_present.end(),
            [](roles::PatternKind a, roles::PatternKind b) {
              return roles::display_name(a) < roles::display_name(b);
            });

  std::ostringstream text;
  text << "Design-pattern summary evaluation report\n";
  text << "=========================================\n\n";
  text << "Corpus entries: " << results.entries.size() << "\n";
  text << "Summaries generated: " << results.summaries.size() << "\n";
  text << "Judge records: " << results.rankings.size() << "\n\n";

  render_table2(ctx, text, report_dir);
  render_table3(ctx, text, report_dir);
  render_table4(ctx, text, report_dir);
  render_table5(ctx, text, report_dir);
  render_table6(ctx, text, report_dir);
  render_table7(ctx, text, report_dir);
  render_table8(ctx, text, report_dir);
  render_stats(ctx, text);

  if (!results.diagnostics.empty()) {
    text << "Diagnostics\n";
    for (const auto& d : results.diagnostics) text << "  " << d << "\n";
    text << "\n";
  }
  spew(report_dir / "report.txt", text.str());
}

}  // namespace dps::report

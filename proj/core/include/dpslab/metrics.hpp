#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpslab/errors.hpp"
#include "dpslab/summary.hpp"

namespace dps::llm {
class Transport;
}

namespace dps::metrics {

class EmptyText : public Error {
 public:
  explicit EmptyText(const std::string& message) : Error(message) {}
};

// Splits on non-alphanumeric runs and case-folds. "" -> [].
std::vector<std::string> tokenize(std::string_view text);

// Cosine of raw term-frequency vectors over the union vocabulary, in [0, 1].
// Throws EmptyText when either side tokenizes to nothing.
double cosine_similarity(std::string_view a, std::string_view b);

// Token-embedding source. Implementations must be safely shareable across
// concurrent scoring calls.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<double> embed(const std::string& token) const = 0;
  virtual int dimension() const = 0;
};

// Assigns each distinct token a unit basis vector; for tests, where greedy
// matching must reduce to exact token overlap.
class OneHotProvider : public EmbeddingProvider {
 public:
  explicit OneHotProvider(int dimension = 512);
  std::vector<double> embed(const std::string& token) const override;
  int dimension() const override { return dimension_; }

 private:
  int dimension_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, int> index_;
};

// Deterministic pseudo-random unit vectors derived from (seed, token).
// Platform-stable: the generator and the normal transform are hand-rolled.
class HashedRandomProvider : public EmbeddingProvider {
 public:
  explicit HashedRandomProvider(uint64_t seed = 17, int dimension = 64);
  std::vector<double> embed(const std::string& token) const override;
  int dimension() const override { return dimension_; }

 private:
  uint64_t seed_;
  int dimension_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::vector<double>> cache_;
};

// Fetches embeddings from an HTTP embeddings endpoint; responses are cached
// per token so every token is requested at most once.
class ServiceEmbeddingProvider : public EmbeddingProvider {
 public:
  ServiceEmbeddingProvider(llm::Transport& transport, std::string model_id,
                           int dimension);
  std::vector<double> embed(const std::string& token) const override;
  int dimension() const override { return dimension_; }

 private:
  llm::Transport& transport_;
  std::string model_id_;
  int dimension_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::vector<double>> cache_;
};

struct MatchScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Greedy embedding matching: precision is the mean over candidate tokens of
// the best cosine against any reference token; recall is symmetric; f1 the
// harmonic mean. Throws EmptyText on empty token lists.
MatchScore greedy_match_score(std::string_view candidate,
                              std::string_view reference,
                              const EmbeddingProvider& provider);
MatchScore greedy_match_tokens(std::span<const std::string> candidate,
                               std::span<const std::string> reference,
                               const EmbeddingProvider& provider);

// Truncates toward zero at 4 decimals; the convention used for reported
// combined scores.
double truncate4(double x);

// (cosine + f1) / 2, reported at 4 decimals (truncated).
double combined_score(double cosine, double f1);

struct TextStats {
  int word_count = 0;
  int char_count = 0;
  int sentence_count = 0;
  double words_per_sentence = 0.0;
  double ttr = 0.0;  // distinct case-folded words / word_count

  bool operator==(const TextStats&) const = default;
};

// Surface statistics of one summary. Throws EmptyText for blank input.
TextStats text_stats(std::string_view text);

struct MetricScore {
  std::string file_id;
  Generator generator = Generator::NLG;
  Variant variant = Variant::Default;
  int iteration = 1;
  double cosine = 0.0;
  double bert_precision = 0.0;
  double bert_recall = 0.0;
  double bert_f1 = 0.0;
  double combined = 0.0;
};

// Scores a candidate against the reference text with both metrics.
MetricScore score_summary(const Summary& candidate, const Summary& reference,
                          const EmbeddingProvider& provider);

}  // namespace dps::metrics

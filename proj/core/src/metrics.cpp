#include "dpslab/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "json.hpp"

#include "dpslab/llm_client.hpp"

namespace dps::metrics {
namespace {

uint64_t fnv1a64(std::string_view s) {
  uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : s) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

// splitmix64; bit-stable everywhere.
uint64_t next_u64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double next_unit_double(uint64_t& state) {
  return static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size() && i < b.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double na = norm(a);
  double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double cosine_similarity(std::string_view a, std::string_view b) {
  std::vector<std::string> ta = tokenize(a);
  std::vector<std::string> tb = tokenize(b);
  if (ta.empty() || tb.empty())
    throw EmptyText("cosine_similarity requires non-empty token lists");
  std::map<std::string, double> fa;
  std::map<std::string, double> fb;
  for (const auto& t : ta) fa[t] += 1.0;
  for (const auto& t : tb) fb[t] += 1.0;
  double dot_product = 0.0;
  for (const auto& [token, count] : fa) {
    auto it = fb.find(token);
    if (it != fb.end()) dot_product += count * it->second;
  }
  double na = 0.0, nb = 0.0;
  for (const auto& [token, count] : fa) na += count * count;
  for (const auto& [token, count] : fb) nb += count * count;
  double value = dot_product / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(value, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

OneHotProvider::OneHotProvider(int dimension) : dimension_(dimension) {}

std::vector<double> OneHotProvider::embed(const std::string& token) const {
  std::lock_guard lock(mutex_);
  auto [it, inserted] = index_.emplace(token, static_cast<int>(index_.size()));
  if (it->second >= dimension_)
    throw Error("OneHotProvider vocabulary exceeds dimension " +
                std::to_string(dimension_));
  std::vector<double> v(dimension_, 0.0);
  v[it->second] = 1.0;
  return v;
}

HashedRandomProvider::HashedRandomProvider(uint64_t seed, int dimension)
    : seed_(seed), dimension_(dimension) {}

std::vector<double> HashedRandomProvider::embed(const std::string& token) const {
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(token);
    if (it != cache_.end()) return it->second;
  }
  uint64_t state = seed_ ^ fnv1a64(token);
  std::vector<double> v(dimension_);
  // Box-Muller from two uniforms; avoids stdlib distribution differences.
  for (int i = 0; i < dimension_; i += 2) {
    double u1 = next_unit_double(state);
    double u2 = next_unit_double(state);
    if (u1 < 1e-300) u1 = 1e-300;
    double radius = std::sqrt(-2.0 * std::log(u1));
    v[i] = radius * std::cos(2.0 * M_PI * u2);
    if (i + 1 < dimension_) v[i + 1] = radius * std::sin(2.0 * M_PI * u2);
  }
  double length = norm(v);
  if (length > 0.0) {
    for (double& x : v) x /= length;
  }
  std::lock_guard lock(mutex_);
  return cache_.emplace(token, std::move(v)).first->second;
}

ServiceEmbeddingProvider::ServiceEmbeddingProvider(llm::Transport& transport,
                                                   std::string model_id,
                                                   int dimension)
    : transport_(transport), model_id_(std::move(model_id)), dimension_(dimension) {}

std::vector<double> ServiceEmbeddingProvider::embed(const std::string& token) const {
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(token);
    if (it != cache_.end()) return it->second;
  }
  nlohmann::ordered_json body;
  body["model"] = model_id_;
  body["input"] = nlohmann::ordered_json::array({token});
  llm::HttpRequest request{"/embeddings", {}, body.dump()};
  llm::HttpResponse response = transport_.post(request);
  if (response.status != 200)
    throw llm::TransportError("embedding request failed: HTTP " +
                              std::to_string(response.status));
  std::vector<double> v;
  try {
    auto j = nlohmann::ordered_json::parse(response.body);
    for (const auto& x : j.at("data").at(0).at("embedding"))
      v.push_back(x.get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw llm::TransportError(std::string("malformed embedding response: ") +
                              e.what());
  }
  if (static_cast<int>(v.size()) != dimension_)
    throw llm::TransportError("embedding dimension mismatch");
  std::lock_guard lock(mutex_);
  return cache_.emplace(token, std::move(v)).first->second;
}

// ---------------------------------------------------------------------------
// Scores
// ---------------------------------------------------------------------------

MatchScore greedy_match_tokens(std::span<const std::string> candidate,
                               std::span<const std::string> reference,
                               const EmbeddingProvider& provider) {
  if (candidate.empty() || reference.empty())
    throw EmptyText("greedy matching requires non-empty token lists");
  std::vector<std::vector<double>> ce;
  std::vector<std::vector<double>> re;
  ce.reserve(candidate.size());
  re.reserve(reference.size());
  for (const auto& t : candidate) ce.push_back(provider.embed(t));
  for (const auto& t : reference) re.push_back(provider.embed(t));

  MatchScore score;
  double sum = 0.0;
  for (const auto& c : ce) {
    double best = -1.0;
    for (const auto& r : re) best = std::max(best, cosine(c, r));
    sum += best;
  }
  score.precision = sum / static_cast<double>(ce.size());
  sum = 0.0;
  for (const auto& r : re) {
    double best = -1.0;
    for (const auto& c : ce) best = std::max(best, cosine(r, c));
    sum += best;
  }
  score.recall = sum / static_cast<double>(re.size());
  double denominator = score.precision + score.recall;
  score.f1 = denominator != 0.0
                 ? 2.0 * score.precision * score.recall / denominator
                 : 0.0;
  return score;
}

MatchScore greedy_match_score(std::string_view candidate,
                              std::string_view reference,
                              const EmbeddingProvider& provider) {
  std::vector<std::string> ct = tokenize(candidate);
  std::vector<std::string> rt = tokenize(reference);
  return greedy_match_tokens(ct, rt, provider);
}

double truncate4(double x) {
  double scaled = x * 10000.0;
  double adjusted = scaled >= 0.0 ? std::floor(scaled + 1e-9)
                                  : std::ceil(scaled - 1e-9);
  return adjusted / 10000.0;
}

double combined_score(double cosine_value, double f1) {
  return truncate4((cosine_value + f1) / 2.0);
}

TextStats text_stats(std::string_view text) {
  // Statistics are computed over the trimmed text.
  size_t begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos)
    throw EmptyText("text_stats requires non-blank text");
  size_t end = text.find_last_not_of(" \t\r\n");
  std::string_view trimmed = text.substr(begin, end - begin + 1);

  TextStats stats;
  stats.word_count = count_words(trimmed);
  stats.char_count = static_cast<int>(trimmed.size());

  bool in_terminal = false;
  for (char c : trimmed) {
    bool terminal = c == '.' || c == '!' || c == '?';
    if (terminal && !in_terminal) ++stats.sentence_count;
    in_terminal = terminal;
  }
  if (stats.sentence_count == 0) stats.sentence_count = 1;
  stats.words_per_sentence =
      static_cast<double>(stats.word_count) / stats.sentence_count;

  std::set<std::string> distinct;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      distinct.insert(current);
      current.clear();
    }
  };
  for (char c : trimmed) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (std::isalnum(static_cast<unsigned char>(c))) {
      current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  flush();
  stats.ttr = stats.word_count > 0
                  ? static_cast<double>(distinct.size()) / stats.word_count
                  : 0.0;
  return stats;
}

MetricScore score_summary(const Summary& candidate, const Summary& reference,
                          const EmbeddingProvider& provider) {
  MetricScore score;
  score.file_id = candidate.file_id;
  score.generator = candidate.generator;
  score.variant = candidate.variant;
  score.iteration = candidate.iteration;
  score.cosine = cosine_similarity(candidate.text, reference.text);
  MatchScore match = greedy_match_score(candidate.text, reference.text, provider);
  score.bert_precision = match.precision;
  score.bert_recall = match.recall;
  score.bert_f1 = match.f1;
  score.combined = combined_score(score.cosine, score.bert_f1);
  return score;
}

}  // namespace dps::metrics

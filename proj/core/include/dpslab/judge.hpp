#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpslab/errors.hpp"
#include "dpslab/llm_client.hpp"
#include "dpslab/summary.hpp"

namespace dps::judge {

enum class Criterion { Accuracy, Conciseness, Adequacy, CodeContext, DesignPattern };

inline constexpr std::array<Criterion, 5> kAllCriteria = {
    Criterion::Accuracy, Criterion::Conciseness, Criterion::Adequacy,
    Criterion::CodeContext, Criterion::DesignPattern,
};

std::string to_string(Criterion c);
Criterion criterion_from_string(const std::string& s);

// One-line definition included in the ranking prompt.
std::string criterion_definition(Criterion c);

class DuplicateGenerator : public Error {
 public:
  explicit DuplicateGenerator(const std::string& message) : Error(message) {}
};

// Assignment of candidate generators to the blinded labels A, B, C.
struct LabelPermutation {
  std::array<Generator, 3> by_label = {Generator::NLG, Generator::SWUM,
                                       Generator::LLM};

  Generator generator_for(char label) const;
  // "A:NLG|B:SWUM|C:LLM"
  std::string encode() const;
  static LabelPermutation decode(const std::string& encoded);

  bool operator==(const LabelPermutation&) const = default;
};

// Deterministic label shuffle seeded per (file_id, criterion); reruns with
// the same seed reproduce the same blinding.
LabelPermutation label_permutation(const std::string& file_id, Criterion c,
                                   uint64_t seed);

// Builds the ranking prompt: reference first, candidates as Summary A/B/C in
// permuted order, the named criterion, and the strict response grammar
// "1. <label>\n2. <label>\n3. <label>". Template frozen in
// docs/judge-prompt.md. Throws DuplicateGenerator unless the candidates
// contain exactly one summary per generator.
llm::PromptBundle build_ranking_prompt(const Summary& reference,
                                       std::span<const Summary> candidates,
                                       Criterion criterion,
                                       const LabelPermutation& permutation,
                                       std::string model_id);

struct RankingRecord {
  std::string file_id;
  Criterion criterion = Criterion::Accuracy;
  int iteration = 1;
  LabelPermutation permutation;
  // Generator -> rank in {1,2,3}; meaningful only when valid.
  std::map<Generator, int> ranks;
  bool valid = false;
  std::string raw_response;
};

// Parses a judge response against the strict grammar. Malformed responses
// (ties, repeats, extra text) yield valid=false with the raw text retained;
// parsing itself never fails.
RankingRecord parse_ranking(std::string_view response,
                            const LabelPermutation& permutation);

struct GeneratorCounts {
  int first = 0;
  int second = 0;
  int third = 0;
};

struct RankingTable {
  std::map<Criterion, std::map<Generator, GeneratorCounts>> counts;
  std::map<Criterion, int> valid_total;
  // Mean on the 3-2-1 scale (rank 1 -> 3 points), per criterion and pooled.
  std::map<Criterion, std::map<Generator, double>> mean_score;
  std::map<Generator, double> overall_mean_score;
  int overall_valid = 0;
};

// Aggregates valid records only; invalid records never change any count.
RankingTable aggregate(std::span<const RankingRecord> records);

}  // namespace dps::judge

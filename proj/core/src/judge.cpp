#include "dpslab/judge.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace dps::judge {
namespace {

uint64_t fnv1a64(std::string_view s) {
  uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : s) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

const std::string_view kJudgeSystemPrompt =
    "You are an impartial software documentation judge. You compare candidate "
    "summaries of a Java class against a human-written reference summary and "
    "rank them on a single criterion. Respond with exactly three lines of the "
    "form '1. <label>', '2. <label>', '3. <label>', ranking the summaries "
    "from best to worst. Use each of the labels A, B and C exactly once. Ties "
    "are not permitted. Do not add any other text.";

}  // namespace

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::Accuracy:
      return "Accuracy";
    case Criterion::Conciseness:
      return "Conciseness";
    case Criterion::Adequacy:
      return "Adequacy";
    case Criterion::CodeContext:
      return "CodeContext";
    case Criterion::DesignPattern:
      return "DesignPattern";
  }
  return "Accuracy";
}

Criterion criterion_from_string(const std::string& s) {
  for (Criterion c : kAllCriteria) {
    if (s == to_string(c)) return c;
  }
  throw Error("unknown criterion: " + s);
}

std::string criterion_definition(Criterion c) {
  switch (c) {
    case Criterion::Accuracy:
      return "factual correctness of the summary's statements about the class, "
             "judged against the reference";
    case Criterion::Conciseness:
      return "brevity of the summary without loss of essential meaning";
    case Criterion::Adequacy:
      return "coverage of the essential information a reader needs about the "
             "class";
    case Criterion::CodeContext:
      return "awareness of how the class relates to its collaborators and "
             "usage context";
    case Criterion::DesignPattern:
      return "fidelity in describing the class's design-pattern role and "
             "relationships";
  }
  return "";
}

Generator LabelPermutation::generator_for(char label) const {
  switch (label) {
    case 'A':
      return by_label[0];
    case 'B':
      return by_label[1];
    case 'C':
      return by_label[2];
    default:
      throw Error(std::string("unknown label: ") + label);
  }
}

std::string LabelPermutation::encode() const {
  std::string out;
  const char* labels = "ABC";
  for (int i = 0; i < 3; ++i) {
    if (i > 0) out += "|";
    out += std::string(1, labels[i]) + ":" + dps::to_string(by_label[i]);
  }
  return out;
}

LabelPermutation LabelPermutation::decode(const std::string& encoded) {
  LabelPermutation p;
  std::istringstream in(encoded);
  std::string part;
  int i = 0;
  while (std::getline(in, part, '|') && i < 3) {
    auto colon = part.find(':');
    if (colon == std::string::npos || colon + 1 >= part.size())
      throw Error("malformed permutation encoding: " + encoded);
    p.by_label[i] = generator_from_string(part.substr(colon + 1));
    ++i;
  }
  if (i != 3) throw Error("malformed permutation encoding: " + encoded);
  return p;
}

LabelPermutation label_permutation(const std::string& file_id, Criterion c,
                                   uint64_t seed) {
  uint64_t state = seed;
  state ^= fnv1a64(file_id);
  state ^= fnv1a64(to_string(c)) << 1;
  LabelPermutation p;
  p.by_label = {Generator::NLG, Generator::SWUM, Generator::LLM};
  // Fisher-Yates with a platform-stable generator.
  for (int i = 2; i > 0; --i) {
    int j = static_cast<int>(splitmix64(state) % static_cast<uint64_t>(i + 1));
    std::swap(p.by_label[i], p.by_label[j]);
  }
  return p;
}

llm::PromptBundle build_ranking_prompt(const Summary& reference,
                                       std::span<const Summary> candidates,
                                       Criterion criterion,
                                       const LabelPermutation& permutation,
                                       std::string model_id) {
  if (candidates.size() != 3)
    throw DuplicateGenerator("exactly three candidate summaries are required");
  std::set<Generator> seen;
  for (const auto& s : candidates) {
    if (s.generator == Generator::Human)
      throw DuplicateGenerator("reference summaries cannot be ranked");
    if (!seen.insert(s.generator).second)
      throw DuplicateGenerator("two candidates share generator " +
                               dps::to_string(s.generator));
  }

  auto candidate_for = [&candidates](Generator g) -> const Summary& {
    for (const auto& s : candidates) {
      if (s.generator == g) return s;
    }
    throw DuplicateGenerator("candidate set is missing a generator");
  };

  std::string user;
  user += "Criterion: " + to_string(criterion) + " - " +
          criterion_definition(criterion) + "\n\n";
  user += "Reference summary:\n" + reference.text + "\n\n";
  const char* labels = "ABC";
  for (int i = 0; i < 3; ++i) {
    user += std::string("Summary ") + labels[i] + ":\n" +
            candidate_for(permutation.by_label[i]).text + "\n\n";
  }
  user += "Rank the three summaries from best to worst on the criterion "
          "above. Respond with exactly three lines:\n1. <label>\n2. <label>\n"
          "3. <label>";

  llm::PromptBundle bundle;
  bundle.system_text = std::string(kJudgeSystemPrompt);
  bundle.user_text = std::move(user);
  bundle.model_id = std::move(model_id);
  bundle.variant = Variant::Default;
  bundle.file_id = reference.file_id;
  return bundle;
}

RankingRecord parse_ranking(std::string_view response,
                            const LabelPermutation& permutation) {
  RankingRecord record;
  record.permutation = permutation;
  record.raw_response = std::string(response);
  record.valid = false;

  // Strict grammar: after trimming, exactly three lines "N. <label>" with
  // N = 1, 2, 3 in order and labels a permutation of {A, B, C}.
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in{std::string(response)};
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto begin = line.find_first_not_of(" \t");
    auto end = line.find_last_not_of(" \t");
    if (begin == std::string::npos) {
      line.clear();
    } else {
      line = line.substr(begin, end - begin + 1);
    }
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.size() != 3) return record;

  std::set<char> seen;
  std::map<Generator, int> ranks;
  for (int i = 0; i < 3; ++i) {
    const std::string& l = lines[i];
    if (l.size() != 4 || l[0] != static_cast<char>('1' + i) || l[1] != '.' ||
        l[2] != ' ') {
      return record;
    }
    char label = l[3];
    if (label != 'A' && label != 'B' && label != 'C') return record;
    if (!seen.insert(label).second) return record;
    ranks[permutation.generator_for(label)] = i + 1;
  }
  record.ranks = std::move(ranks);
  record.valid = true;
  return record;
}

RankingTable aggregate(std::span<const RankingRecord> records) {
  RankingTable table;
  std::map<Criterion, std::map<Generator, int>> score_sums;
  std::map<Generator, int> overall_sums;
  for (const auto& record : records) {
    if (!record.valid) continue;
    ++table.valid_total[record.criterion];
    ++table.overall_valid;
    for (const auto& [generator, rank] : record.ranks) {
      GeneratorCounts& c = table.counts[record.criterion][generator];
      if (rank == 1) ++c.first;
      if (rank == 2) ++c.second;
      if (rank == 3) ++c.third;
      score_sums[record.criterion][generator] += 4 - rank;
      overall_sums[generator] += 4 - rank;
    }
  }
  for (const auto& [criterion, per_generator] : score_sums) {
    int total = table.valid_total[criterion];
    for (const auto& [generator, sum] : per_generator) {
      table.mean_score[criterion][generator] =
          total > 0 ? static_cast<double>(sum) / total : 0.0;
    }
  }
  for (const auto& [generator, sum] : overall_sums) {
    table.overall_mean_score[generator] =
        table.overall_valid > 0
            ? static_cast<double>(sum) / table.overall_valid
            : 0.0;
  }
  return table;
}

}  // namespace dps::judge

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpslab/errors.hpp"
#include "dpslab/pattern_roles.hpp"
#include "dpslab/summary.hpp"

namespace dps::swum {

class NoVerb : public Error {
 public:
  explicit NoVerb(const std::string& message) : Error(message) {}
};

// Curated list of programming verbs; immutable after construction.
class VerbLexicon {
 public:
  // Compiled-in copy of data/verbs.txt.
  static const VerbLexicon& builtin();

  // One lowercase verb per line, '#' starts a comment.
  static VerbLexicon parse(std::string_view text);
  static VerbLexicon load_file(const std::filesystem::path& path);

  bool contains(std::string_view token) const;
  const std::vector<std::string>& verbs() const { return verbs_; }

 private:
  std::vector<std::string> verbs_;  // sorted, unique
};

// Splits an identifier at camel boundaries, acronym runs, digits and
// underscores; tokens are lowercased. "parseHTTPResponse" ->
// ["parse", "http", "response"].
std::vector<std::string> split_identifier(std::string_view name);

struct ActionPhrase {
  std::string verb;  // lowercase, non-empty
  std::optional<std::string> direct_object;
  std::optional<std::string> preposition;
  std::optional<std::string> prep_object;

  bool operator==(const ActionPhrase&) const = default;
};

// Extracts verb / object / theme structure from a method name.
// Throws NoVerb when the first token is not a known verb.
ActionPhrase analyze_method_name(const std::string& name,
                                 const VerbLexicon& lexicon = VerbLexicon::builtin());

// Non-throwing variant used by the realizer.
std::optional<ActionPhrase> try_analyze_method_name(
    const std::string& name,
    const VerbLexicon& lexicon = VerbLexicon::builtin());

// One-sentence realizer:
//   "The <Class> class acts as a <role> in the <pattern> pattern and provides
//    methods to <verbs>[ for managing <theme>]."
// The verb list collects every lexicon verb among each method name's tokens,
// in declaration order, duplicates retained.
Summary realize(const roles::EnrichedFacts& enriched,
                const VerbLexicon& lexicon = VerbLexicon::builtin());

}  // namespace dps::swum

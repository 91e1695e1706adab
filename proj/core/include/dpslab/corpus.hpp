#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dpslab/errors.hpp"
#include "dpslab/pattern_roles.hpp"
#include "dpslab/summary.hpp"

namespace dps::corpus {

class EmptyCorpus : public Error {
 public:
  explicit EmptyCorpus(const std::string& message) : Error(message) {}
};

class LayoutError : public Error {
 public:
  explicit LayoutError(const std::string& message) : Error(message) {}
};

enum class Repository { EducationalA, EducationalB, Commercial };

std::string to_string(Repository r);
Repository repository_from_string(const std::string& s);

// One corpus file: `corpus/<repo>/<file_id>.java` with sibling
// `<file_id>.pattern.json` and `<file_id>.reference.txt`.
struct CorpusEntry {
  std::string file_id;
  std::filesystem::path source_path;
  std::filesystem::path annotation_path;
  std::filesystem::path reference_path;
  Summary reference_summary;  // generator = Human
  roles::PatternKind pattern = roles::PatternKind::Singleton;
  Repository repository = Repository::EducationalA;
};

struct IngestResult {
  std::vector<CorpusEntry> entries;  // sorted by file_id
  std::vector<std::string> diagnostics;  // excluded files, with reasons
};

// Scans the corpus layout. Files with a missing or unparsable source,
// annotation or reference are reported in diagnostics and excluded.
// Throws LayoutError if the root is missing, EmptyCorpus if nothing survives.
IngestResult ingest_corpus(const std::filesystem::path& root);

}  // namespace dps::corpus

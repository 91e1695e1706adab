#include "dpslab/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "dpslab/code_facts.hpp"

namespace dps::corpus {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

std::string to_string(Repository r) {
  switch (r) {
    case Repository::EducationalA:
      return "educational_a";
    case Repository::EducationalB:
      return "educational_b";
    case Repository::Commercial:
      return "commercial";
  }
  return "educational_a";
}

Repository repository_from_string(const std::string& s) {
  if (s == "educational_a") return Repository::EducationalA;
  if (s == "educational_b") return Repository::EducationalB;
  if (s == "commercial") return Repository::Commercial;
  throw LayoutError("unknown repository directory: " + s);
}

IngestResult ingest_corpus(const fs::path& root) {
  if (!fs::is_directory(root))
    throw LayoutError("corpus root does not exist: " + root.string());

  IngestResult result;
  std::set<std::string> seen_ids;
  bool any_repo = false;
  for (Repository repo : {Repository::EducationalA, Repository::EducationalB,
                          Repository::Commercial}) {
    fs::path dir = root / to_string(repo);
    if (!fs::is_directory(dir)) continue;
    any_repo = true;

    std::vector<fs::path> sources;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".java")
        sources.push_back(entry.path());
    }
    std::sort(sources.begin(), sources.end());

    for (const auto& source : sources) {
      std::string file_id = source.stem().string();
      fs::path annotation = dir / (file_id + ".pattern.json");
      fs::path reference = dir / (file_id + ".reference.txt");
      auto exclude = [&](const std::string& reason) {
        result.diagnostics.push_back(file_id + ": " + reason + " (excluded)");
      };
      if (!seen_ids.insert(file_id).second) {
        exclude("duplicate file_id across repositories");
        continue;
      }
      if (!fs::is_regular_file(annotation)) {
        exclude("missing " + annotation.filename().string());
        continue;
      }
      if (!fs::is_regular_file(reference)) {
        exclude("missing " + reference.filename().string());
        continue;
      }
      CorpusEntry e;
      e.file_id = file_id;
      e.source_path = source;
      e.annotation_path = annotation;
      e.reference_path = reference;
      e.repository = repo;
      try {
        facts::parse_source(slurp(source), file_id);
        roles::PatternAnnotation a = roles::read_annotation(slurp(annotation));
        e.pattern = a.pattern;
        std::string text = trim(slurp(reference));
        if (text.empty()) {
          exclude("empty reference summary");
          continue;
        }
        e.reference_summary = make_summary(file_id, Generator::Human,
                                           Variant::Default, 1, text);
      } catch (const Error& err) {
        exclude(err.what());
        continue;
      }
      result.entries.push_back(std::move(e));
    }
  }
  if (!any_repo)
    throw LayoutError("no repository directories under " + root.string() +
                      " (expected educational_a, educational_b or commercial)");
  std::sort(result.entries.begin(), result.entries.end(),
            [](const CorpusEntry& a, const CorpusEntry& b) {
              return a.file_id < b.file_id;
            });
  if (result.entries.empty())
    throw EmptyCorpus("corpus contains no usable entries");
  return result;
}

}  // namespace dps::corpus

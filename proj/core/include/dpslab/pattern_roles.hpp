#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dpslab/code_facts.hpp"
#include "dpslab/errors.hpp"

namespace dps::roles {

enum class PatternKind {
  Adapter,
  Visitor,
  Observer,
  Memento,
  Facade,
  Decorator,
  AbstractFactory,
  FactoryMethod,
  Singleton,
};

inline constexpr std::array<PatternKind, 9> kAllPatterns = {
    PatternKind::Adapter,   PatternKind::Visitor,
    PatternKind::Observer,  PatternKind::Memento,
    PatternKind::Facade,    PatternKind::Decorator,
    PatternKind::AbstractFactory, PatternKind::FactoryMethod,
    PatternKind::Singleton,
};

class UnknownPattern : public Error {
 public:
  explicit UnknownPattern(const std::string& message) : Error(message) {}
};

class UnknownRole : public Error {
 public:
  explicit UnknownRole(const std::string& message) : Error(message) {}
};

class DanglingCollaborator : public Error {
 public:
  explicit DanglingCollaborator(const std::string& message) : Error(message) {}
};

// Canonical name, e.g. "AbstractFactory".
std::string to_string(PatternKind kind);

// Human-facing name, e.g. "Abstract Factory".
std::string display_name(PatternKind kind);

// Accepts canonical and display spellings.
PatternKind pattern_from_string(const std::string& s);

// Fixed role vocabulary for a pattern; non-empty.
const std::vector<std::string>& role_vocabulary(PatternKind pattern);

struct PatternAnnotation {
  PatternKind pattern = PatternKind::Singleton;
  std::string focal_role;
  // Insertion-ordered role -> collaborating type names.
  std::vector<std::pair<std::string, std::vector<std::string>>> collaborators;
  // Additional pattern labels beyond the primary one; retained, not realized.
  std::vector<PatternKind> secondary_patterns;

  bool operator==(const PatternAnnotation&) const = default;
};

struct EnrichedFacts {
  facts::CodeFacts facts;
  PatternAnnotation annotation;
};

// Parses a `<file_id>.pattern.json` document. The `pattern` key holds either
// one name or a list whose first entry is the primary pattern.
PatternAnnotation read_annotation(std::string_view json_bytes);

std::string write_annotation(const PatternAnnotation& annotation);

// Validates the annotation against the pattern's role vocabulary and the
// facts, then attaches it. The facts themselves are never altered.
// Throws UnknownRole or DanglingCollaborator.
EnrichedFacts enrich(facts::CodeFacts facts, PatternAnnotation annotation);

}  // namespace dps::roles

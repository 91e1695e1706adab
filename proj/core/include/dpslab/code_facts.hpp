#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpslab/errors.hpp"

namespace dps::facts {

enum class TypeKind { Class, Interface, EnumType };

std::string to_string(TypeKind kind);
TypeKind type_kind_from_string(const std::string& s);

struct Parameter {
  std::string name;
  std::string type;

  bool operator==(const Parameter&) const = default;
};

struct MethodFact {
  std::string name;
  std::string return_type;  // empty for constructors
  std::vector<Parameter> parameters;
  // Java modifiers in canonical order, then annotations as "@Name".
  std::vector<std::string> modifiers;
  bool is_override = false;

  bool operator==(const MethodFact&) const = default;
};

struct FieldFact {
  std::string name;
  std::string type;
  std::vector<std::string> modifiers;

  bool operator==(const FieldFact&) const = default;
};

struct CallEdge {
  std::string caller;
  std::string callee;

  bool operator==(const CallEdge&) const = default;
};

struct OverrideFact {
  std::string method;
  std::string declaring_type;

  bool operator==(const OverrideFact&) const = default;
};

// Structural facts for one Java source file holding a single top-level type.
struct CodeFacts {
  std::string file_id;
  std::string package_name;  // empty for the default package
  std::string type_name;
  TypeKind kind = TypeKind::Class;
  std::vector<std::string> modifiers;  // subset of public/abstract/final/static
  std::optional<std::string> extends_type;
  std::vector<std::string> implements_types;
  std::vector<std::string> imports;
  std::vector<FieldFact> fields;
  std::vector<MethodFact> constructors;
  std::vector<MethodFact> methods;
  std::vector<CallEdge> call_edges;  // both endpoints declared in `methods`
  std::vector<OverrideFact> overrides;
  std::vector<std::string> nested_types;

  bool operator==(const CodeFacts&) const = default;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column);

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class MultipleTopLevelTypes : public Error {
 public:
  explicit MultipleTopLevelTypes(const std::string& message) : Error(message) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& message) : Error(message) {}
};

// Parses one Java compilation unit into CodeFacts. Pure: identical input
// yields identical output. Throws ParseError or MultipleTopLevelTypes.
CodeFacts parse_source(std::string_view source, std::string file_id);

// Serializes facts to the canonical UTF-8 JSON document. Key order and
// formatting are deterministic; `read_facts_document` is its inverse.
std::string write_facts_document(const CodeFacts& facts);

// Parses a facts document. Throws SchemaError on missing/extra/ill-typed
// fields or invariant violations.
CodeFacts read_facts_document(std::string_view bytes);

// Validates CodeFacts invariants, throwing SchemaError on breach.
void validate(const CodeFacts& facts);

}  // namespace dps::facts

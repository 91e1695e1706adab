#include "dpslab/pattern_roles.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"

namespace dps::roles {
namespace {

using ordered_json = nlohmann::ordered_json;

const std::map<PatternKind, std::vector<std::string>>& vocabularies() {
  // GoF participant names. AbstractFactory additionally accepts
  // product_interface for annotations that name the created family interface.
  static const std::map<PatternKind, std::vector<std::string>> table = {
      {PatternKind::Adapter, {"target", "adapter", "adaptee"}},
      {PatternKind::Visitor, {"visitor", "element"}},
      {PatternKind::Observer, {"publisher", "subscriber"}},
      {PatternKind::Memento, {"originator", "memento", "caretaker"}},
      {PatternKind::Facade, {"facade", "subsystem"}},
      {PatternKind::Decorator, {"component", "decorator"}},
      {PatternKind::AbstractFactory, {"factory", "product", "product_interface"}},
      {PatternKind::FactoryMethod, {"factory", "product"}},
      {PatternKind::Singleton, {"singleton"}},
  };
  return table;
}

}  // namespace

std::string to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::Adapter:
      return "Adapter";
    case PatternKind::Visitor:
      return "Visitor";
    case PatternKind::Observer:
      return "Observer";
    case PatternKind::Memento:
      return "Memento";
    case PatternKind::Facade:
      return "Facade";
    case PatternKind::Decorator:
      return "Decorator";
    case PatternKind::AbstractFactory:
      return "AbstractFactory";
    case PatternKind::FactoryMethod:
      return "FactoryMethod";
    case PatternKind::Singleton:
      return "Singleton";
  }
  return "Singleton";
}

std::string display_name(PatternKind kind) {
  switch (kind) {
    case PatternKind::AbstractFactory:
      return "Abstract Factory";
    case PatternKind::FactoryMethod:
      return "Factory Method";
    default:
      return to_string(kind);
  }
}

PatternKind pattern_from_string(const std::string& s) {
  for (PatternKind kind : kAllPatterns) {
    if (s == to_string(kind) || s == display_name(kind)) return kind;
  }
  throw UnknownPattern("unknown design pattern: " + s);
}

const std::vector<std::string>& role_vocabulary(PatternKind pattern) {
  return vocabularies().at(pattern);
}

PatternAnnotation read_annotation(std::string_view json_bytes) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_bytes);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid annotation document: ") + e.what());
  }
  if (!j.is_object() || !j.contains("pattern") || !j.contains("focal_role") ||
      !j.contains("collaborators")) {
    throw Error("annotation must contain pattern, focal_role and collaborators");
  }
  PatternAnnotation a;
  if (j["pattern"].is_string()) {
    a.pattern = pattern_from_string(j["pattern"].get<std::string>());
  } else if (j["pattern"].is_array() && !j["pattern"].empty()) {
    bool first = true;
    for (const auto& p : j["pattern"]) {
      if (!p.is_string()) throw Error("pattern entries must be strings");
      PatternKind kind = pattern_from_string(p.get<std::string>());
      if (first) {
        a.pattern = kind;
        first = false;
      } else {
        a.secondary_patterns.push_back(kind);
      }
    }
  } else {
    throw Error("pattern must be a name or a non-empty list of names");
  }
  if (!j["focal_role"].is_string()) throw Error("focal_role must be a string");
  a.focal_role = j["focal_role"].get<std::string>();
  if (!j["collaborators"].is_object())
    throw Error("collaborators must be an object");
  for (auto it = j["collaborators"].begin(); it != j["collaborators"].end(); ++it) {
    if (!it.value().is_array())
      throw Error("collaborator entries must be arrays of type names");
    std::vector<std::string> names;
    for (const auto& v : it.value()) {
      if (!v.is_string()) throw Error("collaborator names must be strings");
      names.push_back(v.get<std::string>());
    }
    a.collaborators.emplace_back(it.key(), std::move(names));
  }
  return a;
}

std::string write_annotation(const PatternAnnotation& annotation) {
  ordered_json j;
  if (annotation.secondary_patterns.empty()) {
    j["pattern"] = to_string(annotation.pattern);
  } else {
    ordered_json list = ordered_json::array();
    list.push_back(to_string(annotation.pattern));
    for (PatternKind kind : annotation.secondary_patterns)
      list.push_back(to_string(kind));
    j["pattern"] = std::move(list);
  }
  j["focal_role"] = annotation.focal_role;
  ordered_json collab = ordered_json::object();
  for (const auto& [role, names] : annotation.collaborators) collab[role] = names;
  j["collaborators"] = std::move(collab);
  return j.dump(2) + "\n";
}

EnrichedFacts enrich(facts::CodeFacts facts, PatternAnnotation annotation) {
  const auto& vocabulary = role_vocabulary(annotation.pattern);
  auto known = [&vocabulary](const std::string& role) {
    return std::find(vocabulary.begin(), vocabulary.end(), role) !=
           vocabulary.end();
  };
  if (!known(annotation.focal_role)) {
    throw UnknownRole("focal role '" + annotation.focal_role +
                      "' is not in the " + to_string(annotation.pattern) +
                      " vocabulary");
  }
  std::set<std::string> methods;
  for (const auto& m : facts.methods) methods.insert(m.name);
  std::set<std::string> nested(facts.nested_types.begin(),
                               facts.nested_types.end());

  for (const auto& [role, names] : annotation.collaborators) {
    if (!known(role)) {
      throw UnknownRole("collaborator role '" + role + "' is not in the " +
                        to_string(annotation.pattern) + " vocabulary");
    }
    for (const auto& name : names) {
      // Intra-file references take two verifiable shapes: "Outer.Nested"
      // qualified by the focal type, and "method()" naming a declared method.
      // Anything else is an opaque extra-file collaborator.
      std::string prefix = facts.type_name + ".";
      if (name.rfind(prefix, 0) == 0) {
        std::string inner = name.substr(prefix.size());
        if (!nested.count(inner)) {
          throw DanglingCollaborator("collaborator '" + name +
                                     "' names a nested type not declared in " +
                                     facts.type_name);
        }
      } else if (name.size() > 2 && name.ends_with("()")) {
        std::string method = name.substr(0, name.size() - 2);
        if (!methods.count(method)) {
          throw DanglingCollaborator("collaborator '" + name +
                                     "' names a method not declared in " +
                                     facts.type_name);
        }
      }
    }
  }
  return EnrichedFacts{std::move(facts), std::move(annotation)};
}

}  // namespace dps::roles

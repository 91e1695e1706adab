#include "dpslab/nlg_generator.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

namespace dps::nlg {
namespace {

using facts::CodeFacts;
using facts::MethodFact;
using roles::EnrichedFacts;
using roles::PatternKind;

std::string indefinite_article(const std::string& noun) {
  if (noun.empty()) return "a";
  switch (noun.front()) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
      return "an";
    default:
      return "a";
  }
}

// "a", "a and b", "a, b and c"
std::string join_and(const std::vector<std::string>& items) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += (i + 1 == items.size()) ? " and " : ", ";
    out += items[i];
  }
  return out;
}

std::string join_commas(const std::vector<std::string>& items) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += items[i];
  }
  return out;
}

// Type references are realized with generic arguments erased.
std::string erase_generics(const std::string& type) {
  std::string out;
  int depth = 0;
  for (char c : type) {
    if (c == '<') {
      ++depth;
      continue;
    }
    if (c == '>') {
      --depth;
      continue;
    }
    if (depth == 0) out += c;
  }
  return out;
}

// Third-person singular inflection used by the Observer clauses
// (subscribe -> subscribes, notify -> notifies).
std::string third_person(const std::string& verb) {
  if (verb.empty()) return verb;
  auto ends_with = [&verb](std::string_view suffix) {
    return verb.size() >= suffix.size() &&
           verb.compare(verb.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  auto is_vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
  };
  if (verb.back() == 'y' && verb.size() >= 2 && !is_vowel(verb[verb.size() - 2]))
    return verb.substr(0, verb.size() - 1) + "ies";
  if (ends_with("s") || ends_with("x") || ends_with("z") || ends_with("ch") ||
      ends_with("sh"))
    return verb + "es";
  return verb + "s";
}

// Role word realized before the collaborator type. Factory patterns name the
// created interface directly; the Observer collaborator is worded "observer".
std::string realized_role_word(PatternKind pattern, const std::string& role) {
  if (pattern == PatternKind::AbstractFactory ||
      pattern == PatternKind::FactoryMethod) {
    return "";
  }
  if (pattern == PatternKind::Observer && role == "subscriber") return "observer";
  return role;
}

std::string pattern_role_sentence(const EnrichedFacts& enriched) {
  const CodeFacts& facts = enriched.facts;
  const auto& annotation = enriched.annotation;

  std::vector<std::string> clauses;
  std::string head = facts.type_name + " acts as " +
                     indefinite_article(annotation.focal_role) + " " +
                     annotation.focal_role;
  if (!annotation.collaborators.empty()) {
    const auto& [role, names] = annotation.collaborators.front();
    if (!names.empty()) {
      std::string word = realized_role_word(annotation.pattern, role);
      head += " for ";
      if (!word.empty()) head += word + " ";
      std::vector<std::string> erased;
      for (const auto& n : names) erased.push_back(erase_generics(n));
      head += join_and(erased);
    }
  }
  clauses.push_back(std::move(head));

  if (!facts.overrides.empty()) {
    std::vector<std::string> items;
    for (const auto& o : facts.overrides)
      items.push_back(o.method + " method of " + erase_generics(o.declaring_type));
    clauses.push_back("which overrides " + join_commas(items));
  }

  switch (annotation.pattern) {
    case PatternKind::Adapter: {
      // "which adapts to X": the adaptation target is the focal class when it
      // plays the target role, otherwise the annotated target collaborator.
      std::string target = facts.type_name;
      if (annotation.focal_role != "target") {
        for (const auto& [role, names] : annotation.collaborators) {
          if (role == "target" && !names.empty()) {
            target = erase_generics(names.front());
            break;
          }
        }
      }
      clauses.push_back("which adapts to " + target);
      break;
    }
    case PatternKind::Observer: {
      clauses.push_back("which is inherited by");
      static const std::vector<std::string> subscription_methods = {
          "subscribe", "unsubscribe", "notify"};
      for (const auto& m : facts.methods) {
        if (std::find(subscription_methods.begin(), subscription_methods.end(),
                      m.name) == subscription_methods.end()) {
          continue;
        }
        std::string clause = "which " + third_person(m.name);
        std::vector<std::string> params;
        for (const auto& p : m.parameters)
          params.push_back(erase_generics(p.type) + " parameter of " + p.name);
        if (!params.empty()) clause += " " + join_commas(params);
        clauses.push_back(std::move(clause));
      }
      break;
    }
    case PatternKind::Visitor:
    case PatternKind::Memento:
    case PatternKind::Facade:
    case PatternKind::Decorator:
    case PatternKind::AbstractFactory:
    case PatternKind::FactoryMethod:
    case PatternKind::Singleton:
      break;
    default:
      throw UnrealizablePattern("no sentence template for pattern " +
                                roles::to_string(annotation.pattern));
  }

  std::string sentence;
  for (size_t i = 0; i < clauses.size(); ++i) {
    if (i > 0) sentence += ", ";
    sentence += clauses[i];
  }
  return sentence + ".";
}

std::string declaration_sentence(const CodeFacts& facts) {
  std::vector<std::string> words = facts.modifiers;
  switch (facts.kind) {
    case facts::TypeKind::Class:
      words.push_back("class");
      break;
    case facts::TypeKind::Interface:
      words.push_back("interface");
      break;
    case facts::TypeKind::EnumType:
      words.push_back("enum");
      break;
  }
  std::string sentence = "It is " + indefinite_article(words.front());
  for (const auto& w : words) sentence += " " + w;
  bool has_that = false;
  if (facts.extends_type) {
    sentence += " that extends " + erase_generics(*facts.extends_type);
    has_that = true;
  }
  if (!facts.implements_types.empty()) {
    std::vector<std::string> erased;
    for (const auto& t : facts.implements_types)
      erased.push_back(erase_generics(t));
    sentence += has_that ? " and implements " : " that implements ";
    sentence += join_and(erased);
  }
  return sentence + ".";
}

std::string inventory_sentence(const CodeFacts& facts) {
  std::vector<std::string> items;
  for (const auto& m : facts.methods)
    items.push_back(m.name + " (" + erase_generics(m.return_type) + ")");
  if (items.size() == 1) {
    return "The only method of " + facts.type_name + " is " + items.front() + ".";
  }
  return "The " + std::to_string(items.size()) + " methods of " +
         facts.type_name + " are " + join_and(items) + ".";
}

std::string call_sentence(const CodeFacts& facts, const MethodFact& method) {
  // Caller and callee lists follow declaration order of the counterpart.
  std::vector<std::string> callers;
  std::vector<std::string> callees;
  for (const auto& m : facts.methods) {
    for (const auto& e : facts.call_edges) {
      if (e.callee == method.name && e.caller == m.name) callers.push_back(m.name);
      if (e.caller == method.name && e.callee == m.name) callees.push_back(m.name);
    }
  }
  std::string sentence;
  if (callers.empty()) {
    sentence = "No methods call " + method.name;
  } else {
    sentence = join_and(callers) + (callers.size() == 1 ? " calls " : " call ") +
               method.name;
  }
  sentence += " and " + method.name + " calls ";
  sentence += callees.empty() ? "no methods" : join_and(callees);
  return sentence + ".";
}

}  // namespace

Summary realize(const EnrichedFacts& enriched) {
  const CodeFacts& facts = enriched.facts;
  std::vector<std::string> sentences;
  sentences.push_back(pattern_role_sentence(enriched));
  sentences.push_back(declaration_sentence(facts));
  if (!facts.methods.empty()) {
    sentences.push_back(inventory_sentence(facts));
    for (const auto& m : facts.methods)
      sentences.push_back(call_sentence(facts, m));
  }
  std::string text;
  for (size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) text += " ";
    text += sentences[i];
  }
  return make_summary(facts.file_id, Generator::NLG, Variant::Default, 1,
                      std::move(text));
}

}  // namespace dps::nlg

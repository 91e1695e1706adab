#include "dpslab/swum.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace dps::swum {
namespace {

// Mirror of data/verbs.txt; the lexicon-sync unit test keeps them identical.
constexpr std::string_view kBuiltinVerbs[] = {
    "accept",  "add",       "append",    "apply",     "attach",   "begin",
    "build",   "calculate", "call",      "cancel",    "check",    "clear",
    "clone",   "close",     "collect",   "compare",   "compute",  "configure",
    "connect", "convert",   "copy",      "create",    "decode",   "delete",
    "detach",  "disable",   "dispatch",  "display",   "draw",     "emit",
    "enable",  "encode",    "end",       "execute",   "extract",  "fetch",
    "fill",    "filter",    "find",      "fire",      "flush",    "format",
    "generate", "get",      "handle",    "has",       "init",     "initialize",
    "insert",  "invoke",    "is",        "load",      "log",      "lookup",
    "make",    "merge",     "move",      "notify",    "open",     "parse",
    "pop",     "populate",  "print",     "process",   "push",     "put",
    "read",    "receive",   "refresh",   "register",  "release",  "remove",
    "render",  "replace",   "report",    "reset",     "resolve",  "restore",
    "run",     "save",      "send",      "set",       "show",     "sort",
    "start",   "stop",      "store",     "submit",    "test",     "toggle",
    "transform", "translate", "undo",    "update",    "validate", "visit",
    "write",
};

const std::set<std::string>& prepositions() {
  static const std::set<std::string> set = {"for", "to", "from", "by",
                                            "with", "of", "on", "in"};
  return set;
}

// Agentive heads whose theme is the preceding token: EventManager -> event.
const std::set<std::string>& preceding_token_heads() {
  static const std::set<std::string> set = {
      "manager",  "handler", "listener", "controller", "dispatcher",
      "helper",   "builder", "writer",   "reader",     "processor",
      "worker",   "provider", "service",
  };
  return set;
}

// Role-noun heads that are themselves the theme: WindowsOSFactory -> factory.
const std::set<std::string>& self_heads() {
  static const std::set<std::string> set = {
      "factory", "adapter",  "facade",  "decorator", "visitor",
      "observer", "memento", "singleton", "command", "proxy",
      "strategy", "bridge",
  };
  return set;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string join(const std::vector<std::string>& tokens, size_t begin,
                 size_t end, const char* sep = " ") {
  std::string out;
  for (size_t i = begin; i < end && i < tokens.size(); ++i) {
    if (i > begin) out += sep;
    out += tokens[i];
  }
  return out;
}

// Pattern names are realized lowercase except Abstract Factory.
std::string pattern_phrase(roles::PatternKind kind) {
  if (kind == roles::PatternKind::AbstractFactory) return "Abstract Factory";
  return lower(roles::display_name(kind));
}

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

std::optional<std::string> derive_theme(const std::string& type_name) {
  std::vector<std::string> tokens = split_identifier(type_name);
  if (tokens.empty()) return std::nullopt;
  const std::string& head = tokens.back();
  if (preceding_token_heads().count(head)) {
    if (tokens.size() >= 2) return tokens[tokens.size() - 2];
    return std::nullopt;
  }
  if (self_heads().count(head)) return head;
  return std::nullopt;
}

}  // namespace

const VerbLexicon& VerbLexicon::builtin() {
  static const VerbLexicon instance = [] {
    VerbLexicon lex;
    for (std::string_view v : kBuiltinVerbs) lex.verbs_.emplace_back(v);
    std::sort(lex.verbs_.begin(), lex.verbs_.end());
    return lex;
  }();
  return instance;
}

VerbLexicon VerbLexicon::parse(std::string_view text) {
  VerbLexicon lex;
  std::string line;
  std::istringstream in{std::string(text)};
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    auto begin = line.find_first_not_of(" \t\r");
    auto end = line.find_last_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    lex.verbs_.push_back(lower(line.substr(begin, end - begin + 1)));
  }
  std::sort(lex.verbs_.begin(), lex.verbs_.end());
  lex.verbs_.erase(std::unique(lex.verbs_.begin(), lex.verbs_.end()),
                   lex.verbs_.end());
  return lex;
}

VerbLexicon VerbLexicon::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open verb lexicon: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

bool VerbLexicon::contains(std::string_view token) const {
  return std::binary_search(verbs_.begin(), verbs_.end(), token);
}

std::vector<std::string> split_identifier(std::string_view name) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(lower(current));
      current.clear();
    }
  };
  size_t n = name.size();
  for (size_t i = 0; i < n; ++i) {
    char c = name[i];
    if (c == '_' || c == '$') {
      flush();
      continue;
    }
    bool digit = std::isdigit(static_cast<unsigned char>(c)) != 0;
    bool upper = std::isupper(static_cast<unsigned char>(c)) != 0;
    if (!current.empty()) {
      char prev = current.back();
      bool prev_digit = std::isdigit(static_cast<unsigned char>(prev)) != 0;
      bool prev_upper = std::isupper(static_cast<unsigned char>(prev)) != 0;
      if (digit != prev_digit) {
        flush();
      } else if (upper && !prev_upper) {
        flush();  // lower -> Upper boundary
      } else if (!digit && !upper && prev_upper && current.size() >= 2) {
        // Acronym run followed by a lowercase letter: split before the last
        // uppercase letter (HTTPResponse -> HTTP | Response).
        char last = current.back();
        current.pop_back();
        flush();
        current += last;
      }
    }
    current += c;
  }
  flush();
  return tokens;
}

ActionPhrase analyze_method_name(const std::string& name,
                                 const VerbLexicon& lexicon) {
  auto phrase = try_analyze_method_name(name, lexicon);
  if (!phrase) {
    throw NoVerb("method name '" + name + "' does not start with a known verb");
  }
  return *phrase;
}

std::optional<ActionPhrase> try_analyze_method_name(const std::string& name,
                                                    const VerbLexicon& lexicon) {
  std::vector<std::string> tokens = split_identifier(name);
  if (tokens.empty() || !lexicon.contains(tokens.front())) return std::nullopt;
  ActionPhrase phrase;
  phrase.verb = tokens.front();
  size_t prep = tokens.size();
  for (size_t i = 1; i < tokens.size(); ++i) {
    if (prepositions().count(tokens[i])) {
      prep = i;
      break;
    }
  }
  if (prep > 1) phrase.direct_object = join(tokens, 1, prep);
  if (prep < tokens.size()) {
    phrase.preposition = tokens[prep];
    if (prep + 1 < tokens.size())
      phrase.prep_object = join(tokens, prep + 1, tokens.size());
  }
  return phrase;
}

Summary realize(const roles::EnrichedFacts& enriched, const VerbLexicon& lexicon) {
  const auto& facts = enriched.facts;
  const auto& annotation = enriched.annotation;

  std::vector<std::string> verbs;
  for (const auto& method : facts.methods) {
    for (const auto& token : split_identifier(method.name)) {
      if (lexicon.contains(token)) verbs.push_back(token);
    }
  }

  std::string text = "The " + facts.type_name + " class acts as " +
                     indefinite_article(annotation.focal_role) + " " +
                     annotation.focal_role + " in the " +
                     pattern_phrase(annotation.pattern) + " pattern";
  if (!verbs.empty()) {
    text += " and provides methods to " + join(verbs, 0, verbs.size(), ", ");
    if (auto theme = derive_theme(facts.type_name)) {
      text += " for managing " + *theme;
    }
  }
  text += ".";
  return make_summary(facts.file_id, Generator::SWUM, Variant::Default, 1,
                      std::move(text));
}

}  // namespace dps::swum

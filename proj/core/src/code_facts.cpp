#include "dpslab/code_facts.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace dps::facts {
namespace {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

struct Token {
  enum class Kind { Ident, Number, Str, CharLit, Punct, End };

  Kind kind = Kind::End;
  std::string text;
  int line = 0;
  int col = 0;

  bool is(std::string_view s) const { return text == s; }
  bool is_ident() const { return kind == Kind::Ident; }
};

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_ident_part(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

class Lexer {
 public:
  explicit Lexer(std::string_view source) : src_(source) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      out.push_back(next_token());
    }
    out.push_back(Token{Token::Kind::End, "", line_, col_});
    return out;
  }

 private:
  char peek(size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        int start_line = line_;
        advance();
        advance();
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size())
          throw ParseError("unterminated block comment", start_line, 1);
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  Token next_token() {
    int line = line_;
    int col = col_;
    char c = peek();
    if (is_ident_start(c)) {
      std::string text;
      while (pos_ < src_.size() && is_ident_part(peek())) text += advance();
      return {Token::Kind::Ident, std::move(text), line, col};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string text;
      text += advance();
      while (pos_ < src_.size() &&
             (is_ident_part(peek()) || peek() == '.' ||
              ((peek() == '+' || peek() == '-') &&
               (text.back() == 'e' || text.back() == 'E')))) {
        text += advance();
      }
      return {Token::Kind::Number, std::move(text), line, col};
    }
    if (c == '"') {
      if (peek(1) == '"' && peek(2) == '"') return text_block(line, col);
      return quoted('"', Token::Kind::Str, line, col);
    }
    if (c == '\'') return quoted('\'', Token::Kind::CharLit, line, col);
    // "..." (varargs) and "->" (lambda arrow) are kept as single tokens; all
    // other punctuation is emitted one character at a time so the parser can
    // track nested <...> without a >>-splitting pass.
    if (c == '.' && peek(1) == '.' && peek(2) == '.') {
      advance();
      advance();
      advance();
      return {Token::Kind::Punct, "...", line, col};
    }
    if (c == '-' && peek(1) == '>') {
      advance();
      advance();
      return {Token::Kind::Punct, "->", line, col};
    }
    advance();
    return {Token::Kind::Punct, std::string(1, c), line, col};
  }

  Token quoted(char delim, Token::Kind kind, int line, int col) {
    std::string text;
    advance();  // opening delimiter
    while (pos_ < src_.size() && peek() != delim) {
      if (peek() == '\\') {
        text += advance();
        if (pos_ >= src_.size()) break;
      }
      if (peek() == '\n') throw ParseError("unterminated literal", line, col);
      text += advance();
    }
    if (pos_ >= src_.size()) throw ParseError("unterminated literal", line, col);
    advance();  // closing delimiter
    return {kind, std::move(text), line, col};
  }

  Token text_block(int line, int col) {
    advance();
    advance();
    advance();
    std::string text;
    while (pos_ < src_.size() &&
           !(peek() == '"' && peek(1) == '"' && peek(2) == '"')) {
      text += advance();
    }
    if (pos_ >= src_.size()) throw ParseError("unterminated text block", line, col);
    advance();
    advance();
    advance();
    return {Token::Kind::Str, std::move(text), line, col};
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

const std::set<std::string> kJavaModifiers = {
    "public",   "protected", "private",      "abstract",  "static",
    "final",    "native",    "synchronized", "transient", "volatile",
    "strictfp", "default",
};

const std::set<std::string> kTypeLevelModifiers = {"public", "abstract", "final",
                                                   "static"};

// Canonical modifier ordering for deterministic serialization.
int modifier_rank(const std::string& m) {
  static const std::vector<std::string> order = {
      "public",  "protected", "private",      "abstract",  "default",
      "static",  "final",     "synchronized", "native",    "strictfp",
      "transient", "volatile",
  };
  auto it = std::find(order.begin(), order.end(), m);
  if (it != order.end()) return static_cast<int>(it - order.begin());
  return static_cast<int>(order.size());  // annotations keep relative order
}

void canonicalize_modifiers(std::vector<std::string>& mods) {
  std::stable_sort(mods.begin(), mods.end(),
                   [](const std::string& a, const std::string& b) {
                     return modifier_rank(a) < modifier_rank(b);
                   });
  mods.erase(std::unique(mods.begin(), mods.end()), mods.end());
}

bool is_word(const Token& t) {
  return t.kind == Token::Kind::Ident || t.kind == Token::Kind::Number;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string file_id)
      : tokens_(std::move(tokens)) {
    facts_.file_id = std::move(file_id);
  }

  CodeFacts run() {
    parse_package();
    parse_imports();
    bool seen_type = false;
    while (!at_end()) {
      if (cur().is(";")) {
        next();
        continue;
      }
      if (seen_type) {
        throw MultipleTopLevelTypes(
            "more than one top-level type declaration (line " +
            std::to_string(cur().line) + ")");
      }
      parse_type_declaration();
      seen_type = true;
    }
    if (!seen_type) throw ParseError("no type declaration found", 1, 1);
    finalize();
    return std::move(facts_);
  }

 private:
  const Token& cur() const { return tokens_[pos_]; }
  const Token& peek(size_t ahead = 1) const {
    size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  bool at_end() const { return cur().kind == Token::Kind::End; }
  const Token& next() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, cur().line, cur().col);
  }

  void expect(std::string_view text) {
    if (!cur().is(text)) fail("expected '" + std::string(text) + "'");
    next();
  }

  std::string expect_ident() {
    if (!cur().is_ident()) fail("expected identifier");
    return next().text;
  }

  std::string parse_qualified_name() {
    std::string name = expect_ident();
    while (cur().is(".") && peek().is_ident()) {
      next();
      name += "." + next().text;
    }
    return name;
  }

  void parse_package() {
    if (cur().is("package")) {
      next();
      facts_.package_name = parse_qualified_name();
      expect(";");
    }
  }

  void parse_imports() {
    while (cur().is("import")) {
      next();
      std::string entry;
      if (cur().is("static")) {
        next();
        entry = "static ";
      }
      entry += parse_qualified_name();
      if (cur().is(".") && peek().is("*")) {
        next();
        next();
        entry += ".*";
      }
      expect(";");
      facts_.imports.push_back(entry);
    }
  }

  // Collects annotations (returned as "@Name") and plain modifiers.
  std::vector<std::string> parse_modifiers_and_annotations() {
    std::vector<std::string> mods;
    while (true) {
      if (cur().is("@")) {
        next();
        std::string name = "@" + parse_qualified_name();
        if (cur().is("(")) skip_balanced("(", ")");
        if (name == "@interface") fail("annotation declarations unsupported");
        mods.push_back(name);
      } else if (cur().is_ident() && kJavaModifiers.count(cur().text) &&
                 !peek().is(".")) {
        // "default" is also a keyword inside switch; members never start there.
        mods.push_back(next().text);
      } else {
        break;
      }
    }
    return mods;
  }

  void skip_balanced(std::string_view open, std::string_view close) {
    expect(open);
    int depth = 1;
    while (depth > 0) {
      if (at_end()) fail("unbalanced '" + std::string(open) + "'");
      if (cur().is(open)) ++depth;
      if (cur().is(close)) --depth;
      next();
    }
  }

  void skip_type_parameters() {
    // Balanced <...> in a declaration context.
    expect("<");
    int depth = 1;
    while (depth > 0) {
      if (at_end()) fail("unbalanced '<'");
      if (cur().is("<")) ++depth;
      if (cur().is(">")) --depth;
      next();
    }
  }

  // Renders a type reference with canonical spacing, e.g.
  // "Map<String, List<EventListener>>" or "int[]".
  std::string parse_type() {
    std::string out;
    if (!cur().is_ident()) fail("expected type name");
    out = next().text;
    while (cur().is(".") && peek().is_ident()) {
      next();
      out += "." + next().text;
    }
    if (cur().is("<")) out += capture_type_arguments();
    while (cur().is("[") && peek().is("]")) {
      next();
      next();
      out += "[]";
    }
    if (cur().is("...")) {
      next();
      out += "...";
    }
    return out;
  }

  std::string capture_type_arguments() {
    std::string out = "<";
    expect("<");
    int depth = 1;
    std::string prev = "<";
    while (depth > 0) {
      if (at_end()) fail("unbalanced type arguments");
      const Token& t = cur();
      if (t.is("<")) ++depth;
      if (t.is(">")) --depth;
      // Join rule: space after ',' and between adjacent words.
      if (t.is(",")) {
        out += ",";
      } else {
        bool word_prev = !prev.empty() && (is_ident_part(prev.back()) || prev == "?");
        bool word_cur = t.is_ident() || t.is("?");
        if (prev == "," || (word_prev && word_cur)) out += " ";
        out += t.text;
      }
      prev = t.text;
      next();
    }
    return out;
  }

  void parse_type_declaration() {
    std::vector<std::string> mods = parse_modifiers_and_annotations();
    TypeKind kind;
    if (cur().is("class")) {
      kind = TypeKind::Class;
    } else if (cur().is("interface")) {
      kind = TypeKind::Interface;
    } else if (cur().is("enum")) {
      kind = TypeKind::EnumType;
    } else {
      fail("expected class, interface or enum declaration");
    }
    next();
    facts_.kind = kind;
    facts_.type_name = expect_ident();
    for (const auto& m : mods) {
      if (kTypeLevelModifiers.count(m)) facts_.modifiers.push_back(m);
    }
    canonicalize_modifiers(facts_.modifiers);

    if (cur().is("<")) skip_type_parameters();
    if (cur().is("extends")) {
      next();
      std::vector<std::string> supertypes;
      supertypes.push_back(parse_type());
      while (cur().is(",")) {
        next();
        supertypes.push_back(parse_type());
      }
      // Interfaces may extend several supertypes; the first one is kept as
      // extends_type and the rest join implements_types.
      facts_.extends_type = supertypes.front();
      for (size_t i = 1; i < supertypes.size(); ++i)
        facts_.implements_types.push_back(supertypes[i]);
    }
    if (cur().is("implements")) {
      next();
      facts_.implements_types.push_back(parse_type());
      while (cur().is(",")) {
        next();
        facts_.implements_types.push_back(parse_type());
      }
    }
    if (cur().is("permits")) {
      next();
      parse_type();
      while (cur().is(",")) {
        next();
        parse_type();
      }
    }
    expect("{");
    if (kind == TypeKind::EnumType) parse_enum_constants();
    while (!cur().is("}")) {
      if (at_end()) fail("unterminated type body");
      parse_member();
    }
    next();  // closing brace
  }

  void parse_enum_constants() {
    // Constants up to ';' or the closing '}'. Each is an implicit
    // public static final field of the enum type.
    while (true) {
      if (cur().is(";")) {
        next();
        return;
      }
      if (cur().is("}")) return;
      while (cur().is("@")) {
        next();
        parse_qualified_name();
        if (cur().is("(")) skip_balanced("(", ")");
      }
      std::string name = expect_ident();
      facts_.fields.push_back(
          FieldFact{name, facts_.type_name, {"public", "static", "final"}});
      if (cur().is("(")) skip_balanced("(", ")");
      if (cur().is("{")) skip_balanced("{", "}");
      if (cur().is(",")) {
        next();
        continue;
      }
    }
  }

  void parse_member() {
    std::vector<std::string> mods = parse_modifiers_and_annotations();
    bool has_override =
        std::find(mods.begin(), mods.end(), "@Override") != mods.end();

    if (cur().is("class") || cur().is("interface") || cur().is("enum")) {
      next();
      facts_.nested_types.push_back(expect_ident());
      // Skip the whole nested declaration; only the name is recorded.
      while (!cur().is("{")) {
        if (at_end()) fail("unterminated nested type header");
        next();
      }
      skip_balanced("{", "}");
      return;
    }
    if (cur().is(";")) {
      next();
      return;
    }
    if (cur().is("{")) {
      // Instance or static initializer block.
      skip_balanced("{", "}");
      return;
    }
    if (cur().is("<")) skip_type_parameters();

    // Constructor: the type name directly followed by '('.
    if (cur().is(facts_.type_name) && peek().is("(")) {
      MethodFact ctor;
      ctor.name = next().text;
      ctor.modifiers = mods;
      canonicalize_modifiers(ctor.modifiers);
      ctor.parameters = parse_parameters();
      skip_throws();
      if (cur().is("{")) {
        skip_balanced("{", "}");
      } else {
        expect(";");
      }
      facts_.constructors.push_back(std::move(ctor));
      return;
    }

    std::string type = parse_type();
    std::string name = expect_ident();
    if (cur().is("(")) {
      MethodFact method;
      method.name = std::move(name);
      method.return_type = std::move(type);
      method.modifiers = mods;
      canonicalize_modifiers(method.modifiers);
      method.is_override = has_override;
      method.parameters = parse_parameters();
      skip_throws();
      if (cur().is("{")) {
        method_bodies_.emplace_back(method.name, capture_body_tokens());
      } else {
        expect(";");
      }
      facts_.methods.push_back(std::move(method));
      return;
    }
    parse_field_declarators(std::move(type), std::move(name), std::move(mods));
  }

  std::vector<Parameter> parse_parameters() {
    std::vector<Parameter> params;
    expect("(");
    if (cur().is(")")) {
      next();
      return params;
    }
    while (true) {
      while (cur().is("@")) {
        next();
        parse_qualified_name();
        if (cur().is("(")) skip_balanced("(", ")");
      }
      if (cur().is("final")) next();
      Parameter p;
      p.type = parse_type();
      p.name = expect_ident();
      while (cur().is("[") && peek().is("]")) {
        next();
        next();
        p.type += "[]";
      }
      params.push_back(std::move(p));
      if (cur().is(",")) {
        next();
        continue;
      }
      expect(")");
      break;
    }
    return params;
  }

  void skip_throws() {
    if (!cur().is("throws")) return;
    next();
    parse_type();
    while (cur().is(",")) {
      next();
      parse_type();
    }
  }

  std::vector<Token> capture_body_tokens() {
    expect("{");
    std::vector<Token> body;
    int depth = 1;
    while (depth > 0) {
      if (at_end()) fail("unterminated method body");
      if (cur().is("{")) ++depth;
      if (cur().is("}")) --depth;
      if (depth > 0) body.push_back(cur());
      next();
    }
    return body;
  }

  void parse_field_declarators(std::string type, std::string first_name,
                               std::vector<std::string> mods) {
    canonicalize_modifiers(mods);
    std::string name = std::move(first_name);
    while (true) {
      std::string declared_type = type;
      while (cur().is("[") && peek().is("]")) {
        next();
        next();
        declared_type += "[]";
      }
      facts_.fields.push_back(FieldFact{name, declared_type, mods});
      if (cur().is("=")) {
        next();
        skip_initializer();
      }
      if (cur().is(",")) {
        next();
        name = expect_ident();
        continue;
      }
      expect(";");
      return;
    }
  }

  void skip_initializer() {
    int paren = 0, brace = 0, bracket = 0;
    while (!at_end()) {
      const Token& t = cur();
      if (paren == 0 && brace == 0 && bracket == 0 &&
          (t.is(",") || t.is(";"))) {
        return;
      }
      if (t.is("(")) ++paren;
      if (t.is(")")) --paren;
      if (t.is("{")) ++brace;
      if (t.is("}")) --brace;
      if (t.is("[")) ++bracket;
      if (t.is("]")) --bracket;
      next();
    }
    fail("unterminated field initializer");
  }

  // -------------------------------------------------------------------------
  // Call-edge extraction over captured method bodies.
  // -------------------------------------------------------------------------

  void finalize() {
    std::set<std::string> declared;
    std::set<std::pair<std::string, std::vector<std::string>>> signatures;
    for (const auto& m : facts_.methods) {
      declared.insert(m.name);
      std::vector<std::string> param_types;
      for (const auto& p : m.parameters) param_types.push_back(p.type);
      if (!signatures.emplace(m.name, param_types).second) {
        throw ParseError("duplicate method signature: " + m.name, 1, 1);
      }
      std::set<std::string> param_names;
      for (const auto& p : m.parameters) {
        if (!param_names.insert(p.name).second)
          throw ParseError("duplicate parameter name in " + m.name, 1, 1);
      }
    }

    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& [caller, body] : method_bodies_) {
      for (size_t i = 0; i + 1 < body.size(); ++i) {
        if (!body[i].is_ident() || !body[i + 1].is("(")) continue;
        const std::string& callee = body[i].text;
        if (!declared.count(callee)) continue;
        if (!looks_like_local_call(body, i)) continue;
        if (seen.emplace(caller, callee).second) {
          facts_.call_edges.push_back(CallEdge{caller, callee});
        }
      }
    }

    // Override facts: without cross-file resolution the declaring type is the
    // nearest declared supertype, falling back to Object.
    std::string declaring = "Object";
    if (facts_.extends_type) {
      declaring = *facts_.extends_type;
    } else if (!facts_.implements_types.empty()) {
      declaring = facts_.implements_types.front();
    }
    for (const auto& m : facts_.methods) {
      if (m.is_override)
        facts_.overrides.push_back(OverrideFact{m.name, declaring});
    }
  }

  // Filters out declarations inside anonymous classes, qualified calls on
  // other objects and constructor invocations. Identifier-typed declarations
  // ("void update(") have a word token right before the name; calls do not.
  static bool looks_like_local_call(const std::vector<Token>& body, size_t i) {
    if (i == 0) return true;
    const Token& prev = body[i - 1];
    if (prev.is("new")) return false;
    if (prev.is(".")) {
      // this.m() counts; anything else targets another object.
      return i >= 2 && body[i - 2].is("this") &&
             (i < 3 || !body[i - 3].is("."));
    }
    static const std::set<std::string> ok_keywords = {
        "return", "else", "case", "do", "assert", "yield", "throw",
    };
    if (is_word(prev)) return ok_keywords.count(prev.text) > 0;
    if (prev.is(">") || prev.is("]")) return false;  // declaration context
    return true;
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
  CodeFacts facts_;
  std::vector<std::pair<std::string, std::vector<Token>>> method_bodies_;
};

// ---------------------------------------------------------------------------
// JSON document
// ---------------------------------------------------------------------------

ordered_json method_to_json(const MethodFact& m) {
  ordered_json j;
  j["name"] = m.name;
  j["return_type"] = m.return_type;
  ordered_json params = ordered_json::array();
  for (const auto& p : m.parameters) {
    params.push_back(ordered_json{{"name", p.name}, {"type", p.type}});
  }
  j["parameters"] = std::move(params);
  j["modifiers"] = m.modifiers;
  j["is_override"] = m.is_override;
  return j;
}

ordered_json field_to_json(const FieldFact& f) {
  ordered_json j;
  j["name"] = f.name;
  j["type"] = f.type;
  j["modifiers"] = f.modifiers;
  return j;
}

void require_keys(const ordered_json& j, const std::vector<std::string>& keys,
                  const std::string& where) {
  for (const auto& k : keys) {
    if (!j.contains(k)) throw SchemaError("missing field '" + k + "' in " + where);
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
      throw SchemaError("unexpected field '" + it.key() + "' in " + where);
  }
}

std::vector<std::string> string_list(const ordered_json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + " must be an array");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw SchemaError(where + " entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

MethodFact method_from_json(const ordered_json& j, const std::string& where) {
  require_keys(j, {"name", "return_type", "parameters", "modifiers", "is_override"},
               where);
  MethodFact m;
  if (!j["name"].is_string() || !j["return_type"].is_string() ||
      !j["is_override"].is_boolean()) {
    throw SchemaError("ill-typed method entry in " + where);
  }
  m.name = j["name"].get<std::string>();
  m.return_type = j["return_type"].get<std::string>();
  if (!j["parameters"].is_array())
    throw SchemaError("parameters must be an array in " + where);
  for (const auto& p : j["parameters"]) {
    require_keys(p, {"name", "type"}, where + ".parameters");
    if (!p["name"].is_string() || !p["type"].is_string())
      throw SchemaError("ill-typed parameter in " + where);
    m.parameters.push_back(
        Parameter{p["name"].get<std::string>(), p["type"].get<std::string>()});
  }
  m.modifiers = string_list(j["modifiers"], where + ".modifiers");
  m.is_override = j["is_override"].get<bool>();
  return m;
}

}  // namespace

ParseError::ParseError(const std::string& message, int line, int column)
    : Error(message + " (line " + std::to_string(line) + ", column " +
            std::to_string(column) + ")"),
      line_(line),
      column_(column) {}

std::string to_string(TypeKind kind) {
  switch (kind) {
    case TypeKind::Class:
      return "class";
    case TypeKind::Interface:
      return "interface";
    case TypeKind::EnumType:
      return "enum_type";
  }
  return "class";
}

TypeKind type_kind_from_string(const std::string& s) {
  if (s == "class") return TypeKind::Class;
  if (s == "interface") return TypeKind::Interface;
  if (s == "enum_type") return TypeKind::EnumType;
  throw SchemaError("unknown type kind: " + s);
}

CodeFacts parse_source(std::string_view source, std::string file_id) {
  Lexer lexer(source);
  Parser parser(lexer.run(), std::move(file_id));
  CodeFacts facts = parser.run();
  validate(facts);
  return facts;
}

void validate(const CodeFacts& facts) {
  if (facts.type_name.empty()) throw SchemaError("type_name must be non-empty");
  std::set<std::string> declared;
  std::set<std::pair<std::string, std::vector<std::string>>> signatures;
  for (const auto& m : facts.methods) {
    if (m.name.empty()) throw SchemaError("method name must be non-empty");
    declared.insert(m.name);
    std::vector<std::string> param_types;
    std::set<std::string> param_names;
    for (const auto& p : m.parameters) {
      param_types.push_back(p.type);
      if (!param_names.insert(p.name).second)
        throw SchemaError("duplicate parameter name in " + m.name);
    }
    if (!signatures.emplace(m.name, param_types).second)
      throw SchemaError("duplicate method signature: " + m.name);
  }
  for (const auto& f : facts.fields) {
    if (f.name.empty()) throw SchemaError("field name must be non-empty");
  }
  for (const auto& e : facts.call_edges) {
    if (!declared.count(e.caller) || !declared.count(e.callee))
      throw SchemaError("call edge endpoint not declared: " + e.caller + " -> " +
                        e.callee);
  }
}

std::string write_facts_document(const CodeFacts& facts) {
  ordered_json j;
  j["file_id"] = facts.file_id;
  j["package_name"] = facts.package_name;
  j["type_name"] = facts.type_name;
  j["kind"] = to_string(facts.kind);
  j["modifiers"] = facts.modifiers;
  if (facts.extends_type) {
    j["extends_type"] = *facts.extends_type;
  } else {
    j["extends_type"] = nullptr;
  }
  j["implements_types"] = facts.implements_types;
  j["imports"] = facts.imports;
  ordered_json fields = ordered_json::array();
  for (const auto& f : facts.fields) fields.push_back(field_to_json(f));
  j["fields"] = std::move(fields);
  ordered_json ctors = ordered_json::array();
  for (const auto& c : facts.constructors) ctors.push_back(method_to_json(c));
  j["constructors"] = std::move(ctors);
  ordered_json methods = ordered_json::array();
  for (const auto& m : facts.methods) methods.push_back(method_to_json(m));
  j["methods"] = std::move(methods);
  ordered_json edges = ordered_json::array();
  for (const auto& e : facts.call_edges)
    edges.push_back(ordered_json::array({e.caller, e.callee}));
  j["call_edges"] = std::move(edges);
  ordered_json overrides = ordered_json::array();
  for (const auto& o : facts.overrides)
    overrides.push_back(ordered_json::array({o.method, o.declaring_type}));
  j["overrides"] = std::move(overrides);
  j["nested_types"] = facts.nested_types;
  return j.dump(2) + "\n";
}

CodeFacts read_facts_document(std::string_view bytes) {
  ordered_json j;
  try {
    j = ordered_json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("invalid facts document: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("facts document must be a JSON object");
  static const std::vector<std::string> keys = {
      "file_id", "package_name", "type_name",    "kind",
      "modifiers", "extends_type", "implements_types", "imports",
      "fields",  "constructors", "methods",      "call_edges",
      "overrides", "nested_types",
  };
  require_keys(j, keys, "facts document");

  CodeFacts f;
  for (const auto& k : {"file_id", "package_name", "type_name", "kind"}) {
    if (!j[k].is_string()) throw SchemaError(std::string(k) + " must be a string");
  }
  f.file_id = j["file_id"].get<std::string>();
  f.package_name = j["package_name"].get<std::string>();
  f.type_name = j["type_name"].get<std::string>();
  f.kind = type_kind_from_string(j["kind"].get<std::string>());
  f.modifiers = string_list(j["modifiers"], "modifiers");
  if (j["extends_type"].is_null()) {
    f.extends_type = std::nullopt;
  } else if (j["extends_type"].is_string()) {
    f.extends_type = j["extends_type"].get<std::string>();
  } else {
    throw SchemaError("extends_type must be a string or null");
  }
  f.implements_types = string_list(j["implements_types"], "implements_types");
  f.imports = string_list(j["imports"], "imports");
  if (!j["fields"].is_array()) throw SchemaError("fields must be an array");
  for (const auto& fj : j["fields"]) {
    require_keys(fj, {"name", "type", "modifiers"}, "fields");
    if (!fj["name"].is_string() || !fj["type"].is_string())
      throw SchemaError("ill-typed field entry");
    f.fields.push_back(FieldFact{fj["name"].get<std::string>(),
                                 fj["type"].get<std::string>(),
                                 string_list(fj["modifiers"], "field modifiers")});
  }
  if (!j["constructors"].is_array())
    throw SchemaError("constructors must be an array");
  for (const auto& cj : j["constructors"])
    f.constructors.push_back(method_from_json(cj, "constructors"));
  if (!j["methods"].is_array()) throw SchemaError("methods must be an array");
  for (const auto& mj : j["methods"])
    f.methods.push_back(method_from_json(mj, "methods"));
  if (!j["call_edges"].is_array()) throw SchemaError("call_edges must be an array");
  for (const auto& ej : j["call_edges"]) {
    if (!ej.is_array() || ej.size() != 2 || !ej[0].is_string() || !ej[1].is_string())
      throw SchemaError("call_edges entries must be [caller, callee] pairs");
    f.call_edges.push_back(
        CallEdge{ej[0].get<std::string>(), ej[1].get<std::string>()});
  }
  if (!j["overrides"].is_array()) throw SchemaError("overrides must be an array");
  for (const auto& oj : j["overrides"]) {
    if (!oj.is_array() || oj.size() != 2 || !oj[0].is_string() || !oj[1].is_string())
      throw SchemaError("overrides entries must be [method, declaring_type] pairs");
    f.overrides.push_back(
        OverrideFact{oj[0].get<std::string>(), oj[1].get<std::string>()});
  }
  f.nested_types = string_list(j["nested_types"], "nested_types");
  validate(f);
  return f;
}

}  // namespace dps::facts

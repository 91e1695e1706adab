#include "doctest.h"

#include <set>

#include "dpslab/nlg_generator.hpp"
#include "fixtures.hpp"

using dps::Generator;
using dps::Summary;
using dps::Variant;

TEST_SUITE_BEGIN("nlg");

TEST_CASE("golden factory summary") {
  Summary s = dps::nlg::realize(fixtures::windows_os_factory());
  CHECK(s.text == fixtures::kNlgWindowsOSFactory);
  CHECK(s.generator == Generator::NLG);
  CHECK(s.variant == Variant::Default);
  CHECK(s.iteration == 1);
}

TEST_CASE("golden adapter summary") {
  Summary s = dps::nlg::realize(fixtures::round_peg());
  CHECK(s.text == fixtures::kNlgRoundPeg);
}

TEST_CASE("golden observer summary") {
  Summary s = dps::nlg::realize(fixtures::event_manager());
  CHECK(s.text == fixtures::kNlgEventManager);
}

TEST_CASE("zero-method class stops after the declaration sentence") {
  dps::facts::CodeFacts f;
  f.file_id = "Marker";
  f.type_name = "Marker";
  f.modifiers = {"public"};
  dps::roles::PatternAnnotation a;
  a.pattern = dps::roles::PatternKind::Singleton;
  a.focal_role = "singleton";
  Summary s = dps::nlg::realize(dps::roles::enrich(std::move(f), std::move(a)));
  CHECK(s.text == "Marker acts as a singleton. It is a public class.");
}

TEST_CASE("singular and plural method inventory") {
  dps::facts::CodeFacts f;
  f.file_id = "C";
  f.type_name = "C";
  f.modifiers = {"public"};
  f.methods = {dps::facts::MethodFact{"go", "void", {}, {}, false}};
  dps::roles::PatternAnnotation a;
  a.pattern = dps::roles::PatternKind::Singleton;
  a.focal_role = "singleton";
  Summary one = dps::nlg::realize(dps::roles::enrich(f, a));
  CHECK(one.text.find("The only method of C is go (void).") != std::string::npos);
  CHECK(one.text.find("methods of C are") == std::string::npos);

  f.methods.push_back(dps::facts::MethodFact{"stop", "void", {}, {}, false});
  Summary two = dps::nlg::realize(dps::roles::enrich(f, a));
  CHECK(two.text.find("The 2 methods of C are go (void) and stop (void).") !=
        std::string::npos);
}

TEST_CASE("call sentences realize caller and callee lists") {
  dps::facts::CodeFacts f;
  f.file_id = "C";
  f.type_name = "C";
  f.modifiers = {"public"};
  f.methods = {dps::facts::MethodFact{"a", "void", {}, {}, false},
               dps::facts::MethodFact{"b", "void", {}, {}, false}};
  f.call_edges = {dps::facts::CallEdge{"a", "b"}};
  dps::roles::PatternAnnotation an;
  an.pattern = dps::roles::PatternKind::Facade;
  an.focal_role = "facade";
  Summary s = dps::nlg::realize(dps::roles::enrich(f, an));
  CHECK(s.text.find("No methods call a and a calls b.") != std::string::npos);
  CHECK(s.text.find("a calls b and b calls no methods.") != std::string::npos);
}

TEST_CASE("every method appears once in inventory and once in call sentences") {
  auto e = fixtures::event_manager();
  Summary s = dps::nlg::realize(e);
  for (const auto& m : e.facts.methods) {
    // inventory mention "name (type)", counted at word boundaries so that
    // "subscribe (void)" does not also match inside "unsubscribe (void)"
    std::string inventory = m.name + " (" + m.return_type + ")";
    size_t count = 0;
    for (size_t at = s.text.find(inventory); at != std::string::npos;
         at = s.text.find(inventory, at + 1)) {
      bool boundary =
          at == 0 || !std::isalnum(static_cast<unsigned char>(s.text[at - 1]));
      if (boundary) ++count;
    }
    CHECK(count == 1);
    std::string call = "No methods call " + m.name;
    CHECK(s.text.find(call) != std::string::npos);
  }
}

TEST_CASE("generics erased in realized text") {
  dps::facts::CodeFacts f;
  f.file_id = "Repo";
  f.type_name = "Repo";
  f.modifiers = {"public"};
  f.extends_type = "AbstractRepo<String>";
  f.methods = {
      dps::facts::MethodFact{"findAll", "List<Item>", {}, {}, false}};
  dps::roles::PatternAnnotation a;
  a.pattern = dps::roles::PatternKind::Singleton;
  a.focal_role = "singleton";
  Summary s = dps::nlg::realize(dps::roles::enrich(f, a));
  CHECK(s.text.find("findAll (List)") != std::string::npos);
  CHECK(s.text.find("that extends AbstractRepo.") != std::string::npos);
  CHECK(s.text.find("<") == std::string::npos);
}

TEST_CASE("deterministic output") {
  auto e = fixtures::windows_os_factory();
  CHECK(dps::nlg::realize(e).text == dps::nlg::realize(e).text);
}

TEST_SUITE_END();

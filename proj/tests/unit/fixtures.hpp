#pragma once

// Hand-authored facts and expected summary strings for the three showcase
// classes used across the NLG, SWUM and acceptance suites.

#include <string>

#include "dpslab/code_facts.hpp"
#include "dpslab/pattern_roles.hpp"

namespace fixtures {

using dps::facts::CodeFacts;
using dps::facts::MethodFact;
using dps::facts::OverrideFact;
using dps::facts::Parameter;
using dps::facts::TypeKind;
using dps::roles::EnrichedFacts;
using dps::roles::PatternAnnotation;
using dps::roles::PatternKind;

inline EnrichedFacts windows_os_factory() {
  CodeFacts f;
  f.file_id = "WindowsOSFactory";
  f.type_name = "WindowsOSFactory";
  f.kind = TypeKind::Class;
  f.modifiers = {"public"};
  f.implements_types = {"GUIFactory"};
  f.methods = {
      MethodFact{"createButton", "Button", {}, {"public", "@Override"}, true},
      MethodFact{"createCheckBox", "CheckBox", {}, {"public", "@Override"}, true},
  };
  f.overrides = {OverrideFact{"createButton", "GUIFactory"},
                 OverrideFact{"createCheckBox", "GUIFactory"}};
  PatternAnnotation a;
  a.pattern = PatternKind::AbstractFactory;
  a.focal_role = "factory";
  a.collaborators = {{"product_interface", {"GUIFactory"}}};
  return dps::roles::enrich(std::move(f), std::move(a));
}

inline EnrichedFacts round_peg() {
  CodeFacts f;
  f.file_id = "RoundPeg";
  f.type_name = "RoundPeg";
  f.kind = TypeKind::Class;
  f.modifiers = {"public"};
  f.fields = {dps::facts::FieldFact{"radius", "double", {"private"}}};
  f.constructors = {MethodFact{
      "RoundPeg", "", {Parameter{"radius", "double"}}, {"public"}, false}};
  f.methods = {MethodFact{"getRadius", "double", {}, {"public"}, false}};
  PatternAnnotation a;
  a.pattern = PatternKind::Adapter;
  a.focal_role = "target";
  a.collaborators = {{"adapter", {"SquarePegAdapter"}}};
  return dps::roles::enrich(std::move(f), std::move(a));
}

inline EnrichedFacts event_manager() {
  CodeFacts f;
  f.file_id = "EventManager";
  f.type_name = "EventManager";
  f.kind = TypeKind::Class;
  f.modifiers = {"public"};
  f.imports = {"java.io.File", "java.util.ArrayList", "java.util.HashMap",
               "java.util.List", "java.util.Map"};
  f.fields = {dps::facts::FieldFact{
      "listeners", "Map<String, List<EventListener>>", {}}};
  f.constructors = {MethodFact{
      "EventManager", "", {Parameter{"operations", "String..."}}, {"public"},
      false}};
  f.methods = {
      MethodFact{"subscribe",
                 "void",
                 {Parameter{"eventType", "String"},
                  Parameter{"listener", "EventListener"}},
                 {"public"},
                 false},
      MethodFact{"unsubscribe",
                 "void",
                 {Parameter{"eventType", "String"},
                  Parameter{"listener", "EventListener"}},
                 {"public"},
                 false},
      MethodFact{"notify",
                 "void",
                 {Parameter{"eventType", "String"}, Parameter{"file", "File"}},
                 {"public"},
                 false},
  };
  PatternAnnotation a;
  a.pattern = PatternKind::Observer;
  a.focal_role = "publisher";
  a.collaborators = {{"subscriber", {"EventListener"}}};
  return dps::roles::enrich(std::move(f), std::move(a));
}

inline const std::string kNlgWindowsOSFactory =
    "WindowsOSFactory acts as a factory for GUIFactory, which overrides "
    "createButton method of GUIFactory, createCheckBox method of GUIFactory. "
    "It is a public class that implements GUIFactory. The 2 methods of "
    "WindowsOSFactory are createButton (Button) and createCheckBox "
    "(CheckBox). No methods call createButton and createButton calls no "
    "methods. No methods call createCheckBox and createCheckBox calls no "
    "methods.";

inline const std::string kNlgRoundPeg =
    "RoundPeg acts as a target for adapter SquarePegAdapter, which adapts to "
    "RoundPeg. It is a public class. The only method of RoundPeg is getRadius "
    "(double). No methods call getRadius and getRadius calls no methods.";

inline const std::string kNlgEventManager =
    "EventManager acts as a publisher for observer EventListener, which is "
    "inherited by, which subscribes String parameter of eventType, "
    "EventListener parameter of listener, which unsubscribes String parameter "
    "of eventType, EventListener parameter of listener, which notifies String "
    "parameter of eventType, File parameter of file. It is a public class. "
    "The 3 methods of EventManager are subscribe (void), unsubscribe (void) "
    "and notify (void). No methods call subscribe and subscribe calls no "
    "methods. No methods call unsubscribe and unsubscribe calls no methods. "
    "No methods call notify and notify calls no methods.";

inline const std::string kSwumWindowsOSFactory =
    "The WindowsOSFactory class acts as a factory in the Abstract Factory "
    "pattern and provides methods to create, create, check for managing "
    "factory.";

inline const std::string kSwumRoundPeg =
    "The RoundPeg class acts as a target in the adapter pattern and provides "
    "methods to get.";

inline const std::string kSwumEventManager =
    "The EventManager class acts as a publisher in the observer pattern and "
    "provides methods to notify for managing event.";

}  // namespace fixtures

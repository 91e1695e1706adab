#include "doctest.h"

#include "dpslab/code_facts.hpp"

using namespace dps::facts;

namespace {

const char* kWindowsOSFactory = R"java(
public class WindowsOSFactory implements GUIFactory {
    @Override
    public Button createButton() {
        return new WindowsButton();
    }

    @Override
    public CheckBox createCheckBox() {
        return new WindowsCheckBox();
    }
}
)java";

}  // namespace

TEST_SUITE_BEGIN("code-facts");

TEST_CASE("empty class") {
  CodeFacts f = parse_source("public class Foo {}", "Foo");
  CHECK(f.type_name == "Foo");
  CHECK(f.kind == TypeKind::Class);
  CHECK(f.modifiers == std::vector<std::string>{"public"});
  CHECK(f.methods.empty());
  CHECK(f.call_edges.empty());
  CHECK(!f.extends_type.has_value());
}

TEST_CASE("factory class shape") {
  CodeFacts f = parse_source(kWindowsOSFactory, "WindowsOSFactory");
  CHECK(f.implements_types == std::vector<std::string>{"GUIFactory"});
  REQUIRE(f.methods.size() == 2);
  CHECK(f.methods[0].name == "createButton");
  CHECK(f.methods[0].return_type == "Button");
  CHECK(f.methods[0].is_override);
  CHECK(f.methods[1].name == "createCheckBox");
  CHECK(f.methods[1].return_type == "CheckBox");
  CHECK(f.call_edges.empty());
  REQUIRE(f.overrides.size() == 2);
  CHECK(f.overrides[0].method == "createButton");
  CHECK(f.overrides[0].declaring_type == "GUIFactory");
}

TEST_CASE("intra-file call edge") {
  CodeFacts f = parse_source("class C { void a(){ b(); } void b(){} }", "C");
  REQUIRE(f.call_edges.size() == 1);
  CHECK(f.call_edges[0] == CallEdge{"a", "b"});
}

TEST_CASE("call extraction ignores other receivers and declarations") {
  const char* source = R"java(
class C {
    Helper helper;

    void a() {
        helper.b();
        new Runnable() {
            public void run() { }
            public void b() { }
        };
        this.b();
    }

    void b() { }

    void run() { }
}
)java";
  CodeFacts f = parse_source(source, "C");
  // helper.b() targets another object; the anonymous class declares its own
  // run/b; only this.b() survives.
  REQUIRE(f.call_edges.size() == 1);
  CHECK(f.call_edges[0] == CallEdge{"a", "b"});
}

TEST_CASE("recursion and duplicate edges collapse") {
  CodeFacts f = parse_source(
      "class C { void a(){ a(); b(); b(); } void b(){ a(); } }", "C");
  REQUIRE(f.call_edges.size() == 3);
  CHECK(f.call_edges[0] == CallEdge{"a", "a"});
  CHECK(f.call_edges[1] == CallEdge{"a", "b"});
  CHECK(f.call_edges[2] == CallEdge{"b", "a"});
}

TEST_CASE("package imports fields constructors") {
  const char* source = R"java(
package com.example.app;

import java.util.List;
import java.util.Map;
import static java.util.Objects.requireNonNull;

public final class Inventory {
    private Map<String, List<Item>> itemsByCategory;
    public static final int LIMIT = 100;
    int a, b;

    public Inventory(List<Item> seed) { }

    List<Item> find(String category) {
        return itemsByCategory.get(category);
    }
}
)java";
  CodeFacts f = parse_source(source, "Inventory");
  CHECK(f.package_name == "com.example.app");
  REQUIRE(f.imports.size() == 3);
  CHECK(f.imports[2] == "static java.util.Objects.requireNonNull");
  CHECK(f.modifiers == std::vector<std::string>{"public", "final"});
  REQUIRE(f.fields.size() == 4);
  CHECK(f.fields[0].type == "Map<String, List<Item>>");
  CHECK(f.fields[1].modifiers ==
        std::vector<std::string>{"public", "static", "final"});
  CHECK(f.fields[2].name == "a");
  CHECK(f.fields[3].name == "b");
  REQUIRE(f.constructors.size() == 1);
  CHECK(f.constructors[0].parameters.size() == 1);
  CHECK(f.constructors[0].parameters[0].type == "List<Item>");
  REQUIRE(f.methods.size() == 1);
  CHECK(f.methods[0].return_type == "List<Item>");
}

TEST_CASE("interface and enum kinds") {
  CodeFacts i = parse_source(
      "public interface Renderer extends Drawable, Closeable { void draw(); }",
      "Renderer");
  CHECK(i.kind == TypeKind::Interface);
  CHECK(i.extends_type == "Drawable");
  CHECK(i.implements_types == std::vector<std::string>{"Closeable"});
  REQUIRE(i.methods.size() == 1);

  CodeFacts e = parse_source(
      "public enum Color { RED, GREEN, BLUE; public String hex() { return null; } }",
      "Color");
  CHECK(e.kind == TypeKind::EnumType);
  REQUIRE(e.fields.size() == 3);
  CHECK(e.fields[0].name == "RED");
  CHECK(e.fields[0].type == "Color");
  REQUIRE(e.methods.size() == 1);
}

TEST_CASE("nested types recorded by name only") {
  const char* source = R"java(
public class Outer {
    public void work() { }

    private static class Inner {
        void hidden() { }
    }

    interface Callback { void call(); }
}
)java";
  CodeFacts f = parse_source(source, "Outer");
  CHECK(f.nested_types == std::vector<std::string>{"Inner", "Callback"});
  REQUIRE(f.methods.size() == 1);  // hidden() and call() belong to nested types
}

TEST_CASE("generics recorded verbatim and arrays preserved") {
  const char* source = R"java(
class Box {
    java.util.List<int[]> rows;

    <T> T pick(java.util.List<? extends T> from, int[] at) { return null; }
}
)java";
  CodeFacts f = parse_source(source, "Box");
  CHECK(f.fields[0].type == "java.util.List<int[]>");
  CHECK(f.methods[0].parameters[0].type == "java.util.List<? extends T>");
  CHECK(f.methods[0].parameters[1].type == "int[]");
}

TEST_CASE("overloads allowed but duplicate signatures rejected") {
  CodeFacts f = parse_source(
      "class C { void go(int x){} void go(String x){} }", "C");
  CHECK(f.methods.size() == 2);
  CHECK_THROWS_AS(parse_source("class C { void go(int x){} void go(int y){} }",
                               "C"),
                  ParseError);
}

TEST_CASE("duplicate parameter names rejected") {
  CHECK_THROWS_AS(parse_source("class C { void go(int a, int a){} }", "C"),
                  ParseError);
}

TEST_CASE("kitchen sink: annotations, generics, lambdas, text blocks") {
  const char* source = R"java(
package com.example.deep;

import java.util.*;
import java.util.function.Supplier;

@Component("registry")
@SuppressWarnings({"unchecked", "rawtypes"})
public abstract class WidgetRegistry<T extends Widget> extends AbstractRegistry<T> implements Iterable<T>, AutoCloseable {
    private static final String BANNER = """
        widgets: registry
        """;
    protected Map.Entry<String, List<T>>[] buckets;
    volatile int size = compute(3, '\'', "quoted \" paren (");

    static { System.out.println(BANNER); }

    public WidgetRegistry(Supplier<? extends T> factory) throws IllegalStateException {
        super(factory);
    }

    @Override
    public void close() {
        flushAll();
    }

    public synchronized <R> R reduce(R seed, java.util.function.BiFunction<R, ? super T, R> fn) {
        forEachWidget(w -> register(seed));
        return seed;
    }

    private void flushAll() { }

    private void forEachWidget(java.util.function.Consumer<T> consumer) { }

    private <R> R register(R value) { return value; }

    static int compute(int a, char c, String s) { return a; }

    private enum State { OPEN, CLOSED }

    public interface Listener {
        void changed(int delta);
    }
}
)java";
  CodeFacts f = parse_source(source, "WidgetRegistry");
  CHECK(f.package_name == "com.example.deep");
  CHECK(f.kind == TypeKind::Class);
  CHECK(f.modifiers == std::vector<std::string>{"public", "abstract"});
  CHECK(f.extends_type == "AbstractRegistry<T>");
  CHECK(f.implements_types ==
        std::vector<std::string>{"Iterable<T>", "AutoCloseable"});
  CHECK(f.imports == std::vector<std::string>{"java.util.*",
                                              "java.util.function.Supplier"});
  REQUIRE(f.fields.size() == 3);
  CHECK(f.fields[1].type == "Map.Entry<String, List<T>>[]");
  CHECK(f.nested_types == std::vector<std::string>{"State", "Listener"});
  REQUIRE(f.constructors.size() == 1);
  REQUIRE(f.methods.size() == 6);
  CHECK(f.methods[0].name == "close");
  CHECK(f.methods[0].is_override);
  CHECK(f.methods[0].modifiers ==
        std::vector<std::string>{"public", "@Override"});
  CHECK(f.overrides ==
        std::vector<OverrideFact>{{"close", "AbstractRegistry<T>"}});
  // close -> flushAll; reduce -> forEachWidget; the lambda body's
  // register(...) call also attributes to reduce
  CHECK(f.call_edges == std::vector<CallEdge>{{"close", "flushAll"},
                                              {"reduce", "forEachWidget"},
                                              {"reduce", "register"}});
}

TEST_CASE("parse errors carry position") {
  try {
    parse_source("public class Foo {", "Foo");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 1);
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_source("public klass Foo {}", "Foo"), ParseError);
}

TEST_CASE("multiple top-level types rejected") {
  CHECK_THROWS_AS(parse_source("class A {} class B {}", "A"),
                  MultipleTopLevelTypes);
}

TEST_CASE("determinism") {
  CodeFacts a = parse_source(kWindowsOSFactory, "WindowsOSFactory");
  CodeFacts b = parse_source(kWindowsOSFactory, "WindowsOSFactory");
  CHECK(a == b);
  CHECK(write_facts_document(a) == write_facts_document(b));
}

TEST_CASE("facts document round trip") {
  CodeFacts f = parse_source(kWindowsOSFactory, "WindowsOSFactory");
  std::string doc = write_facts_document(f);
  CHECK(read_facts_document(doc) == f);

  CodeFacts empty = parse_source("public class Foo {}", "Foo");
  std::string empty_doc = write_facts_document(empty);
  CHECK(empty_doc.find("\"methods\": []") != std::string::npos);
  CHECK(read_facts_document(empty_doc) == empty);
}

TEST_CASE("document with one call edge has exactly one pair") {
  CodeFacts f = parse_source("class C { void a(){ b(); } void b(){} }", "C");
  std::string doc = write_facts_document(f);
  auto at = doc.find("\"call_edges\"");
  REQUIRE(at != std::string::npos);
  // one [caller, callee] pair under call_edges
  auto section = doc.substr(at, doc.find("\"overrides\"") - at);
  CHECK(section.find("\"a\"") != std::string::npos);
  CHECK(section.find("\"b\"") != std::string::npos);
  CodeFacts back = read_facts_document(doc);
  CHECK(back.call_edges.size() == 1);
}

TEST_CASE("schema errors") {
  CHECK_THROWS_AS(read_facts_document("{}"), SchemaError);
  CHECK_THROWS_AS(read_facts_document("not json"), SchemaError);

  CodeFacts f = parse_source("public class Foo {}", "Foo");
  std::string doc = write_facts_document(f);
  // drop type_name
  auto at = doc.find("\"type_name\": \"Foo\",\n");
  std::string broken = doc;
  broken.erase(at, std::string("\"type_name\": \"Foo\",\n").size());
  CHECK_THROWS_AS(read_facts_document(broken), SchemaError);
  // extra top-level field
  std::string extra = doc;
  extra.insert(extra.find("\"package_name\""), "\"bogus\": 1,\n  ");
  CHECK_THROWS_AS(read_facts_document(extra), SchemaError);
}

TEST_CASE("hand-authored document for RoundPeg") {
  const char* doc = R"json({
  "file_id": "RoundPeg",
  "package_name": "",
  "type_name": "RoundPeg",
  "kind": "class",
  "modifiers": ["public"],
  "extends_type": null,
  "implements_types": [],
  "imports": [],
  "fields": [],
  "constructors": [],
  "methods": [
    {
      "name": "getRadius",
      "return_type": "double",
      "parameters": [],
      "modifiers": ["public"],
      "is_override": false
    }
  ],
  "call_edges": [],
  "overrides": [],
  "nested_types": []
})json";
  CodeFacts f = read_facts_document(doc);
  REQUIRE(f.methods.size() == 1);
  CHECK(f.methods[0].name == "getRadius");
  CHECK(f.methods[0].return_type == "double");
}

TEST_CASE("call graph closure enforced on read") {
  const char* doc = R"json({
  "file_id": "C",
  "package_name": "",
  "type_name": "C",
  "kind": "class",
  "modifiers": [],
  "extends_type": null,
  "implements_types": [],
  "imports": [],
  "fields": [],
  "constructors": [],
  "methods": [],
  "call_edges": [["a", "b"]],
  "overrides": [],
  "nested_types": []
})json";
  CHECK_THROWS_AS(read_facts_document(doc), SchemaError);
}

TEST_SUITE_END();

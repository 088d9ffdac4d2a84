#include <map>

#include "distiller_corpus.hpp"
#include "doctest.h"
#include "maintminer/distiller.hpp"
#include "maintminer/java.hpp"
#include "maintminer/parallel.hpp"

using namespace maintminer;
using namespace maintminer::distiller;
namespace jv = maintminer::java;

namespace {

const std::string kCorpus = MAINTMINER_FIXTURES "/distiller";

ChangeCounts counts_of(std::initializer_list<std::pair<ChangeType, int>> items) {
  ChangeCounts c{};
  for (auto [t, n] : items) c[index_of(t)] += n;
  return c;
}

std::string klass(const std::string& body) { return "class K {\n  void m() {\n" + body + "  }\n}\n"; }

}  // namespace

TEST_CASE("lexer separates comments, literals and operators") {
  auto lx = jv::lex("/** doc */ int x = 0x1F + 1.5e-3; // tail\nString s = \"a//b\"; char c = '\\'';");
  REQUIRE(lx.comments.size() == 2);
  CHECK(lx.comments[0].javadoc);
  CHECK(lx.comments[0].text == "doc");
  CHECK(lx.comments[0].next_token == 0);
  CHECK_FALSE(lx.comments[1].javadoc);
  CHECK(lx.comments[1].text == "tail");
  std::vector<std::string> texts;
  for (const auto& t : lx.tokens) texts.push_back(t.text);
  CHECK(texts == std::vector<std::string>{"int", "x", "=", "0x1F", "+", "1.5e-3", ";", "String", "s", "=", "\"a//b\"",
                                          ";", "char", "c", "=", "'\\''", ";", ""});
  CHECK(lx.tokens.back().kind == jv::TokenKind::End);
  CHECK(lx.tokens[7].line == 2);
  CHECK_THROWS_AS(jv::lex("/* open"), jv::ParseError);
  CHECK_THROWS_AS(jv::lex("String s = \"open;\n"), jv::ParseError);
}

TEST_CASE("parser reads declarations of a compilation unit") {
  const auto cu = jv::parse(R"(package a.b;
import java.util.*;
import static java.lang.Math.max;

/** The type. */
@SuppressWarnings("x")
public final class Box<T extends Comparable<T>> extends Base implements Iterable<T>, java.io.Serializable {
  private final Map<String, List<T>> items = new HashMap<String, List<T>>(), spare;
  int[] counts = {1, 2}, other[];
  static { init(); }
  /** Makes one. */
  public Box(int n) throws IOException { this.n = n; }
  public <R> R map(final Function<? super T, ? extends R> f, int... rest) { return f.apply(null); }
  abstract void hook();
  enum Color { RED("r") { void x() {} }, GREEN; Color() {} Color(String s) {} }
  interface Listener { default void on() {} }
  record Pair(int a, String b) { Pair { check(a); } }
  @interface Tag { int value() default 3; }
}
)");
  CHECK(cu.package == "a.b");
  CHECK(cu.imports == std::vector<std::string>{"java.util.*", "static java.lang.Math.max"});
  REQUIRE(cu.types.size() == 1);
  const auto& t = cu.types[0];
  CHECK(t.kind == "class");
  CHECK(t.name == "Box");
  CHECK(t.type_params == "<T extends Comparable<T>>");
  CHECK(t.superclass == "Base");
  CHECK(t.interfaces == std::vector<std::string>{"Iterable<T>", "java.io.Serializable"});
  CHECK(t.javadoc == "The type.");
  CHECK(t.modifiers.keywords == std::set<std::string>{"public", "final"});
  CHECK(t.modifiers.annotations == std::vector<std::string>{"@SuppressWarnings(\"x\")"});
  REQUIRE(t.fields.size() == 4);
  CHECK(t.fields[0].name == "items");
  CHECK(t.fields[0].type == "Map<String,List<T>>");
  CHECK(t.fields[0].initializer == "new HashMap < String , List < T >> ( )");
  CHECK(t.fields[1].name == "spare");
  CHECK(t.fields[1].initializer.empty());
  CHECK(t.fields[2].initializer == "{ 1 , 2 }");
  CHECK(t.fields[3].type == "int[][]");
  REQUIRE(t.methods.size() == 4);
  CHECK(t.methods[0].kind == jv::MethodKind::StaticInitializer);
  CHECK(t.methods[1].kind == jv::MethodKind::Constructor);
  CHECK(t.methods[1].javadoc == "Makes one.");
  CHECK(t.methods[1].throws == std::vector<std::string>{"IOException"});
  CHECK(t.methods[2].signature() == "map(Function<? super T,? extends R>,int...)");
  CHECK(t.methods[2].type_params == "<R>");
  CHECK(t.methods[2].return_type == "R");
  CHECK_FALSE(t.methods[3].body.has_value());
  REQUIRE(t.types.size() == 4);
  CHECK(t.types[0].kind == "enum");
  REQUIRE(t.types[0].fields.size() == 2);
  CHECK(t.types[0].fields[0].enum_constant);
  CHECK(t.types[0].methods.size() == 2);
  CHECK(t.types[1].methods[0].modifiers.keywords.count("default"));
  CHECK(t.types[2].kind == "record");
  CHECK(t.types[2].fields.size() == 2);
  CHECK(t.types[2].methods[0].kind == jv::MethodKind::Constructor);
  CHECK(t.types[3].kind == "@interface");
  CHECK(t.types[3].methods[0].name == "value");
}

TEST_CASE("parser builds the statement tree of a body") {
  const auto cu = jv::parse(R"(class K {
  int f(int x) {
    int y = x;   // keep
    if (x > 0) { y++; } else if (x < 0) y--; else { y = 0; }
    for (int i = 0; i < 3; i++) y += i;
    for (String s : names) { use(s); }
    while (y > 10) y /= 2;
    do { y++; } while (y < 0);
    try (var r = open()) { r.read(); } catch (IOException | RuntimeException e) { log(e); } finally { close(); }
    switch (y) { case 1: case 2: y = 3; break; default: y = 4; }
    int z = switch (y) { case 1 -> 10; default -> { yield 20; } };
    outer: for (;;) { break outer; }
    synchronized (this) { y++; }
    Runnable r = () -> { go(); };
    class Local {}
    { nested(); }
    assert y > 0 : "positive";
    throw new IllegalStateException();
  }
}
)");
  const auto& m = cu.types.at(0).methods.at(0);
  REQUIRE(m.body.has_value());
  const auto& body = m.body->children;
  std::vector<jv::NodeKind> kinds;
  for (const auto& n : body) kinds.push_back(n.kind);
  using K = jv::NodeKind;
  CHECK(kinds == std::vector<K>{K::Statement, K::If, K::For, K::ForEach, K::While, K::Do, K::Try, K::Switch,
                                K::Statement, K::Labeled, K::Synchronized, K::Statement, K::LocalType, K::Statement,
                                K::Assert, K::Throw});
  CHECK(body[0].value == "int y = x");
  const auto& iff = body[1];
  CHECK(iff.value == "x > 0");
  REQUIRE(iff.children.size() == 2);
  CHECK(iff.children[0].kind == K::Then);
  CHECK(iff.children[1].kind == K::Else);
  CHECK(iff.children[1].children.at(0).kind == K::If);
  CHECK(body[2].value == "int i = 0 ; i < 3 ; i ++");
  CHECK(body[3].value == "String s : names");
  CHECK(body[5].value == "y < 0");
  CHECK(body[6].value == "var r = open ( )");
  REQUIRE(body[6].children.size() == 3);
  CHECK(body[6].children[1].kind == K::Catch);
  CHECK(body[6].children[2].kind == K::Finally);
  REQUIRE(body[7].children.size() == 3);
  CHECK(body[7].children[0].value == "case 1");
  CHECK(body[7].children[0].children.empty());
  CHECK(body[7].children[1].children.size() == 2);
  CHECK(body[12].value == "class Local");
  CHECK(body[13].value == "nested ( )");
  CHECK(m.comments == std::vector<std::string>{"keep"});
}

TEST_CASE("parser rejects malformed input") {
  CHECK_THROWS_AS(jv::parse("class A { void m( { } }"), jv::ParseError);
  CHECK_THROWS_AS(jv::parse("class A { void m() { if (x) } }"), jv::ParseError);
  CHECK_THROWS_AS(jv::parse("class A {"), jv::ParseError);
  CHECK_THROWS_AS(jv::parse("int x;"), jv::ParseError);
  CHECK(jv::parse("").types.empty());
  CHECK(jv::parse("package p; // only a comment\n").comments.size() == 1);
}

TEST_CASE("comments attach to the innermost body") {
  const auto cu = jv::parse(R"(// header
/** Doc. */
class A {
  // between members
  /* stray */ /** Method doc. */
  void m() {
    /* inside */
  }
  class B { /** orphan */ }
}
)");
  CHECK(cu.comments == std::vector<std::string>{"header"});
  const auto& a = cu.types[0];
  CHECK(a.javadoc == "Doc.");
  CHECK(a.comments == std::vector<std::string>{"between members", "stray"});
  CHECK(a.methods[0].javadoc == "Method doc.");
  CHECK(a.methods[0].comments == std::vector<std::string>{"inside"});
  CHECK(a.types[0].comments == std::vector<std::string>{"orphan"});
}

TEST_CASE("distiller corpus reproduces its oracle multisets") {
  const auto corpus = testing::load_distiller_corpus(kCorpus);
  REQUIRE(corpus.size() == 25);
  for (const auto& f : corpus) {
    INFO(f.name);
    const auto got = tally(distill(f.before, f.after, f.name));
    CHECK_MESSAGE(got == f.expected,
                  f.name << ": expected " << testing::describe(f.expected) << ", got " << testing::describe(got));
  }
}

TEST_CASE("identical inputs yield nothing and output is deterministic") {
  for (const auto& f : testing::load_distiller_corpus(kCorpus)) {
    for (const auto& side : {f.before, f.after}) {
      if (side && f.name != "25_unparseable_after") CHECK(distill(side, side).empty());
    }
    if (f.before && f.after) CHECK(distill(f.before, f.after) == distill(f.before, f.after));
  }
}

TEST_CASE("added and removed members are symmetric") {
  for (const auto& f : testing::load_distiller_corpus(kCorpus)) {
    if (!f.before || !f.after) continue;
    const auto fwd = tally(distill(f.before, f.after));
    const auto back = tally(distill(f.after, f.before));
    INFO(f.name);
    CHECK(fwd[index_of(ChangeType::ADDITIONAL_FUNCTIONALITY)] == back[index_of(ChangeType::REMOVED_FUNCTIONALITY)]);
    CHECK(fwd[index_of(ChangeType::REMOVED_FUNCTIONALITY)] == back[index_of(ChangeType::ADDITIONAL_FUNCTIONALITY)]);
    CHECK(fwd[index_of(ChangeType::ADDITIONAL_OBJECT_STATE)] == back[index_of(ChangeType::REMOVED_OBJECT_STATE)]);
    CHECK(fwd[index_of(ChangeType::STATEMENT_INSERT)] == back[index_of(ChangeType::STATEMENT_DELETE)]);
    CHECK(fwd[index_of(ChangeType::DOC_INSERT)] == back[index_of(ChangeType::DOC_DELETE)]);
  }
}

TEST_CASE("k fresh statements give k inserts and k deletes") {
  const std::string existing = "    int total = 0;\n    total += compute(seed);\n    report(total);\n";
  for (int k = 1; k <= 6; ++k) {
    std::string fresh;
    for (int i = 0; i < k; ++i)
      fresh += "    registry" + std::to_string(i) + ".publish(\"event" + std::to_string(i * 7) + "\", " +
               std::to_string(i) + ");\n";
    const auto small = klass(existing);
    const auto big = klass(existing + fresh);
    CHECK(tally(distill(small, big)) == counts_of({{ChangeType::STATEMENT_INSERT, k}}));
    CHECK(tally(distill(big, small)) == counts_of({{ChangeType::STATEMENT_DELETE, k}}));
  }
}

TEST_CASE("formatting-only edits yield nothing") {
  const std::string a = "class A{int f(int x){if(x>0){return x;}return -x;}}";
  const std::string b = "class A {\n\n  int f( int x )\n  {\n    if ( x > 0 )\n      { return x ; }\n    return - x;\n  }\n}\n";
  CHECK(distill(a, b).empty());
}

TEST_CASE("signature-level change types") {
  auto one = [](const std::string& a, const std::string& b) { return tally(distill(a, b)); };
  CHECK(one("class A { void m(int a, int b) {} }", "class A { void m(int b, int a) {} }") ==
        counts_of({{ChangeType::PARAMETER_ORDERING_CHANGE, 1}}));
  CHECK(one("class A { void m(int a) {} }", "class A { void m(long a) {} }") ==
        counts_of({{ChangeType::PARAMETER_TYPE_CHANGE, 1}}));
  CHECK(one("class A { void m(int a) {} }", "class A { void m(int b) {} }") ==
        counts_of({{ChangeType::PARAMETER_RENAMING, 1}}));
  CHECK(one("class A { void m(int a, int b) {} }", "class A { void m(int a) {} }") ==
        counts_of({{ChangeType::PARAMETER_DELETE, 1}}));
  CHECK(one("class A { void m() {} }", "class A { int m() { return 1; } }") ==
        counts_of({{ChangeType::RETURN_TYPE_INSERT, 1}, {ChangeType::STATEMENT_INSERT, 1}}));
  CHECK(one("class A { void m() {} }", "class A { final void m() {} }") ==
        counts_of({{ChangeType::REMOVING_METHOD_OVERRIDABILITY, 1}}));
  CHECK(one("class A { int x; }", "class A { final long y; }") ==
        counts_of({{ChangeType::REMOVED_OBJECT_STATE, 1}, {ChangeType::ADDITIONAL_OBJECT_STATE, 1}}));
  CHECK(one("class A { int x; }", "class A { final int x; }") ==
        counts_of({{ChangeType::REMOVING_ATTRIBUTE_MODIFIABILITY, 1}}));
  CHECK(one("class A { int x; }", "class A { long x; }") == counts_of({{ChangeType::ATTRIBUTE_TYPE_CHANGE, 1}}));
  CHECK(one("class A { int x; }", "class A { int y; }") == counts_of({{ChangeType::ATTRIBUTE_RENAMING, 1}}));
  CHECK(one("class A { int x = 1; }", "class A { int x = 2; }") == counts_of({{ChangeType::STATEMENT_UPDATE, 1}}));
  CHECK(one("public class A {}", "class A {}") == counts_of({{ChangeType::DECREASING_ACCESSIBILITY_CHANGE, 1}}));
  CHECK(one("final class A {}", "class A {}") == counts_of({{ChangeType::ADDING_CLASS_DERIVABILITY, 1}}));
  CHECK(one("class A extends B {}", "class A extends C {}") == counts_of({{ChangeType::PARENT_CLASS_CHANGE, 1}}));
  CHECK(one("class A extends B {}", "class A {}") == counts_of({{ChangeType::PARENT_CLASS_DELETE, 1}}));
  CHECK(one("class A implements I<X> {}", "class A implements I<Y>, J {}") ==
        counts_of({{ChangeType::PARENT_INTERFACE_CHANGE, 1}, {ChangeType::PARENT_INTERFACE_INSERT, 1}}));
  CHECK(one("class A implements I {}", "class A {}") == counts_of({{ChangeType::PARENT_INTERFACE_DELETE, 1}}));
  CHECK(one("class A { int x; void m() {} }", "class B { int x; void m() {} }") ==
        counts_of({{ChangeType::CLASS_RENAMING, 1}}));
  CHECK(one("class A { void m() throws X {} }", "class A { void m() {} }") == counts_of({{ChangeType::UNKNOWN, 1}}));
  CHECK(one("class A { void m() {} }", "/** d */ class A { void m() {} }") == counts_of({{ChangeType::DOC_INSERT, 1}}));
}

TEST_CASE("statement-level change types") {
  auto one = [](const std::string& a, const std::string& b) { return tally(distill(klass(a), klass(b))); };
  CHECK(one("if (a) { x(); } else { y(); }\n", "if (a) { x(); }\n") ==
        counts_of({{ChangeType::ALTERNATIVE_PART_DELETE, 1}, {ChangeType::STATEMENT_DELETE, 1}}));
  CHECK(one("while (running) { step(); }\n", "while (running && !stopped) { step(); }\n") ==
        counts_of({{ChangeType::CONDITION_EXPRESSION_CHANGE, 1}}));
  CHECK(one("if (a) { first(); }\nsecond();\n", "if (a) { first(); second(); }\n") ==
        counts_of({{ChangeType::STATEMENT_PARENT_CHANGE, 1}}));
  CHECK(one("// note one\nx();\n// note two\n", "// note two\nx();\n// note one\n") ==
        counts_of({{ChangeType::COMMENT_MOVE, 1}}));
  CHECK(one("// compute the totals here\nx();\n", "// compute all of the totals here\nx();\n") ==
        counts_of({{ChangeType::COMMENT_UPDATE, 1}}));
  CHECK(one("// obsolete\nx();\n", "x();\n") == counts_of({{ChangeType::COMMENT_DELETE, 1}}));
  CHECK(one("x();\n", "y = compute(alpha, beta);\n") ==
        counts_of({{ChangeType::STATEMENT_DELETE, 1}, {ChangeType::STATEMENT_INSERT, 1}}));
}

TEST_CASE("added and removed files") {
  const std::string two = "class A {}\nclass B { void m() { x(); } }\n";
  CHECK(tally(distill(std::nullopt, two)) == counts_of({{ChangeType::ADDITIONAL_CLASS, 2}}));
  CHECK(tally(distill(two, std::nullopt)) == counts_of({{ChangeType::REMOVED_CLASS, 2}}));
  CHECK(distill(std::string("class A {}"), std::string("class A {} class B {}")) ==
        ChangeList{ChangeType::ADDITIONAL_CLASS});
  CHECK_THROWS_AS(distill(std::nullopt, std::nullopt), ArgError);
}

TEST_CASE("unparseable sides") {
  CHECK(distill(std::string("class A {"), std::string("class A {}")) == ChangeList{ChangeType::UNKNOWN});
  CHECK(distill(std::nullopt, std::string("class {")) == ChangeList{ChangeType::UNKNOWN});
  try {
    distill(std::string("class A {"), std::string("class B {"), "src/A.java");
    FAIL("expected DistillError");
  } catch (const DistillError& e) {
    CHECK(e.path() == "src/A.java");
  }
}

TEST_CASE("distill_commit tags records and degrades failures") {
  vcs::CommitRecord c;
  c.commit_id = "abc";
  CHECK(distill_commit(c).empty());
  c.file_pairs.push_back({"A.java", std::string(klass("x = 1;\n")), std::string(klass("x = 2;\n"))});
  c.file_pairs.push_back({"B.java", std::string(klass("y = 1;\n")), std::string(klass("y = 3;\n"))});
  c.file_pairs.push_back({"C.java", std::string("class C {"), std::string("class C {")});
  const auto recs = distill_commit(c);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0] == ChangeRecord{"abc", ChangeType::STATEMENT_UPDATE, "A.java"});
  CHECK(recs[1] == ChangeRecord{"abc", ChangeType::STATEMENT_UPDATE, "B.java"});
  CHECK(recs[2] == ChangeRecord{"abc", ChangeType::UNKNOWN, "C.java"});
}

TEST_CASE("worked commit aggregates and prints in the pound format") {
  const auto dir = kCorpus + "/1a2b3c";
  const auto recs = distill_commit(testing::worked_commit(dir));
  ChangeCounts expected{};
  expected[index_of(ChangeType::PARAMETER_INSERT)] = 3;
  expected[index_of(ChangeType::ADDITIONAL_FUNCTIONALITY)] = 1;
  expected[index_of(ChangeType::DOC_DELETE)] = 2;
  distiller::CommitChanges cc{"1a2b3c", "demo", "", "", 0, "", recs};
  CHECK(cc.counts() == expected);

  const std::string worked = read_file(dir + "/worked.pound");
  const auto parsed = parse_pound(worked);
  REQUIRE(parsed.size() == 6);
  CHECK(parsed[3] == ChangeRecord{"1a2b3c", ChangeType::PARAMETER_INSERT, "file1.java"});
  // Our lines are exactly the worked lines, up to order and the trailing blanks.
  auto lines = [](const std::string& text) {
    std::vector<std::string> out;
    for (auto& l : split(text, '\n'))
      if (!trim(l).empty()) out.emplace_back(trim(l));
    std::sort(out.begin(), out.end());
    return out;
  };
  CHECK(lines(to_pound(recs)) == lines(worked));
  CHECK(to_pound({parsed[0]}) == "1a2b3c#PARAMETER_INSERT#file1.java\n");
  CHECK(parse_pound(to_pound(parsed)) == parsed);
}

TEST_CASE("pound parsing errors and paths with separators") {
  CHECK(parse_pound("c1#STATEMENT_UPDATED#src/a#b.java\n\n")[0] ==
        ChangeRecord{"c1", ChangeType::STATEMENT_UPDATE, "src/a#b.java"});
  CHECK_THROWS_AS(parse_pound("c1#NOT_A_TYPE#a.java"), ArgError);
  CHECK_THROWS_AS(parse_pound("ok#UNKNOWN#a.java\nbroken line"), ArgError);
  CHECK_THROWS_AS(parse_pound("#UNKNOWN#a.java"), ArgError);
  CHECK(parse_pound("").empty());
}

TEST_CASE("change JSONL round trip") {
  std::vector<CommitChanges> v{{"c1", "p", "Ann", "ann@x", 1700000000, "fix npe", {}},
                               {"c2", "p", "Bo", "bo@x", 1700000100, "multi\nline \"msg\"", {}}};
  v[1].changes = {{"c2", ChangeType::DOC_UPDATE, "A.java"}, {"c2", ChangeType::UNKNOWN, "B.java"}};
  const auto text = to_changes_jsonl(v);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(parse_changes_jsonl(text) == v);
  CHECK(v[1].counts()[index_of(ChangeType::DOC_UPDATE)] == 1);
  CHECK_THROWS_AS(parse_changes_jsonl("{\"commit_id\": 1}"), ArgError);
}

TEST_CASE("distill is safe to call concurrently") {
  const auto corpus = testing::load_distiller_corpus(kCorpus);
  std::vector<ChangeCounts> serial, threaded(corpus.size());
  for (const auto& f : corpus) serial.push_back(tally(distill(f.before, f.after)));
  parallel_for(corpus.size(), [&](std::size_t i) { threaded[i] = tally(distill(corpus[i].before, corpus[i].after)); });
  CHECK(serial == threaded);
}

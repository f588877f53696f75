#include <doctest.h>

#include <algorithm>
#include <regex>
#include <set>

#include "helpers.hpp"

using namespace miniproof;

namespace {

std::string account_source() { return load_builtin("account").source; }

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

std::vector<std::string> diagnostics_of(const std::string& source) {
  try {
    analyze(parse(source));
  } catch (const SemanticError& e) {
    std::vector<std::string> out;
    for (const auto& d : e.diagnostics()) out.push_back(d.message);
    return out;
  }
  return {};
}

bool any_contains(const std::vector<std::string>& msgs, const std::string& needle) {
  return std::any_of(msgs.begin(), msgs.end(),
                     [&](const std::string& m) { return m.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("account parses to one class with three features") {
  const Program p = parse(account_source());
  REQUIRE(p.classes.size() == 1);
  const ClassDecl& c = p.classes[0];
  CHECK(c.name == "ACCOUNT");
  CHECK(c.features.size() == 3);
  REQUIRE(c.invariant.size() == 1);
  CHECK(c.invariant[0].label == "non_negative_balance");
  CHECK(c.invariant[0].labeled);
}

TEST_CASE("account clause labels") {
  const Program p = parse(account_source());
  const ClassDecl& c = p.classes[0];
  CHECK(c.find_feature("make")->ensure[0].label == "balance_set");
  CHECK(c.find_feature("deposit")->require[0].label == "amount_not_negative");
  CHECK(c.find_feature("deposit")->ensure[0].label == "balance_increased");
  CHECK(c.find_feature("withdraw")->require[0].label == "enough_balance");
  CHECK(c.find_feature("withdraw")->ensure[0].label == "balance_decreased");
}

TEST_CASE("degenerate class parses but fails analysis for lack of a creator") {
  const Program p = parse("class EMPTY end");
  REQUIRE(p.classes.size() == 1);
  CHECK(p.classes[0].attributes.empty());
  CHECK(p.classes[0].features.empty());
  CHECK(any_contains(diagnostics_of("class EMPTY end"), "missing creator"));
}

TEST_CASE("deleting the final end is a parse error at end of input") {
  std::string src = account_source();
  const auto last = src.rfind("end");
  src.erase(last);
  const int lines = static_cast<int>(std::count(src.begin(), src.end(), '\n'));
  try {
    parse(src);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.pos().line >= lines);
    CHECK(!e.expected().empty());
    CHECK(std::find(e.expected().begin(), e.expected().end(), "'end'") != e.expected().end());
    CHECK(e.found() == "end of input");
  }
}

TEST_CASE("parse error reports line and column") {
  try {
    parse("class A\ncreate make\nfeature\n  x: INTEGER\n  make do x := end\nend");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.pos().line == 5);
    CHECK(e.pos().column > 1);
  }
}

TEST_CASE("old outside ensure is rejected") {
  const std::string src = replace_once(account_source(), "amount_not_negative: amount >= 0",
                                       "amount_not_negative: old amount >= 0");
  CHECK(any_contains(diagnostics_of(src), "old outside ensure"));
}

TEST_CASE("modify target must be a model query") {
  const std::string src = replace_once(load_builtin("tokeneer_enrolment").source,
                                       "modify current_display", "modify no_such_query");
  const auto msgs = diagnostics_of(src);
  REQUIRE(msgs.size() == 1);
  CHECK(msgs[0].find("not a model query") != std::string::npos);
}

TEST_CASE("semantic errors are collected, not just the first") {
  const std::string src =
      "class A\ncreate make\nfeature\n  x: INTEGER\n  make do x := True end\n"
      "  f do y := 1 end\nend";
  const auto msgs = diagnostics_of(src);
  CHECK(msgs.size() == 2);
  CHECK(any_contains(msgs, "type mismatch"));
  CHECK(any_contains(msgs, "unresolved name"));
}

TEST_CASE("type rules for has") {
  const std::string src =
      "class A\ncreate make\nfeature\n  s: SET_OF_STRING\n  n: INTEGER\n"
      "  make do end\n  f require s.has (n) do end\nend";
  CHECK(any_contains(diagnostics_of(src), "'has' requires a STRING argument"));
}

TEST_CASE("call arity is checked") {
  const std::string src =
      "class B\ncreate make\nfeature\n  make do end\n  g (k: INTEGER) do end\nend\n"
      "class A\ncreate make\nfeature\n  b: B\n  make do create b.make b.g (1, 2) end\nend";
  CHECK(any_contains(diagnostics_of(src), "arity mismatch"));
}

TEST_CASE("duplicate creator and duplicate class") {
  const std::string dup_creator =
      "class A\ncreate make, other\nfeature\n  make do end\n  other do end\nend";
  CHECK(any_contains(diagnostics_of(dup_creator), "duplicate creator"));
  const std::string dup_class =
      "class A\ncreate make\nfeature\n  make do end\nend\nclass A\ncreate make\nfeature\n  make do end\nend";
  CHECK(any_contains(diagnostics_of(dup_class), "duplicate class"));
}

TEST_CASE("creation expressions are accepted in contracts only") {
  const std::string ok = load_builtin("contract_creation_error").source;
  CHECK_NOTHROW(analyze(parse(ok)));
  const std::string body =
      "class A\ncreate make\nfeature\n  b: BOOLEAN\n  make do b := (create A) = Void end\nend";
  CHECK(any_contains(diagnostics_of(body), "creation expression outside a contract clause"));
}

TEST_CASE("default model queries") {
  const CheckedProgram acc = testing::load("account");
  CHECK(acc.model_queries("ACCOUNT") == std::vector<std::string>{"balance"});
  CHECK(default_model_queries(parse("class EMPTY end").classes[0]).empty());

  const CheckedProgram tok = testing::load("tokeneer_enrolment");
  const auto& q = tok.model_queries("ID_STATION");
  CHECK(std::find(q.begin(), q.end(), "current_display") != q.end());
  CHECK(std::find(q.begin(), q.end(), "constants") == q.end());
  // Constants are not part of the abstract state of classes without a note.
  CHECK(tok.model_queries("FLOPPY").empty());
}

TEST_CASE("string pool matches the literals in the source") {
  const std::string src = load_builtin("tokeneer_enrolment").source;
  // Independent oracle: every double-quoted token outside comments.
  std::set<std::string> literals;
  std::istringstream in(src);
  for (std::string line; std::getline(in, line);) {
    line = line.substr(0, line.find("--"));
    static const std::regex quoted("\"([^\"]*)\"");
    for (auto it = std::sregex_iterator(line.begin(), line.end(), quoted); it != std::sregex_iterator(); ++it)
      literals.insert((*it)[1]);
  }
  const Program p = parse(src);
  const std::set<std::string> pool(p.string_pool.begin(), p.string_pool.end());
  CHECK(pool == literals);
  CHECK(p.string_pool.size() == pool.size());
  CHECK(p.string_pool.size() == 12);
  CHECK(p.string_pool.front() == "blank");
}

TEST_CASE("pool holds every message referenced by the constant sets") {
  const CheckedProgram p = testing::load("tokeneer_enrolment");
  const auto& pool = p.program().string_pool;
  const ClassDecl& consts = p.cls("CONST");
  for (const auto& a : consts.attributes) {
    REQUIRE(a.constant);
    for (const auto& s : a.constant->elements)
      CHECK(std::find(pool.begin(), pool.end(), s) != pool.end());
  }
}

TEST_CASE("tokeneer classes and station invariant") {
  const CheckedProgram p = testing::load("tokeneer_enrolment");
  std::vector<std::string> names;
  for (const auto& c : p.program().classes) names.push_back(c.name);
  CHECK(names == std::vector<std::string>{"CONST", "SCREEN_DISPLAY", "FLOPPY", "INTERNAL_S",
                                          "ID_STATION", "ENCLAVE_OPERS"});
  const ClassDecl& st = p.cls("ID_STATION");
  REQUIRE(st.invariant.size() >= 2);
  CHECK(pretty(st.invariant[0].expr) == "constants.display_message.has (current_display)");
  CHECK(pretty(st.invariant[1].expr) == "constants /= Void");
  CHECK(st.invariant[0].label == "invariant_1");
  CHECK(!st.invariant[0].labeled);
  CHECK(st.creator == "make");
}

TEST_CASE("pretty-print round trip on every corpus source") {
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    const Program first = parse(load_builtin(name).source);
    const std::string printed = pretty(first);
    const Program second = parse(printed);
    CHECK(pretty(second) == printed);
    REQUIRE(second.classes.size() == first.classes.size());
    for (std::size_t i = 0; i < first.classes.size(); ++i) {
      CHECK(second.classes[i].features.size() == first.classes[i].features.size());
      CHECK(second.classes[i].invariant.size() == first.classes[i].invariant.size());
    }
    CHECK(second.string_pool == first.string_pool);
  }
}

TEST_CASE("analysis is idempotent") {
  for (const auto& name : {"account", "tokeneer_enrolment"}) {
    const CheckedProgram a = testing::load(name);
    const CheckedProgram b = analyze(a.program());
    REQUIRE(a.symbols().size() == b.symbols().size());
    for (const auto& [cls, syms] : a.symbols()) {
      const auto& other = b.symbols().at(cls);
      CHECK(syms.attributes == other.attributes);
      CHECK(syms.model_queries == other.model_queries);
      CHECK(syms.creator == other.creator);
    }
  }
}

TEST_CASE("constant attributes and set literals") {
  const CheckedProgram p = testing::load("tokeneer_enrolment");
  const Attribute* dm = p.cls("CONST").find_attribute("display_message");
  REQUIRE(dm);
  CHECK(dm->is_constant());
  CHECK(dm->type == Type::string_set());
  CHECK(dm->constant->elements == std::vector<std::string>{"blank", "welcome"});
}

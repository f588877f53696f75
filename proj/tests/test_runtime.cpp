#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "miniproof/runtime.hpp"

using namespace miniproof;

namespace {

ExprPtr attr(const std::string& n, Type t) { return make_name(n, NameRef::Attribute, std::move(t)); }

Violation violation_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ContractViolation& v) {
    return v.violation();
  }
  FAIL("expected a contract violation");
  return {};
}

class ExprGen {
 public:
  explicit ExprGen(unsigned seed) : rng_(seed) {}

  ExprPtr boolean(int depth) {
    if (depth == 0) return atom();
    switch (pick(5)) {
      case 0: return make_binary(BinaryOp::And, boolean(depth - 1), boolean(depth - 1));
      case 1: return make_binary(BinaryOp::Or, boolean(depth - 1), boolean(depth - 1));
      case 2: return make_binary(BinaryOp::Implies, boolean(depth - 1), boolean(depth - 1));
      case 3: return make_unary(UnaryOp::Not, boolean(depth - 1));
      default: return atom();
    }
  }

  Environment env() {
    const char* pool[] = {"a", "b", "c"};
    Environment e;
    e["i"] = std::int64_t{pick(9) - 4};
    e["j"] = std::int64_t{pick(9) - 4};
    e["p"] = pick(2) == 1;
    const int k = pick(4);
    e["s"] = k == 3 ? Value{VoidValue{}} : Value{std::string(pool[k])};
    StringSet set;
    for (const char* x : pool)
      if (pick(2)) set.insert(x);
    e["t"] = set;
    return e;
  }

 private:
  std::mt19937 rng_;
  int pick(int n) { return static_cast<int>(rng_() % static_cast<unsigned>(n)); }

  ExprPtr integer(int depth) {
    if (depth == 0 || pick(3) == 0) {
      switch (pick(4)) {
        case 0: return attr("i", Type::integer());
        case 1: return attr("j", Type::integer());
        case 2: return make_unary(UnaryOp::Neg, attr("i", Type::integer()));
        default: return make_int(pick(7) - 3);
      }
    }
    const BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul};
    return make_binary(ops[pick(3)], integer(depth - 1), integer(depth - 1));
  }

  ExprPtr atom() {
    const char* lits[] = {"a", "b", "c"};
    switch (pick(6)) {
      case 0: return attr("p", Type::boolean());
      case 1:
        return make_binary(pick(2) ? BinaryOp::Eq : BinaryOp::Ne, attr("s", Type::string()),
                           pick(4) ? make_string(lits[pick(3)]) : make_void());
      case 2: return make_has(attr("t", Type::string_set()), make_string(lits[pick(3)]));
      case 3: return make_has(make_set({"a", "c"}), attr("s", Type::string()));
      default: {
        const BinaryOp cmp[] = {BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt,
                                BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge};
        return make_binary(cmp[pick(6)], integer(2), integer(2));
      }
    }
  }
};

std::string outcome(const std::function<Value()>& f) {
  try {
    return to_string(f());
  } catch (const std::exception&) {
    return "<error>";
  }
}

const char* kRecursive =
    "class LOOP\ncreate make\nfeature\n  next: LOOP\n  make do end\n"
    "  spin do create next.make next.spin end\nend";

}  // namespace

TEST_CASE("deposit then withdraw leaves the difference") {
  const CheckedProgram p = testing::load("account");
  Machine m(p);
  const RefValue a = m.create("ACCOUNT", {});
  CHECK(m.read(a, "balance") == Value{std::int64_t{0}});
  m.call(a, "deposit", {std::int64_t{50}});
  m.call(a, "withdraw", {std::int64_t{20}});
  CHECK(m.read(a, "balance") == Value{std::int64_t{30}});
  for (const auto& c : m.checks()) CHECK(c.ok);
}

TEST_CASE("withdraw on a fresh account violates its precondition") {
  const CheckedProgram p = testing::load("account");
  Machine m(p);
  const RefValue a = m.create("ACCOUNT", {});
  const Violation v = violation_of([&] { m.call(a, "withdraw", {std::int64_t{20}}); });
  CHECK(v.kind == CheckKind::Precondition);
  CHECK(v.label == "enough_balance");
  CHECK(v.class_name == "ACCOUNT");
  CHECK(v.feature_name == "withdraw");
  CHECK(!obligation_kind(v.kind));
  CHECK(m.read(a, "balance") == Value{std::int64_t{0}});
}

TEST_CASE("station creation establishes its initial state") {
  const CheckedProgram p = testing::load("tokeneer_enrolment");
  Machine m(p);
  const RefValue s = m.create("ID_STATION", {});
  CHECK(m.read(s, "enclave_status") == Value{std::string("not_enrolled")});
  CHECK(m.read(s, "floppy_presence") == Value{std::string("absent")});
  CHECK(m.read(s, "token_removal_timeout") == Value{std::int64_t{0}});
  CHECK(m.read(s, "current_display") == Value{std::string("blank")});
  CHECK(m.read(s, "current_screen.msg") == Value{std::string("clear")});
  CHECK(m.read(s, "cons_floppy.not_enrolled") == Value{std::string("not_enrolled")});
  CHECK(m.read(s, "constants.display_message") == Value{StringSet{"blank", "welcome"}});
}

TEST_CASE("path-keyed evaluation examples") {
  const Environment now{{"balance", std::int64_t{7}}, {"amount", std::int64_t{3}}};
  const Environment before{{"balance", std::int64_t{4}}};
  const ExprPtr post = make_binary(
      BinaryOp::Eq, attr("balance", Type::integer()),
      make_binary(BinaryOp::Add, make_old(attr("balance", Type::integer())),
                  make_name("amount", NameRef::Param, Type::integer())));
  CHECK(eval_expr(post, now, before) == Value{true});
  CHECK(eval_expr(post, now, now) == Value{false});

  const ExprPtr has = make_has(make_set({"blank", "welcome"}), attr("d", Type::string()));
  CHECK(eval_expr(has, {{"d", std::string("blank")}}) == Value{true});
  CHECK(eval_expr(has, {{"d", std::string("clear")}}) == Value{false});

  const ExprPtr read = make_qualified(attr("screen", Type::ref("SCREEN_DISPLAY")), "msg", Type::string());
  CHECK(eval_expr(read, {{"screen", RefValue{0}}, {"screen.msg", std::string("clear")}}) ==
        Value{std::string("clear")});
  try {
    eval_expr(read, {{"screen", VoidValue{}}});
    FAIL("expected VoidDereference");
  } catch (const VoidDereference& e) {
    CHECK(e.receiver() == "screen");
  }

  CHECK_THROWS_AS(eval_expr(make_binary(BinaryOp::Eq, make_create("CONST"), make_void()), {}),
                  UnsupportedInContract);
}

TEST_CASE("eval_expr agrees with the formula evaluator on random expressions") {
  ExprGen gen(5);
  int pairs = 0;
  for (int k = 0; k < 500; ++k) {
    const ExprPtr e = gen.boolean(3);
    CAPTURE(pretty(e));
    for (int n = 0; n < 20; ++n, ++pairs) {
      const Environment env = gen.env();
      CAPTURE(to_string(env));
      CHECK(outcome([&] { return eval_expr(e, env); }) == outcome([&] { return evaluate(e, env); }));
    }
  }
  CHECK(pairs == 10000);
}

TEST_CASE("a frame violation rolls back the whole call") {
  const CheckedProgram p = testing::load("tokeneer_frame_mutant");
  Machine m(p);
  const RefValue e = m.create("ENCLAVE_OPERS", {});
  const std::string before = m.fingerprint(e);
  const Violation v = violation_of([&] { m.call(e, "request_enrolment", {}); });
  CHECK(v.kind == CheckKind::Frame);
  CHECK(v.label == "frame:audit_log_version");
  CHECK(m.fingerprint(e) == before);
  // The machine stays usable after a rollback.
  CHECK(m.read(e, "station.current_screen.msg") == Value{std::string("clear")});
}

TEST_CASE("invariant violation through a qualified call") {
  const CheckedProgram p = testing::load("tokeneer_noprecond_mutant");
  Machine m(p);
  const RefValue s = m.create("ID_STATION", {});
  const Violation v = violation_of([&] { m.call(s, "set_current_display", {std::string("clear")}); });
  CHECK(v.kind == CheckKind::InvariantMaintenance);
  CHECK(v.label == "invariant_1");
  CHECK(m.read(s, "current_display") == Value{std::string("blank")});
}

TEST_CASE("callee precondition failures are charged to the caller") {
  const CheckedProgram p = testing::compile(
      "class B\ncreate make\nfeature\n  make do end\n"
      "  g (k: INTEGER) require positive: k > 0 do end\nend\n"
      "class A\ncreate make\nfeature\n  b: B\n  make do create b.make end\n"
      "  f do b.g (0) end\nend");
  Machine m(p);
  const RefValue a = m.create("A", {});
  const Violation v = violation_of([&] { m.call(a, "f", {}); });
  CHECK(v.kind == CheckKind::CalleePrecondition);
  CHECK(v.label == "B.g.positive");
  CHECK(v.class_name == "A");
  CHECK(v.feature_name == "f");
}

TEST_CASE("old values are taken on entry to the call") {
  const CheckedProgram p = testing::load("tokeneer_enrolment");
  Machine m(p);
  const RefValue e = m.create("ENCLAVE_OPERS", {});
  m.clear_checks();
  m.call(e, "request_enrolment", {});
  int ensures = 0;
  for (const auto& c : m.checks())
    if (c.phase == "ensure" && c.feature_name == "request_enrolment") {
      CHECK(c.ok);
      ++ensures;
    }
  CHECK(ensures == 4);
  m.call(e, "insert_floppy", {true});
  const Violation v = violation_of([&] { m.call(e, "request_enrolment", {}); });
  CHECK(v.kind == CheckKind::Precondition);
  CHECK(v.label == "floppy_absent");
}

TEST_CASE("overflow is monitored only at a machine width") {
  const CheckedProgram p = testing::load("account_overflow_mutant");
  {
    Machine m(p);
    const RefValue a = m.create("ACCOUNT", {});
    m.call(a, "deposit", {std::int64_t{127}});
    m.call(a, "deposit", {std::int64_t{0}});
    CHECK(m.read(a, "balance") == Value{std::int64_t{127}});
  }
  RuntimeOptions ro;
  ro.overflow_width = 8;
  Machine m(p, ro);
  const RefValue a = m.create("ACCOUNT", {});
  const Violation v = violation_of([&] { m.call(a, "withdraw", {std::int64_t{-128}}); });
  CHECK(v.kind == CheckKind::Overflow);
  CHECK(v.label.rfind("overflow:", 0) == 0);
  CHECK(m.read(a, "balance") == Value{std::int64_t{0}});
}

TEST_CASE("unbounded recursion stops at the step budget") {
  const CheckedProgram p = testing::compile(kRecursive);
  RuntimeOptions ro;
  ro.step_budget = 500;
  Machine m(p, ro);
  const RefValue r = m.create("LOOP", {});
  CHECK_THROWS_AS(m.call(r, "spin", {}), StepBudgetExceeded);
  Machine def(p);
  const RefValue r2 = def.create("LOOP", {});
  CHECK_THROWS_AS(def.call(r2, "spin", {}), StepBudgetExceeded);
}

TEST_CASE("flatten renumbers references in discovery order") {
  const CheckedProgram p = testing::load("tokeneer_enrolment");
  Machine m(p);
  m.create("SCREEN_DISPLAY", {});
  const RefValue e = m.create("ENCLAVE_OPERS", {});
  const Environment flat = m.flatten(e);
  CHECK(to_string(flat.at("station")) == "#1");
  CHECK(flat.at("station.current_display") == Value{std::string("blank")});
  CHECK(flat.count("station.constants.display_message") == 0);
  Machine other(p);
  const RefValue e2 = other.create("ENCLAVE_OPERS", {});
  CHECK(other.fingerprint(e2) == m.fingerprint(e));
}

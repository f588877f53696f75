#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "miniproof/explore.hpp"
#include "miniproof/scenario.hpp"

using namespace miniproof;

namespace {

VerifyOptions small_range(const CorpusEntry& e) {
  VerifyOptions o = e.options;
  o.int_lo = -4;
  o.int_hi = 4;
  return o;
}

ExploreOptions explore_options(const VerifyOptions& o) {
  ExploreOptions eo;
  eo.runtime.overflow_width = o.check_overflow ? o.overflow_width : 0;
  return eo;
}

struct Verified {
  CheckedProgram program;
  Domains domains;
  std::vector<std::pair<Obligation, Verdict>> verdicts;
};

Verified verify(const CorpusEntry& e, const VerifyOptions& o) {
  CheckedProgram p = analyze(parse(e.source));
  Domains d = domains_for(p, o);
  auto v = discharge_all(generate_obligations(p, o), d, 0);
  return {std::move(p), std::move(d), std::move(v)};
}

}  // namespace

TEST_CASE("no monitored violation contradicts a Discharged verdict") {
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    const CorpusEntry e = load_builtin(name);
    const VerifyOptions o = small_range(e);
    const Verified v = verify(e, o);
    const SweepResult s = soundness_sweep(v.program, v.verdicts, v.domains, explore_options(o));
    for (const auto& x : s.exceptions) CAPTURE(x);
    CHECK(s.ok());
    CHECK(s.states > 0);
    CHECK(s.transitions > s.states);
    // The monitor trips exactly when something is left unproved.
    bool unproved = false;
    for (const auto& [ob, verdict] : v.verdicts) unproved |= verdict.kind != Verdict::Kind::Discharged;
    CHECK(unproved == (s.violations > 0));
    if (e.parent.empty()) CHECK(!unproved);
  }
}

TEST_CASE("failed verdicts replay at run time") {
  for (const auto& name : builtin_names()) {
    const CorpusEntry e = load_builtin(name);
    for (const VerifyOptions& o : {e.options, small_range(e)}) {
      const Verified v = verify(e, o);
      for (const auto& [ob, verdict] : v.verdicts) {
        if (verdict.kind != Verdict::Kind::Failed) continue;
        CAPTURE(name);
        CAPTURE(ob.id);
        CAPTURE(o.int_lo);
        const ReplayResult r =
            replay_counterexample(v.program, ob, verdict.counterexample, v.domains, explore_options(o));
        CAPTURE(r.detail);
        if (ob.kind == ObligationKind::Frame) {
          // The modular frame counterexample assumes a station state that
          // the enclave never produces.
          CHECK(r.status == ReplayResult::Status::Impossible);
          continue;
        }
        CHECK(r.status == ReplayResult::Status::Reproduced);
        REQUIRE(r.violation);
        CHECK(obligation_kind(r.violation->kind) == ob.kind);
        CHECK(r.violation->class_name == ob.class_name);
        CHECK(r.violation->feature_name == ob.feature_name);
      }
    }
  }
}

TEST_CASE("explored states are distinct, in domain and reachable by their history") {
  const CheckedProgram p = testing::load("tokeneer_enrolment");
  VerifyOptions o;
  o.int_lo = -2;
  o.int_hi = 2;
  const Domains d = domains_for(p, o);
  std::set<std::string> seen;
  int replayed = 0;
  explore(p, "ENCLAVE_OPERS", d, {}, [&](const ExploredState& s) {
    CHECK(seen.insert(s.machine.fingerprint(s.root)).second);
    CHECK(in_domain(s.machine, s.root, d));
    std::string text;
    for (const auto& h : s.history) text += h + "\n";
    const Trace t = run_scenario(p, parse_scenario(text));
    CHECK(t.ok);
    CHECK(t.final_states.at("x") == s.machine.flatten(s.root));
    ++replayed;
    return true;
  });
  CHECK(replayed == static_cast<int>(seen.size()));
  CHECK(replayed > 5);
}

TEST_CASE("exploration respects its caps") {
  const CheckedProgram p = testing::load("account");
  VerifyOptions o;
  o.int_lo = -8;
  o.int_hi = 8;
  const Domains d = domains_for(p, o);
  ExploreOptions eo;
  eo.max_states = 4;
  std::size_t n = 0;
  explore(p, "ACCOUNT", d, eo, [&](const ExploredState&) { return ++n, true; });
  CHECK(n == 4);
  eo.max_states = 100;
  eo.max_depth = 0;
  n = 0;
  explore(p, "ACCOUNT", d, eo, [&](const ExploredState& s) {
    CHECK(s.history.size() == 1);
    return ++n, true;
  });
  CHECK(n == 1);
  // Balance reaches every value of the range, and nothing outside it.
  eo.max_depth = 8;
  std::set<std::int64_t> balances;
  explore(p, "ACCOUNT", d, eo, [&](const ExploredState& s) {
    balances.insert(std::get<std::int64_t>(s.machine.read(s.root, "balance")));
    return true;
  });
  CHECK(balances.size() == 9);
  CHECK(*balances.begin() == 0);
  CHECK(*balances.rbegin() == 8);
}

TEST_CASE("argument tuples are the product of parameter domains") {
  const CheckedProgram p = testing::load("tokeneer_enrolment");
  VerifyOptions o;
  o.int_lo = -1;
  o.int_hi = 1;
  const Domains d = domains_for(p, o);
  const ClassDecl& st = p.cls("ID_STATION");
  CHECK(argument_tuples(*st.find_feature("set_current_display"), d).size() == d.string_pool.size() + 1);
  CHECK(argument_tuples(*st.find_feature("set_floppy_data"), d).size() == 2);
  CHECK(argument_tuples(*st.find_feature("make"), d) == std::vector<std::vector<Value>>{{}});
  const CheckedProgram q = testing::compile(
      "class B\ncreate make\nfeature\n  make do end\nend\n"
      "class A\ncreate make\nfeature\n  make do end\n  g (k: INTEGER; b: B) do end\nend");
  const auto tuples = argument_tuples(*q.cls("A").find_feature("g"), domains_for(q, o));
  CHECK(tuples.size() == 3);
  for (const auto& t : tuples) CHECK(is_void(t.at(1)));
}

TEST_CASE("widening the integer range never turns a failure into a proof") {
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    const CorpusEntry e = load_builtin(name);
    VerifyOptions narrow = small_range(e);
    if (narrow.check_overflow) continue;  // overflow depends on the width, not the range
    VerifyOptions wide = narrow;
    wide.int_lo = -10;
    wide.int_hi = 10;
    const Verified a = verify(e, narrow);
    const Verified b = verify(e, wide);
    REQUIRE(a.verdicts.size() == b.verdicts.size());
    for (std::size_t i = 0; i < a.verdicts.size(); ++i)
      if (a.verdicts[i].second.kind == Verdict::Kind::Failed)
        CHECK(b.verdicts[i].second.kind == Verdict::Kind::Failed);
  }
}

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "miniproof/report.hpp"

using namespace miniproof;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

struct LineDiff {
  std::vector<std::string> removed, added;
};

// Classic LCS table; lines outside the common subsequence form the diff.
LineDiff diff_lines(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> t(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      t[i][j] = a[i] == b[j] ? t[i + 1][j + 1] + 1 : std::max(t[i + 1][j], t[i][j + 1]);
  LineDiff d;
  std::size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (a[i] == b[j]) {
      ++i;
      ++j;
    } else if (t[i + 1][j] >= t[i][j + 1]) {
      d.removed.push_back(a[i++]);
    } else {
      d.added.push_back(b[j++]);
    }
  }
  while (i < n) d.removed.push_back(a[i++]);
  while (j < m) d.added.push_back(b[j++]);
  return d;
}

bool keyword_only(const std::string& line) {
  const auto b = line.find_first_not_of(' ');
  return b != std::string::npos && line.substr(b) == "require";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("corpus entries in order") {
  CHECK(builtin_names() == std::vector<std::string>{
                               "account", "account_overflow_mutant", "account_noguard_mutant",
                               "tokeneer_enrolment", "tokeneer_noprecond_mutant",
                               "tokeneer_frame_mutant", "contract_creation_error"});
  for (const auto& n : builtin_names()) {
    const CorpusEntry e = load_builtin(n);
    CHECK(e.name == n);
    CHECK(!e.notes.empty());
    CHECK(!e.manifest.empty());
    CHECK(!e.scenarios.empty());
  }
}

TEST_CASE("unknown entries are rejected") {
  CHECK_THROWS_AS(load_builtin("no_such_entry"), UnknownCorpusEntry);
  CHECK(!builtin_scenario("no_such_scenario"));
}

TEST_CASE("manifests list exactly the generated obligations with matching verdicts") {
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    const CorpusEntry entry = load_builtin(name);
    const CheckedProgram p = analyze(parse(entry.source));
    const auto obs = generate_obligations(p, entry.options);
    std::set<std::string> generated, listed;
    for (const auto& o : obs) generated.insert(o.id);
    for (const auto& r : entry.manifest) listed.insert(r.id);
    CHECK(generated == listed);
    CHECK(listed.size() == entry.manifest.size());

    const auto verdicts = discharge_all(obs, domains_for(p, entry.options), 0);
    for (const auto& [o, v] : verdicts) {
      const ManifestRow* row = entry.find(o.id);
      REQUIRE(row);
      CAPTURE(o.id);
      CHECK(v.kind == row->verdict);
      if (v.kind == Verdict::Kind::Failed) {
        REQUIRE(row->counterexample);
        CHECK(*row->counterexample == v.counterexample);
      } else {
        CHECK(!row->counterexample);
      }
    }
  }
}

TEST_CASE("originals discharge completely and each mutant fails somewhere") {
  for (const auto& name : builtin_names()) {
    const CorpusEntry e = load_builtin(name);
    int bad = 0;
    for (const auto& r : e.manifest) bad += r.verdict != Verdict::Kind::Discharged;
    CAPTURE(name);
    if (e.parent.empty())
      CHECK(bad == 0);
    else
      CHECK(bad == 1);
  }
}

TEST_CASE("each mutant differs from its parent by one clause or statement") {
  for (const auto& name : builtin_names()) {
    const CorpusEntry e = load_builtin(name);
    if (e.parent.empty()) continue;
    CAPTURE(name);
    const CorpusEntry parent = load_builtin(e.parent);
    CHECK(parent.parent.empty());
    LineDiff d = diff_lines(lines_of(parent.source), lines_of(e.source));
    auto strip = [](std::vector<std::string>& v) {
      v.erase(std::remove_if(v.begin(), v.end(), keyword_only), v.end());
    };
    strip(d.removed);
    strip(d.added);
    CHECK(d.removed.size() <= 1);
    CHECK(d.added.size() <= 1);
    CHECK(d.removed.size() + d.added.size() >= 1);
    CHECK(analyze(parse(e.source)).program().classes.size() ==
          analyze(parse(parent.source)).program().classes.size());
  }
}

TEST_CASE("manifest text round trips") {
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    const CorpusEntry e = load_builtin(name);
    CorpusEntry back;
    back.name = e.name;
    back.source = e.source;
    parse_manifest(render_manifest(e), back);
    CHECK(back.parent == e.parent);
    CHECK(back.notes == e.notes);
    CHECK(back.options.int_lo == e.options.int_lo);
    CHECK(back.options.int_hi == e.options.int_hi);
    CHECK(back.options.check_overflow == e.options.check_overflow);
    CHECK(back.options.overflow_width == e.options.overflow_width);
    REQUIRE(back.manifest.size() == e.manifest.size());
    for (std::size_t i = 0; i < e.manifest.size(); ++i) {
      CHECK(back.manifest[i].id == e.manifest[i].id);
      CHECK(back.manifest[i].verdict == e.manifest[i].verdict);
      CHECK(back.manifest[i].counterexample == e.manifest[i].counterexample);
    }
    REQUIRE(back.scenarios.size() == e.scenarios.size());
    for (std::size_t i = 0; i < e.scenarios.size(); ++i) {
      CHECK(back.scenarios[i].name == e.scenarios[i].name);
      CHECK(back.scenarios[i].expect_ok == e.scenarios[i].expect_ok);
    }
  }
}

TEST_CASE("malformed manifests are rejected") {
  CorpusEntry e;
  CHECK_THROWS_AS(parse_manifest("options int_range=5..1\n", e), std::invalid_argument);
  CHECK_THROWS_AS(parse_manifest("A.f.Postcondition.0 Maybe\n", e), std::invalid_argument);
  CHECK_THROWS_AS(parse_manifest("scenario x perhaps\n", e), std::invalid_argument);
  CHECK_THROWS_AS(parse_manifest("counterexample A.f.Postcondition.0 x=1\n", e), std::invalid_argument);
}

TEST_CASE("environment text round trips") {
  const Environment env{{"amount", std::int64_t{-8}}, {"balance", std::int64_t{0}},
                        {"v", std::string("clear")}, {"flag", false}, {"s", VoidValue{}}};
  CHECK(parse_environment(to_string(env)) == env);
  CHECK(parse_environment("").empty());
}

TEST_CASE("export writes a loadable copy") {
  const auto dir = std::filesystem::temp_directory_path() / "miniproof_export_test";
  std::filesystem::remove_all(dir);
  const CorpusEntry e = load_builtin("tokeneer_frame_mutant");
  const auto files = export_entry(e, dir);
  CHECK(files.size() == 2 + e.scenarios.size());
  CHECK(slurp(dir / "tokeneer_frame_mutant.ccl") == e.source);
  CorpusEntry back;
  parse_manifest(slurp(dir / "tokeneer_frame_mutant.manifest"), back);
  CHECK(back.manifest.size() == e.manifest.size());
  for (const auto& s : e.scenarios) CHECK(slurp(dir / "scenarios" / (s.name + ".scn")) == s.text);
  std::filesystem::remove_all(dir);
}

TEST_CASE("verification output is reproducible") {
  const CheckedProgram p = testing::load("tokeneer_noprecond_mutant");
  const auto run_once = [&](unsigned workers) {
    const auto obs = generate_obligations(p, {});
    const Domains d = domains_for(p, {});
    return to_json(build_report(discharge_all(obs, d, workers), d, 0), false);
  };
  const std::string first = run_once(1);
  CHECK(run_once(1) == first);
  CHECK(run_once(3) == first);
}

#include <doctest.h>

#include <cmath>
#include <json.hpp>

#include "helpers.hpp"
#include "miniproof/report.hpp"

using namespace miniproof;

namespace {

std::vector<std::pair<Obligation, Verdict>> synthetic(int d, int f, int e) {
  std::vector<std::pair<Obligation, Verdict>> out;
  int n = 0;
  auto add = [&](Verdict v) {
    Obligation o;
    o.kind = ObligationKind::Postcondition;
    o.class_name = "C";
    o.feature_name = "f";
    o.id = "C.f.Postcondition." + std::to_string(n++);
    o.provenance = "p";
    out.emplace_back(o, v);
  };
  for (int i = 0; i < d; ++i) add(Verdict::discharged());
  for (int i = 0; i < f; ++i) add(Verdict::failed({{"x", std::int64_t{i}}}));
  for (int i = 0; i < e; ++i) add(Verdict::error("boom"));
  return out;
}

// Rounding half away from zero, computed in floating point.
int reference_percent(int count, int total) {
  return total == 0 ? 0 : static_cast<int>(std::floor(100.0 * count / total + 0.5));
}

}  // namespace

TEST_CASE("38 obligations split 22/8/8 give 58/21/21") {
  const Report r = build_report(synthetic(22, 8, 8), {}, 0);
  CHECK(r.total == 38);
  CHECK(summary_line(r) == "38 obligations: 22 discharged (58%), 8 failed (21%), 8 errors (21%)");
}

TEST_CASE("empty report") {
  const Report r = build_report({}, {}, 0);
  CHECK(summary_line(r) == "0 obligations: 0 discharged (0%), 0 failed (0%), 0 errors (0%)");
  const auto j = nlohmann::json::parse(to_json(r));
  CHECK(j["summary"]["percent"]["discharged"] == 0);
  CHECK(j["rows"].empty());
}

TEST_CASE("percentages match the reference rounding and sum to 100 within one") {
  for (int total = 1; total <= 60; ++total)
    for (int d = 0; d <= total; ++d)
      for (int f = 0; d + f <= total; ++f) {
        const int e = total - d - f;
        const int pd = Report::percent(d, total);
        const int pf = Report::percent(f, total);
        const int pe = Report::percent(e, total);
        CHECK(pd == reference_percent(d, total));
        CHECK(pf == reference_percent(f, total));
        CHECK(std::abs(pd + pf + pe - 100) <= 1);
      }
}

TEST_CASE("rows are sorted by id") {
  auto v = synthetic(3, 2, 1);
  std::reverse(v.begin(), v.end());
  const Report r = build_report(v, {}, 0);
  for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i - 1].id < r.rows[i].id);
}

TEST_CASE("text report shows every category") {
  const std::string text = render_text(build_report(synthetic(2, 1, 1), {}, 0));
  CHECK(text.find("Discharged  C.f.Postcondition.0  [p]") != std::string::npos);
  CHECK(text.find("Failed  C.f.Postcondition.2") != std::string::npos);
  CHECK(text.find("    counterexample: x=0") != std::string::npos);
  CHECK(text.find("Error  C.f.Postcondition.3") != std::string::npos);
  CHECK(text.find("    reason: boom") != std::string::npos);
}

TEST_CASE("json schema and round trip") {
  Domains d;
  d.int_lo = -4;
  d.int_hi = 4;
  d.string_pool = {"a", "b"};
  Report r = build_report(synthetic(2, 1, 1), d, 12.5);
  r.overflow_width = 8;
  const std::string text = to_json(r);
  const auto j = nlohmann::json::parse(text);
  for (const char* key : {"summary", "rows", "domains", "duration_ms"}) CHECK(j.contains(key));
  CHECK(j["domains"]["int_range"] == nlohmann::json::array({-4, 4}));
  CHECK(!nlohmann::json::parse(to_json(r, false)).contains("duration_ms"));

  const Report back = report_from_json(text);
  CHECK(back.total == 4);
  CHECK(back.failed == 1);
  CHECK(back.domains.string_pool == d.string_pool);
  CHECK(back.overflow_width == 8);
  REQUIRE(back.rows.size() == r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(back.rows[i].id == r.rows[i].id);
    CHECK(back.rows[i].verdict.kind == r.rows[i].verdict.kind);
    CHECK(back.rows[i].verdict.counterexample == r.rows[i].verdict.counterexample);
    CHECK(back.rows[i].verdict.reason == r.rows[i].verdict.reason);
  }
}

TEST_CASE("counterexample values of every type survive the json round trip") {
  Obligation o;
  o.id = "C.f.Frame.0";
  o.kind = ObligationKind::Frame;
  const Environment env{{"a", std::int64_t{-3}},       {"b", true},
                        {"c", std::string("x y")},     {"d", VoidValue{}},
                        {"e", StringSet{"p", "q"}},    {"f", RefValue{0}}};
  const Report r = build_report({{o, Verdict::failed(env)}}, {}, 0);
  CHECK(report_from_json(to_json(r)).rows.at(0).verdict.counterexample == env);
}

#include "miniproof/report.hpp"

#include <algorithm>

#include <json.hpp>

namespace miniproof {

int Report::percent(int count, int total) {
  if (total <= 0) return 0;
  return static_cast<int>((200LL * count + total) / (2LL * total));
}

Report build_report(const std::vector<std::pair<Obligation, Verdict>>& verdicts,
                    const Domains& domains, double duration_ms) {
  Report r;
  r.domains = domains;
  r.duration_ms = duration_ms;
  for (const auto& [o, v] : verdicts) {
    r.rows.push_back({o.id, o.kind, o.class_name, o.feature_name, o.provenance, v});
    switch (v.kind) {
      case Verdict::Kind::Discharged: ++r.discharged; break;
      case Verdict::Kind::Failed: ++r.failed; break;
      case Verdict::Kind::Error: ++r.errors; break;
    }
  }
  r.total = static_cast<int>(verdicts.size());
  std::sort(r.rows.begin(), r.rows.end(),
            [](const ReportRow& a, const ReportRow& b) { return a.id < b.id; });
  return r;
}

std::string summary_line(const Report& r) {
  auto part = [&](int n, const char* what) {
    return std::to_string(n) + " " + what + " (" + std::to_string(Report::percent(n, r.total)) +
           "%)";
  };
  return std::to_string(r.total) + " obligations: " + part(r.discharged, "discharged") + ", " +
         part(r.failed, "failed") + ", " + part(r.errors, "errors");
}

std::string render_text(const Report& r) {
  std::string out = summary_line(r) + "\n";
  for (const auto& row : r.rows) {
    out += std::string(to_string(row.verdict.kind)) + "  " + row.id + "  [" + row.provenance +
           "]\n";
    if (row.verdict.kind == Verdict::Kind::Failed)
      out += "    counterexample: " + to_string(row.verdict.counterexample) + "\n";
    else if (row.verdict.kind == Verdict::Kind::Error)
      out += "    reason: " + row.verdict.reason + "\n";
  }
  return out;
}

std::string to_json(const Report& r, bool include_duration) {
  using nlohmann::ordered_json;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json j = {{"id", row.id},
                      {"kind", std::string(to_string(row.kind))},
                      {"class", row.class_name},
                      {"feature", row.feature_name},
                      {"provenance", row.provenance},
                      {"verdict", std::string(to_string(row.verdict.kind))}};
    if (row.verdict.kind == Verdict::Kind::Failed) {
      ordered_json cex = ordered_json::object();
      for (const auto& [k, v] : row.verdict.counterexample) cex[k] = to_string(v);
      j["counterexample"] = cex;
    } else if (row.verdict.kind == Verdict::Kind::Error) {
      j["reason"] = row.verdict.reason;
    }
    rows.push_back(j);
  }
  ordered_json pct = {{"discharged", Report::percent(r.discharged, r.total)},
                      {"failed", Report::percent(r.failed, r.total)},
                      {"errors", Report::percent(r.errors, r.total)}};
  ordered_json out = {
      {"summary",
       {{"total", r.total},
        {"discharged", r.discharged},
        {"failed", r.failed},
        {"errors", r.errors},
        {"percent", pct}}},
      {"rows", rows},
      {"domains",
       {{"int_range", {r.domains.int_lo, r.domains.int_hi}},
        {"string_pool", r.domains.string_pool},
        {"max_refs", r.domains.max_refs},
        {"overflow_width", r.overflow_width}}}};
  if (include_duration) out["duration_ms"] = r.duration_ms;
  return out.dump(2);
}

Report report_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  Report rep;
  const auto& s = j.at("summary");
  rep.total = s.at("total").get<int>();
  rep.discharged = s.at("discharged").get<int>();
  rep.failed = s.at("failed").get<int>();
  rep.errors = s.at("errors").get<int>();
  const auto& d = j.at("domains");
  rep.domains.int_lo = d.at("int_range").at(0).get<std::int64_t>();
  rep.domains.int_hi = d.at("int_range").at(1).get<std::int64_t>();
  rep.domains.string_pool = d.at("string_pool").get<std::vector<std::string>>();
  rep.domains.max_refs = d.at("max_refs").get<int>();
  rep.overflow_width = d.value("overflow_width", 0);
  rep.duration_ms = j.value("duration_ms", 0.0);
  auto& out = rep.rows;
  for (const auto& row : j.at("rows")) {
    ReportRow r;
    r.id = row.at("id").get<std::string>();
    parse_obligation_kind(row.at("kind").get<std::string>(), r.kind);
    r.class_name = row.value("class", "");
    r.feature_name = row.value("feature", "");
    r.provenance = row.value("provenance", "");
    const std::string verdict = row.at("verdict").get<std::string>();
    if (verdict == "Failed") {
      r.verdict.kind = Verdict::Kind::Failed;
      for (const auto& [k, v] : row.at("counterexample").items())
        r.verdict.counterexample[k] = parse_value(v.get<std::string>());
    } else if (verdict == "Error") {
      r.verdict.kind = Verdict::Kind::Error;
      r.verdict.reason = row.value("reason", "");
    }
    out.push_back(std::move(r));
  }
  return rep;
}

}  // namespace miniproof

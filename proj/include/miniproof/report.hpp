#pragma once

// Aggregated verification results.

#include <string>
#include <utility>
#include <vector>

#include "miniproof/discharge.hpp"
#include "miniproof/vcgen.hpp"

namespace miniproof {

struct ReportRow {
  std::string id;
  ObligationKind kind = ObligationKind::Postcondition;
  std::string class_name;
  std::string feature_name;
  std::string provenance;
  Verdict verdict;
};

struct Report {
  int total = 0;
  int discharged = 0;
  int failed = 0;
  int errors = 0;
  std::vector<ReportRow> rows;  // sorted by id
  Domains domains;
  int overflow_width = 0;  // 0 when overflow was not checked
  double duration_ms = 0;

  // Share of the total, rounded half away from zero; 0 for an empty report.
  static int percent(int count, int total);
};

Report build_report(const std::vector<std::pair<Obligation, Verdict>>& verdicts,
                    const Domains& domains, double duration_ms);

// "N obligations: X discharged (P%), Y failed (P%), Z errors (P%)"
std::string summary_line(const Report& r);
// Summary followed by one line per row; counterexamples and error reasons
// are indented under their row. Timing is left out so output is stable.
std::string render_text(const Report& r);
std::string to_json(const Report& r, bool include_duration = true);

// Reads to_json output back (used by replay). Throws std::exception on
// malformed input.
Report report_from_json(const std::string& text);

}  // namespace miniproof

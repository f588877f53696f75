#pragma once

// Built-in example programs with their expected verdicts.
//
// Manifest format, one directive per line ('#' starts a comment):
//   note <text>
//   parent <entry>
//   options int_range=LO..HI [check_overflow] [overflow_width=N]
//   scenario <name> ok|fail
//   <obligation id> Discharged|Failed|Error
//   counterexample <obligation id> k=v, k=v, ...

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "miniproof/discharge.hpp"
#include "miniproof/vcgen.hpp"

namespace miniproof {

class UnknownCorpusEntry : public std::runtime_error {
 public:
  explicit UnknownCorpusEntry(const std::string& name)
      : std::runtime_error("unknown corpus entry '" + name + "'") {}
};

struct ManifestRow {
  std::string id;
  Verdict::Kind verdict = Verdict::Kind::Discharged;
  std::optional<Environment> counterexample;
};

struct ScenarioFile {
  std::string name;
  std::string text;
  bool expect_ok = true;
};

struct CorpusEntry {
  std::string name;
  std::string source;
  std::string parent;  // empty for originals
  std::vector<std::string> notes;
  VerifyOptions options;
  std::vector<ManifestRow> manifest;
  std::vector<ScenarioFile> scenarios;

  const ManifestRow* find(std::string_view id) const;
};

const std::vector<std::string>& builtin_names();
CorpusEntry load_builtin(std::string_view name);
// Scenario text by file stem, e.g. "tokeneer_enrol_ok".
std::optional<std::string> builtin_scenario(std::string_view name);

// Fills everything but name and source. Throws std::invalid_argument with
// the line number on malformed input.
void parse_manifest(std::string_view text, CorpusEntry& entry);
std::string render_manifest(const CorpusEntry& entry);

// Parses "k=v, k=v" as produced by to_string(Environment).
Environment parse_environment(std::string_view text);

// Writes <dir>/<name>.ccl, <dir>/<name>.manifest and <dir>/scenarios/*.scn.
std::vector<std::filesystem::path> export_entry(const CorpusEntry& entry,
                                                const std::filesystem::path& dir);

}  // namespace miniproof

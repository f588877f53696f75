#include "miniproof/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "corpus_data.hpp"

namespace miniproof {

namespace {

std::optional<std::string> embedded(std::string_view path) {
  for (std::size_t i = 0; i < corpus_data::kFileCount; ++i)
    if (path == corpus_data::kFiles[i].path) return std::string(corpus_data::kFiles[i].text);
  return std::nullopt;
}

std::vector<std::string> words(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_verdict(std::string_view s, Verdict::Kind& out) {
  for (auto k : {Verdict::Kind::Discharged, Verdict::Kind::Failed, Verdict::Kind::Error})
    if (s == to_string(k)) {
      out = k;
      return true;
    }
  return false;
}

}  // namespace

const ManifestRow* CorpusEntry::find(std::string_view id) const {
  for (const auto& row : manifest)
    if (row.id == id) return &row;
  return nullptr;
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {
      "account",
      "account_overflow_mutant",
      "account_noguard_mutant",
      "tokeneer_enrolment",
      "tokeneer_noprecond_mutant",
      "tokeneer_frame_mutant",
      "contract_creation_error",
  };
  return names;
}

std::optional<std::string> builtin_scenario(std::string_view name) {
  return embedded("scenarios/" + std::string(name) + ".scn");
}

Environment parse_environment(std::string_view text) {
  Environment env;
  std::string cur;
  bool in_string = false;
  int braces = 0;
  auto flush = [&] {
    const std::string item = trim(cur);
    cur.clear();
    if (item.empty()) return;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected k=v in '" + item + "'");
    env[trim(item.substr(0, eq))] = parse_value(trim(item.substr(eq + 1)));
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '"' && (i == 0 || text[i - 1] != '\\')) in_string = !in_string;
    if (!in_string && c == '{') ++braces;
    if (!in_string && c == '}') --braces;
    if (c == ',' && !in_string && braces == 0) {
      flush();
      continue;
    }
    cur += c;
  }
  flush();
  return env;
}

void parse_manifest(std::string_view text, CorpusEntry& entry) {
  std::istringstream in{std::string(text)};
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument("manifest line " + std::to_string(line_no) + ": " + why);
    };
    const auto w = words(line);
    const std::string& head = w[0];
    if (head == "note") {
      entry.notes.push_back(trim(line.substr(4)));
    } else if (head == "parent") {
      if (w.size() != 2) fail("expected 'parent <entry>'");
      entry.parent = w[1];
    } else if (head == "options") {
      for (std::size_t i = 1; i < w.size(); ++i) {
        if (w[i] == "check_overflow") {
          entry.options.check_overflow = true;
        } else if (w[i].rfind("int_range=", 0) == 0) {
          if (!parse_int_range(w[i].substr(10), entry.options.int_lo, entry.options.int_hi))
            fail("bad int_range");
        } else if (w[i].rfind("overflow_width=", 0) == 0) {
          entry.options.overflow_width = std::stoi(w[i].substr(15));
        } else {
          fail("unknown option " + w[i]);
        }
      }
      if (auto why = entry.options.validate(); !why.empty()) fail(why);
    } else if (head == "scenario") {
      if (w.size() != 3 || (w[2] != "ok" && w[2] != "fail")) fail("expected 'scenario <name> ok|fail'");
      auto text_of = builtin_scenario(w[1]);
      if (!text_of) fail("unknown scenario " + w[1]);
      entry.scenarios.push_back({w[1], *text_of, w[2] == "ok"});
    } else if (head == "counterexample") {
      if (w.size() < 2) fail("expected 'counterexample <id> k=v, ...'");
      auto it = std::find_if(entry.manifest.begin(), entry.manifest.end(),
                             [&](const ManifestRow& r) { return r.id == w[1]; });
      if (it == entry.manifest.end()) fail("counterexample for unlisted obligation " + w[1]);
      try {
        it->counterexample = parse_environment(trim(line.substr(line.find(w[1]) + w[1].size())));
      } catch (const std::exception& e) {
        fail(e.what());
      }
    } else {
      ManifestRow row;
      if (w.size() != 2 || !parse_verdict(w[1], row.verdict)) fail("expected '<id> <verdict>'");
      row.id = w[0];
      entry.manifest.push_back(std::move(row));
    }
  }
}

std::string render_manifest(const CorpusEntry& entry) {
  std::string out;
  for (const auto& n : entry.notes) out += "note " + n + "\n";
  if (!entry.parent.empty()) out += "parent " + entry.parent + "\n";
  const auto& o = entry.options;
  out += "options int_range=" + std::to_string(o.int_lo) + ".." + std::to_string(o.int_hi);
  if (o.check_overflow)
    out += " check_overflow overflow_width=" + std::to_string(o.overflow_width);
  out += "\n";
  for (const auto& s : entry.scenarios)
    out += "scenario " + s.name + (s.expect_ok ? " ok" : " fail") + "\n";
  for (const auto& r : entry.manifest) out += r.id + " " + std::string(to_string(r.verdict)) + "\n";
  for (const auto& r : entry.manifest)
    if (r.counterexample) out += "counterexample " + r.id + " " + to_string(*r.counterexample) + "\n";
  return out;
}

CorpusEntry load_builtin(std::string_view name) {
  const std::string n(name);
  auto source = embedded(n + ".ccl");
  auto manifest = embedded("manifests/" + n + ".manifest");
  if (!source || !manifest) throw UnknownCorpusEntry(n);
  CorpusEntry entry;
  entry.name = n;
  entry.source = *source;
  parse_manifest(*manifest, entry);
  return entry;
}

std::vector<std::filesystem::path> export_entry(const CorpusEntry& entry,
                                                const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  auto write = [&](const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + p.string());
    written.push_back(p);
  };
  write(dir / (entry.name + ".ccl"), entry.source);
  write(dir / (entry.name + ".manifest"), render_manifest(entry));
  for (const auto& s : entry.scenarios) write(dir / "scenarios" / (s.name + ".scn"), s.text);
  return written;
}

}  // namespace miniproof

#include "miniproof/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "miniproof/analyzer.hpp"
#include "miniproof/corpus.hpp"
#include "miniproof/discharge.hpp"
#include "miniproof/explore.hpp"
#include "miniproof/parser.hpp"
#include "miniproof/report.hpp"
#include "miniproof/scenario.hpp"
#include "miniproof/vcgen.hpp"

namespace miniproof {

namespace {

// Raised for anything that maps to exit code 3; each line is one diagnostic.
struct UsageFailure {
  std::vector<std::string> lines;
};

[[noreturn]] void usage_failure(std::string line) { throw UsageFailure{{std::move(line)}}; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) usage_failure("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Input {
  std::optional<CheckedProgram> program;
  std::optional<CorpusEntry> entry;  // for corpus:NAME inputs
};

constexpr std::string_view kCorpusPrefix = "corpus:";

Input load_inputs(const std::vector<std::string>& names) {
  Input in;
  std::vector<Program> parts;
  std::vector<std::string> labels;
  for (const auto& name : names) {
    std::string text;
    if (name.rfind(kCorpusPrefix, 0) == 0) {
      try {
        in.entry = load_builtin(name.substr(kCorpusPrefix.size()));
      } catch (const UnknownCorpusEntry& e) {
        usage_failure(e.what());
      }
      text = in.entry->source;
    } else {
      text = read_file(name);
    }
    try {
      parts.push_back(parse(text));
    } catch (const ParseError& e) {
      usage_failure(name + ":" + e.what());
    }
    labels.push_back(name);
  }
  try {
    in.program = analyze(parts.size() == 1 ? std::move(parts[0]) : merge_programs(std::move(parts)));
  } catch (const SemanticError& e) {
    UsageFailure f;
    const std::string where = labels.size() == 1 ? labels[0] + ":" : "";
    for (const auto& d : e.diagnostics())
      f.lines.push_back(where + std::to_string(d.pos.line) + ":" + std::to_string(d.pos.column) +
                        ": " + d.message);
    throw f;
  } catch (const std::exception& e) {
    usage_failure(e.what());
  }
  return in;
}

unsigned worker_count() {
  const char* env = std::getenv("MINIPROOF_WORKERS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) usage_failure("MINIPROOF_WORKERS must be a positive integer");
  return static_cast<unsigned>(n);
}

int exit_for(const Report& r) {
  if (r.errors > 0) return kExitError;
  if (r.failed > 0) return kExitFailed;
  return kExitOk;
}

struct VerifyArgs {
  std::vector<std::string> inputs;
  std::string int_range;
  bool check_overflow = false;
  int overflow_width = 0;
  std::string format = "text";
  std::string emit_obligations;
};

// Entry options first, then explicit flags.
VerifyOptions options_for(const Input& in, const VerifyArgs& a) {
  VerifyOptions o = in.entry ? in.entry->options : VerifyOptions{};
  if (!a.int_range.empty() && !parse_int_range(a.int_range, o.int_lo, o.int_hi))
    usage_failure("--int-range expects LO..HI, got '" + a.int_range + "'");
  if (a.check_overflow) o.check_overflow = true;
  if (a.overflow_width) o.overflow_width = a.overflow_width;
  if (auto why = o.validate(); !why.empty()) usage_failure(why);
  return o;
}

int do_verify(const VerifyArgs& a, std::ostream& out) {
  const Input in = load_inputs(a.inputs);
  const VerifyOptions opts = options_for(in, a);
  const unsigned workers = worker_count();
  const auto start = std::chrono::steady_clock::now();
  const auto obligations = generate_obligations(*in.program, opts);
  if (!a.emit_obligations.empty()) {
    std::ofstream f(a.emit_obligations, std::ios::binary);
    f << obligations_json(obligations) << "\n";
    if (!f) usage_failure("cannot write " + a.emit_obligations);
  }
  const Domains domains = domains_for(*in.program, opts);
  const auto verdicts = discharge_all(obligations, domains, workers);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  Report report = build_report(verdicts, domains, ms);
  report.overflow_width = opts.check_overflow ? opts.overflow_width : 0;
  if (a.format == "json")
    out << to_json(report) << "\n";
  else
    out << render_text(report);
  return exit_for(report);
}

int do_run(const std::string& input, const std::string& scenario_ref, const std::string& format,
           int overflow_width, std::ostream& out) {
  const Input in = load_inputs({input});
  std::string text;
  std::string name = scenario_ref;
  if (std::filesystem::exists(scenario_ref)) {
    text = read_file(scenario_ref);
    name = std::filesystem::path(scenario_ref).stem().string();
  } else if (auto builtin = builtin_scenario(scenario_ref)) {
    text = *builtin;
  } else {
    usage_failure("no scenario file or built-in scenario named " + scenario_ref);
  }
  Scenario sc;
  try {
    sc = parse_scenario(text, name);
  } catch (const ScenarioError& e) {
    usage_failure(scenario_ref + ":" + e.what());
  }
  RuntimeOptions ro;
  ro.overflow_width = overflow_width;
  const Trace trace = run_scenario(*in.program, sc, ro);
  out << (format == "json" ? to_json(trace) + "\n" : render_text(trace));
  return trace.ok ? kExitOk : kExitFailed;
}

int do_replay(const std::string& input, const std::string& id, const std::string& report_path,
              std::ostream& out) {
  const Input in = load_inputs({input});
  VerifyOptions opts = in.entry ? in.entry->options : VerifyOptions{};
  Domains domains;
  std::optional<Verdict> verdict;
  if (!report_path.empty()) {
    Report r;
    try {
      r = report_from_json(read_file(report_path));
    } catch (const UsageFailure&) {
      throw;
    } catch (const std::exception& e) {
      usage_failure(report_path + ": " + e.what());
    }
    opts.int_lo = r.domains.int_lo;
    opts.int_hi = r.domains.int_hi;
    opts.check_overflow = r.overflow_width > 0;
    if (r.overflow_width > 0) opts.overflow_width = r.overflow_width;
    domains = r.domains;
    for (const auto& row : r.rows)
      if (row.id == id) verdict = row.verdict;
    if (!verdict) usage_failure("obligation " + id + " is not in " + report_path);
  }
  const auto obligations = generate_obligations(*in.program, opts);
  auto it = std::find_if(obligations.begin(), obligations.end(),
                         [&](const Obligation& o) { return o.id == id; });
  if (it == obligations.end()) usage_failure("no obligation " + id);
  if (report_path.empty()) {
    domains = domains_for(*in.program, opts);
    verdict = discharge(*it, domains);
  }
  if (verdict->kind != Verdict::Kind::Failed) {
    out << id << " is " << to_string(verdict->kind) << "; nothing to replay\n";
    return verdict->kind == Verdict::Kind::Error ? kExitError : kExitOk;
  }
  ExploreOptions eo;
  eo.runtime.overflow_width = opts.check_overflow ? opts.overflow_width : 0;
  const ReplayResult r = replay_counterexample(*in.program, *it, verdict->counterexample, domains, eo);
  out << id << ": replay " << to_string(r.status) << "\n";
  out << "  counterexample: " << to_string(verdict->counterexample) << "\n";
  for (const auto& h : r.history) out << "  " << h << "\n";
  if (r.violation) out << "  -> " << r.violation->describe() << "\n";
  if (!r.detail.empty() && r.status != ReplayResult::Status::Reproduced)
    out << "  " << r.detail << "\n";
  return r.status == ReplayResult::Status::Reproduced ? kExitOk : kExitFailed;
}

// CLI11 reads "-8..8" as an option name, so glue range values to their flag.
std::vector<std::string> glue_values(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--int-range" && i + 1 < args.size()) {
      out.push_back(args[i] + "=" + args[i + 1]);
      ++i;
    } else {
      out.push_back(args[i]);
    }
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contract verifier and runtime checker", "miniproof"};
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Generate and discharge proof obligations");
  verify->add_option("inputs", va.inputs, "Source files or corpus:NAME")->required();
  verify->add_option("--int-range", va.int_range, "Integer domain LO..HI");
  verify->add_flag("--check-overflow", va.check_overflow, "Emit overflow obligations");
  verify->add_option("--overflow-width", va.overflow_width, "Machine word width")
      ->check(CLI::IsMember({8, 16, 32, 64}));
  verify->add_option("--format", va.format)->check(CLI::IsMember({"text", "json"}));
  verify->add_option("--emit-obligations", va.emit_obligations, "Write obligations as JSON");

  std::string run_input, run_scenario_ref, run_format = "text";
  int run_width = 0;
  auto* run = app.add_subcommand("run", "Execute a scenario under monitoring");
  run->add_option("input", run_input, "Source file or corpus:NAME")->required();
  run->add_option("scenario", run_scenario_ref, "Scenario file or built-in scenario")->required();
  run->add_option("--format", run_format)->check(CLI::IsMember({"text", "json"}));
  run->add_option("--overflow-width", run_width, "Monitor arithmetic at this width")
      ->check(CLI::IsMember({8, 16, 32, 64}));

  std::string rp_input, rp_id, rp_report;
  auto* replay = app.add_subcommand("replay", "Replay a counterexample at run time");
  replay->add_option("input", rp_input, "Source file or corpus:NAME")->required();
  replay->add_option("obligation", rp_id, "Obligation id")->required();
  replay->add_option("--report", rp_report, "JSON report holding the counterexample");

  auto* corpus = app.add_subcommand("corpus", "Built-in examples");
  corpus->require_subcommand(1);
  auto* list = corpus->add_subcommand("list", "List entries");
  std::string ex_name, ex_dir;
  auto* exp = corpus->add_subcommand("export", "Write an entry to disk");
  exp->add_option("name", ex_name)->required();
  exp->add_option("dir", ex_dir)->required();

  std::vector<std::string> args = glue_values(raw_args);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*verify) return do_verify(va, out);
    if (*run) return do_run(run_input, run_scenario_ref, run_format, run_width, out);
    if (*replay) return do_replay(rp_input, rp_id, rp_report, out);
    if (*list) {
      for (const auto& n : builtin_names()) {
        const CorpusEntry e = load_builtin(n);
        out << n << "  " << (e.notes.empty() ? "" : e.notes.front()) << "\n";
      }
      return kExitOk;
    }
    if (*exp) {
      CorpusEntry e;
      try {
        e = load_builtin(ex_name);
      } catch (const UnknownCorpusEntry& x) {
        usage_failure(x.what());
      }
      for (const auto& p : export_entry(e, ex_dir)) out << p.string() << "\n";
      return kExitOk;
    }
  } catch (const UsageFailure& f) {
    for (const auto& l : f.lines) err << "miniproof: " << l << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "miniproof: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace miniproof

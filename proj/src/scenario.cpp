#include "miniproof/scenario.hpp"

#include <cctype>
#include <set>

#include <json.hpp>

namespace miniproof {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_ident(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

// Strips a trailing `# comment` that is not inside a string literal.
std::string strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

std::vector<Value> parse_args(const std::string& inside, int line) {
  std::vector<Value> out;
  if (trim(inside).empty()) return out;
  std::string cur;
  bool in_string = false;
  auto flush = [&] {
    try {
      out.push_back(parse_value(trim(cur)));
    } catch (const std::exception& e) {
      throw ScenarioError(line, e.what());
    }
    cur.clear();
  };
  for (std::size_t i = 0; i < inside.size(); ++i) {
    const char c = inside[i];
    if (c == '"' && (i == 0 || inside[i - 1] != '\\')) in_string = !in_string;
    if (c == ',' && !in_string) {
      flush();
      continue;
    }
    cur += c;
  }
  flush();
  return out;
}

// "name (args)" or "name" -> name and argument list.
std::pair<std::string, std::vector<Value>> split_call(const std::string& s, int line) {
  const auto open = s.find('(');
  if (open == std::string::npos) return {trim(s), {}};
  if (s.back() != ')') throw ScenarioError(line, "expected ')' at end of line");
  return {trim(s.substr(0, open)), parse_args(s.substr(open + 1, s.size() - open - 2), line)};
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::string name) {
  Scenario sc;
  sc.name = std::move(name);
  std::set<std::string> vars;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string line = trim(strip_comment(text.substr(start, end - start)));
    start = end + 1;
    if (line.empty()) continue;

    ScenarioCommand cmd;
    cmd.line = line_no;
    cmd.text = line;
    const auto space = line.find_first_of(" \t");
    const std::string word = line.substr(0, space);
    const std::string rest = space == std::string::npos ? "" : trim(line.substr(space));

    if (word == "create") {
      cmd.kind = ScenarioCommand::Kind::Create;
      const auto colon = rest.find(':');
      if (colon == std::string::npos) throw ScenarioError(line_no, "expected 'create <var>: <class>'");
      cmd.var = trim(rest.substr(0, colon));
      auto [cls, args] = split_call(trim(rest.substr(colon + 1)), line_no);
      cmd.cls = cls;
      cmd.args = std::move(args);
      if (!is_ident(cmd.var) || !is_ident(cmd.cls))
        throw ScenarioError(line_no, "expected 'create <var>: <class>'");
      vars.insert(cmd.var);
    } else if (word == "call") {
      cmd.kind = ScenarioCommand::Kind::Call;
      const auto dot = rest.find('.');
      if (dot == std::string::npos) throw ScenarioError(line_no, "expected 'call <var>.<feature>'");
      cmd.var = trim(rest.substr(0, dot));
      auto [feature, args] = split_call(rest.substr(dot + 1), line_no);
      cmd.feature = feature;
      cmd.args = std::move(args);
      if (!is_ident(cmd.var) || !is_ident(cmd.feature))
        throw ScenarioError(line_no, "expected 'call <var>.<feature>'");
      if (!vars.count(cmd.var)) throw ScenarioError(line_no, "undefined variable " + cmd.var);
    } else if (word == "expect_violation" || word == "expect_ok") {
      cmd.kind = word == "expect_ok" ? ScenarioCommand::Kind::ExpectOk
                                     : ScenarioCommand::Kind::ExpectViolation;
      cmd.label = rest;
      if (cmd.kind == ScenarioCommand::Kind::ExpectViolation && cmd.label.empty())
        throw ScenarioError(line_no, "expect_violation needs a clause label");
      if (cmd.kind == ScenarioCommand::Kind::ExpectOk && !rest.empty())
        throw ScenarioError(line_no, "expect_ok takes no argument");
      if (sc.commands.empty() || (sc.commands.back().kind != ScenarioCommand::Kind::Create &&
                                  sc.commands.back().kind != ScenarioCommand::Kind::Call))
        throw ScenarioError(line_no, "expectation must follow a create or call");
    } else if (word == "expect_value") {
      cmd.kind = ScenarioCommand::Kind::ExpectValue;
      const auto eq = rest.find('=');
      const auto dot = rest.find('.');
      if (eq == std::string::npos || dot == std::string::npos || dot > eq)
        throw ScenarioError(line_no, "expected 'expect_value <var>.<path> = <literal>'");
      cmd.var = trim(rest.substr(0, dot));
      cmd.path = trim(rest.substr(dot + 1, eq - dot - 1));
      const std::string rhs = trim(rest.substr(eq + 1));
      const auto rdot = rhs.find('.');
      if (rdot != std::string::npos && is_ident(rhs.substr(0, rdot)) && rhs[0] != '"') {
        cmd.expected_var = rhs.substr(0, rdot);
        cmd.expected_path = rhs.substr(rdot + 1);
        if (!vars.count(cmd.expected_var))
          throw ScenarioError(line_no, "undefined variable " + cmd.expected_var);
      } else {
        try {
          cmd.expected = parse_value(rhs);
        } catch (const std::exception& e) {
          throw ScenarioError(line_no, e.what());
        }
      }
      if (!vars.count(cmd.var)) throw ScenarioError(line_no, "undefined variable " + cmd.var);
    } else {
      throw ScenarioError(line_no, "unknown command '" + word + "'");
    }
    sc.commands.push_back(std::move(cmd));
  }
  return sc;
}

Value Trace::read(const std::string& var, const std::string& path) const {
  return final_states.at(var).at(path);
}

namespace {

bool label_matches(const Violation& v, const std::string& label) {
  if (v.label == label) return true;
  // Callee precondition labels carry the callee prefix (C.f.label).
  return v.label.size() > label.size() &&
         v.label.compare(v.label.size() - label.size(), label.size(), label) == 0 &&
         v.label[v.label.size() - label.size() - 1] == '.';
}

}  // namespace

Trace run_scenario(const CheckedProgram& program, const Scenario& scenario,
                   RuntimeOptions options) {
  Trace trace;
  trace.scenario = scenario.name;
  Machine m(program, options);
  std::map<std::string, RefValue> vars;
  const auto& cmds = scenario.commands;

  for (std::size_t i = 0; i < cmds.size(); ++i) {
    const ScenarioCommand& cmd = cmds[i];
    TraceStep step;
    step.command = cmd.text;

    if (cmd.kind == ScenarioCommand::Kind::ExpectValue) {
      step.expect = cmd.text;
      try {
        Value actual = m.read(vars.at(cmd.var), cmd.path);
        const Value expected = cmd.expected_var.empty()
                                   ? cmd.expected
                                   : m.read(vars.at(cmd.expected_var), cmd.expected_path);
        step.matched = actual == expected;
        if (!step.matched)
          trace.failure = "line " + std::to_string(cmd.line) + ": " + cmd.var + "." + cmd.path +
                          " is " + to_string(actual) + ", expected " + to_string(expected);
      } catch (const std::exception& e) {
        step.outcome = TraceStep::Outcome::Error;
        step.error = e.what();
        step.matched = false;
        trace.failure = "line " + std::to_string(cmd.line) + ": " + e.what();
      }
      trace.steps.push_back(std::move(step));
      if (!trace.failure.empty()) break;
      continue;
    }

    const ScenarioCommand* expect = nullptr;
    if (i + 1 < cmds.size() && (cmds[i + 1].kind == ScenarioCommand::Kind::ExpectViolation ||
                                cmds[i + 1].kind == ScenarioCommand::Kind::ExpectOk))
      expect = &cmds[++i];

    m.clear_checks();
    try {
      if (cmd.kind == ScenarioCommand::Kind::Create) {
        vars[cmd.var] = m.create(cmd.cls, cmd.args);
      } else {
        m.call(vars.at(cmd.var), cmd.feature, cmd.args);
      }
    } catch (const ContractViolation& v) {
      step.outcome = TraceStep::Outcome::Violation;
      step.violation = v.violation();
    } catch (const std::exception& e) {
      step.outcome = TraceStep::Outcome::Error;
      step.error = e.what();
    }
    step.checks = m.checks();
    if (auto it = vars.find(cmd.var); it != vars.end()) step.state = m.flatten(it->second);

    std::string problem;
    if (step.outcome == TraceStep::Outcome::Error) {
      problem = step.error;
    } else if (expect && expect->kind == ScenarioCommand::Kind::ExpectViolation) {
      step.expect = expect->text;
      if (!step.violation)
        problem = "expected violation of '" + expect->label + "', call succeeded";
      else if (!label_matches(*step.violation, expect->label))
        problem = "expected violation of '" + expect->label + "', got " +
                  step.violation->describe();
    } else {
      if (expect) step.expect = expect->text;
      if (step.violation) problem = "unexpected " + step.violation->describe();
    }
    step.matched = problem.empty();
    trace.steps.push_back(std::move(step));
    if (!problem.empty()) {
      trace.failure = "line " + std::to_string(cmd.line) + ": " + problem;
      break;
    }
  }
  for (const auto& [name, ref] : vars) trace.final_states[name] = m.flatten(ref);
  trace.ok = trace.failure.empty();
  return trace;
}

namespace {

std::string outcome_text(const TraceStep& s) {
  switch (s.outcome) {
    case TraceStep::Outcome::Ok: return "ok";
    case TraceStep::Outcome::Violation: return "violation: " + s.violation->describe();
    case TraceStep::Outcome::Error: return "error: " + s.error;
  }
  return "?";
}

}  // namespace

std::string render_text(const Trace& trace) {
  std::string out;
  if (!trace.scenario.empty()) out += "scenario " + trace.scenario + "\n";
  for (const auto& s : trace.steps) {
    out += s.command + "\n";
    for (const auto& c : s.checks)
      out += "    " + c.phase + " " + c.class_name + "." + c.feature_name + " " + c.label + ": " +
             (c.ok ? "ok" : "FAILED") + "\n";
    out += "  -> " + outcome_text(s);
    if (!s.expect.empty()) out += std::string(" (") + (s.matched ? "as expected" : "MISMATCH") + ")";
    out += "\n";
  }
  out += "final state:\n";
  for (const auto& [var, env] : trace.final_states)
    for (const auto& [path, v] : env) out += "  " + var + "." + path + " = " + to_string(v) + "\n";
  out += trace.ok ? "scenario ok\n" : "scenario FAILED: " + trace.failure + "\n";
  return out;
}

std::string to_json(const Trace& trace) {
  using nlohmann::ordered_json;
  ordered_json steps = ordered_json::array();
  for (const auto& s : trace.steps) {
    ordered_json checks = ordered_json::array();
    for (const auto& c : s.checks)
      checks.push_back({{"phase", c.phase},
                        {"class", c.class_name},
                        {"feature", c.feature_name},
                        {"label", c.label},
                        {"ok", c.ok}});
    ordered_json state = ordered_json::object();
    for (const auto& [k, v] : s.state) state[k] = to_string(v);
    ordered_json j = {{"command", s.command}, {"outcome", outcome_text(s)}, {"checks", checks},
                      {"state", state}};
    if (s.violation) {
      j["violation"] = {{"kind", std::string(to_string(s.violation->kind))},
                        {"label", s.violation->label},
                        {"class", s.violation->class_name},
                        {"feature", s.violation->feature_name}};
    }
    if (!s.expect.empty()) j["expect"] = s.expect;
    j["matched"] = s.matched;
    steps.push_back(j);
  }
  ordered_json finals = ordered_json::object();
  for (const auto& [var, env] : trace.final_states) {
    ordered_json o = ordered_json::object();
    for (const auto& [k, v] : env) o[k] = to_string(v);
    finals[var] = o;
  }
  ordered_json out = {{"scenario", trace.scenario}, {"ok", trace.ok}, {"steps", steps},
                      {"final_states", finals}};
  if (!trace.ok) out["failure"] = trace.failure;
  return out.dump(2);
}

}  // namespace miniproof

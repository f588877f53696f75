#pragma once

// Scripted executions under monitoring.
//
//   # comment
//   create a: ACCOUNT            (creator arguments: create a: C (1, "x"))
//   call a.deposit (50)
//   expect_violation enough_balance
//   expect_ok
//   expect_value a.balance = 30
//   expect_value s.status = s.consts.initial   (right side may be a path)

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "miniproof/runtime.hpp"

namespace miniproof {

struct ScenarioCommand {
  enum class Kind { Create, Call, ExpectViolation, ExpectOk, ExpectValue };

  Kind kind = Kind::Call;
  int line = 0;
  std::string text;     // source line, trimmed
  std::string var;      // Create, Call, ExpectValue
  std::string cls;      // Create
  std::string feature;  // Call
  std::vector<Value> args;
  std::string label;  // ExpectViolation
  std::string path;   // ExpectValue: attribute path below var
  Value expected;     // ExpectValue with a literal right side
  std::string expected_var;   // ExpectValue with a path right side
  std::string expected_path;
};

struct Scenario {
  std::string name;
  std::vector<ScenarioCommand> commands;
};

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(int line, const std::string& message)
      : std::runtime_error(std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

Scenario parse_scenario(std::string_view text, std::string name = {});

struct TraceStep {
  std::string command;
  enum class Outcome { Ok, Violation, Error } outcome = Outcome::Ok;
  std::optional<Violation> violation;
  std::string error;
  std::vector<CheckRecord> checks;
  Environment state;    // state of the command's variable afterwards
  std::string expect;   // expectation text attached to this step, if any
  bool matched = true;  // expectation (or the implicit "ok") was met
};

struct Trace {
  std::string scenario;
  std::vector<TraceStep> steps;
  std::map<std::string, Environment> final_states;
  bool ok = true;
  std::string failure;  // first mismatch, empty when ok

  // Final value of var.path; throws std::out_of_range when absent.
  Value read(const std::string& var, const std::string& path) const;
};

Trace run_scenario(const CheckedProgram& program, const Scenario& scenario,
                   RuntimeOptions options = {});

std::string render_text(const Trace& trace);
std::string to_json(const Trace& trace);

}  // namespace miniproof

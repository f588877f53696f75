#pragma once

// Execution under contract monitoring.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "miniproof/analyzer.hpp"
#include "miniproof/value.hpp"
#include "miniproof/vcgen.hpp"

namespace miniproof {

// ---- expression evaluation ----

class UnsupportedInContract : public std::runtime_error {
 public:
  UnsupportedInContract() : std::runtime_error("creation expression in contract") {}
};

// Qualified read (or call) through Void. `receiver` is the source text of
// the Void target.
class VoidDereference : public std::runtime_error {
 public:
  explicit VoidDereference(std::string receiver)
      : std::runtime_error("Void dereference of " + receiver), receiver_(std::move(receiver)) {}
  const std::string& receiver() const { return receiver_; }

 private:
  std::string receiver_;
};

// Arithmetic result outside the monitored machine width.
class OverflowError : public std::runtime_error {
 public:
  explicit OverflowError(std::string expr)
      : std::runtime_error("arithmetic overflow in " + expr), expr_(std::move(expr)) {}
  const std::string& expr() const { return expr_; }

 private:
  std::string expr_;
};

// Where names, attribute reads and old values come from.
class Store {
 public:
  virtual ~Store() = default;
  virtual Value name(const Expr& name) = 0;
  // `target` is the already evaluated, non-Void receiver of `read`.
  virtual Value field(const Value& target, const Expr& read) = 0;
  virtual Value old(const Expr& old_node) = 0;
};

struct EvalLimits {
  // Bounds checked on every arithmetic result when set.
  std::optional<std::pair<std::int64_t, std::int64_t>> overflow;
};

Value eval_expr(const Expr& e, Store& store, const EvalLimits& limits = {});

// Evaluation over path-keyed environments (attribute paths such as
// "station.current_display", parameters). `old e` evaluates e in old_env.
Value eval_expr(const ExprPtr& e, const Environment& env, const Environment& old_env = {});

// ---- monitored machine ----

enum class CheckKind {
  Precondition,  // require of a call issued by the scenario itself
  CalleePrecondition,
  Postcondition,
  InvariantMaintenance,
  Frame,
  Overflow,
  VoidDereference,
  CheckAssertion,
  Unsupported,
};

std::string_view to_string(CheckKind kind);
// Obligation kind a runtime failure corresponds to; none for Precondition.
std::optional<ObligationKind> obligation_kind(CheckKind kind);

struct Violation {
  CheckKind kind = CheckKind::Postcondition;
  std::string label;  // same vocabulary as obligation provenance
  std::string class_name;
  std::string feature_name;
  Environment env;  // Current attributes (dotted paths) and arguments
  std::string describe() const;
};

class ContractViolation : public std::runtime_error {
 public:
  explicit ContractViolation(Violation v);
  const Violation& violation() const { return v_; }

 private:
  Violation v_;
};

class StepBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CheckRecord {
  std::string phase;  // require, ensure, invariant, frame, check
  std::string class_name;
  std::string feature_name;
  std::string label;
  bool ok = true;
};

struct RuntimeOptions {
  int step_budget = 10000;
  // Machine word width for arithmetic in routine bodies; 0 = unbounded.
  int overflow_width = 0;
};

struct Object {
  std::string cls;
  std::map<std::string, Value> fields;  // non-constant attributes
};

class Machine {
 public:
  Machine(const CheckedProgram& program, RuntimeOptions options = {});

  // Allocates an object and runs its creator under monitoring. On a
  // violation the heap is restored and ContractViolation is thrown.
  RefValue create(const std::string& cls, const std::vector<Value>& args);
  // Calls a feature from outside. Same rollback rule as create.
  void call(RefValue target, const std::string& feature, const std::vector<Value>& args);

  const Object& object(RefValue r) const;
  // Reads an attribute path such as "station.current_screen.msg"; constant
  // attributes yield their literal value.
  Value read(RefValue root, const std::string& path) const;
  // Non-constant attributes reachable from root as path -> value, with
  // references shown as "#n" renumbered in discovery order.
  Environment flatten(RefValue root, int depth = 8) const;
  // Canonical text of the state reachable from root.
  std::string fingerprint(RefValue root) const;

  const std::vector<CheckRecord>& checks() const { return checks_; }
  void clear_checks() { checks_.clear(); }
  const CheckedProgram& program() const { return program_; }

  struct Frame;

 private:
  const CheckedProgram& program_;
  RuntimeOptions options_;
  std::vector<Object> heap_;
  std::vector<CheckRecord> checks_;

  RefValue allocate(const std::string& cls);
  // Runs one routine with full monitoring. `caller` is null for calls
  // issued from outside the program.
  void invoke(RefValue target, const Feature& feature, const std::vector<Value>& args,
              Frame* caller);
  void exec(const std::vector<Stmt>& body, Frame& frame);
  void exec(const Stmt& s, Frame& frame);
  Value eval_body(const Expr& e, Frame& frame);
  Value eval_contract(const Expr& e, Frame& frame, bool allow_old);
  Value snapshot(const Value& v, const Type& type, int depth) const;
  Environment describe_state(const Frame& frame) const;
  [[noreturn]] void fail(CheckKind kind, std::string label, const Frame& frame) const;

  friend class HeapStore;
};

}  // namespace miniproof

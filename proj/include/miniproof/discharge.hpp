#pragma once

// Deciding obligations by exhaustive enumeration over bounded domains.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "miniproof/analyzer.hpp"
#include "miniproof/formula.hpp"
#include "miniproof/value.hpp"
#include "miniproof/vcgen.hpp"

namespace miniproof {

struct Domains {
  std::int64_t int_lo = -8;
  std::int64_t int_hi = 8;
  std::vector<std::string> string_pool;  // value order; Void follows
  int max_refs = 1;

  // Values of a type in enumeration order: integers ascending, False before
  // True, strings in pool order then Void, sets as subsets of the pool in
  // binary counting order, objects #0.. then Void.
  std::vector<Value> values(const Type& type) const;
  std::string describe() const;
};

Domains domains_for(const CheckedProgram& program, const VerifyOptions& opts);

struct Verdict {
  enum class Kind { Discharged, Failed, Error };

  Kind kind = Kind::Discharged;
  Environment counterexample;  // Failed
  std::string reason;          // Error

  static Verdict discharged() { return {}; }
  static Verdict failed(Environment env) { return {Kind::Failed, std::move(env), {}}; }
  static Verdict error(std::string why) { return {Kind::Error, {}, std::move(why)}; }
};

std::string_view to_string(Verdict::Kind kind);

// Evaluates a closed formula. Throws EvalError when a symbol is missing or
// evaluation is ill-defined.
Value evaluate(const ExprPtr& e, const Environment& env);
bool evaluate_formula(const ExprPtr& formula, const Environment& env);

// Every total assignment of domain values to the free symbols, in
// lexicographic order (symbols by name, values in domain order).
class EnvironmentEnumerator {
 public:
  EnvironmentEnumerator(const ExprPtr& formula, const Domains& domains);

  // False once exhausted.
  bool next(Environment& out);
  // Number of environments (saturates at UINT64_MAX).
  std::uint64_t count() const;
  const std::vector<FreeSymbol>& symbols() const { return symbols_; }

 private:
  std::vector<FreeSymbol> symbols_;
  std::vector<std::vector<Value>> values_;
  std::vector<std::size_t> cursor_;
  bool started_ = false;
  bool done_ = false;
};

std::vector<Environment> enumerate_environments(const Obligation& o, const Domains& domains);

// Same verdict as checking every enumerated environment in order, found by a
// depth-first search that stops descending once the partial assignment
// decides the formula.
Verdict discharge(const Obligation& o, const Domains& domains);

// Discharges every obligation using up to `workers` threads (0 picks the
// hardware concurrency). Results keep the input order.
std::vector<std::pair<Obligation, Verdict>> discharge_all(const std::vector<Obligation>& obligations,
                                                          const Domains& domains,
                                                          unsigned workers = 1);

}  // namespace miniproof

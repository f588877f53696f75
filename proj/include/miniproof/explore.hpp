#pragma once

// Bounded exploration of reachable run-time states, counterexample replay,
// and the sweep comparing static verdicts with monitored executions.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "miniproof/discharge.hpp"
#include "miniproof/runtime.hpp"

namespace miniproof {

struct ExploreOptions {
  int max_depth = 8;  // calls after creation
  std::size_t max_states = 20000;
  RuntimeOptions runtime;
};

struct ExploredState {
  Machine machine;
  RefValue root;
  std::vector<std::string> history;  // commands in scenario syntax
};

// Argument tuples for a feature: the cartesian product of the parameter
// domains, except that reference parameters only receive Void.
std::vector<std::vector<Value>> argument_tuples(const Feature& feature, const Domains& domains);

// True when every integer reachable from root lies in the domain range.
bool in_domain(const Machine& m, RefValue root, const Domains& domains);

// Visits distinct reachable states of `cls` breadth-first, starting from
// every successful creation. States with integers outside the domain are
// not visited. Stops when `visit` returns false.
void explore(const CheckedProgram& program, const std::string& cls, const Domains& domains,
             const ExploreOptions& options,
             const std::function<bool(const ExploredState&)>& visit);

struct ReplayResult {
  enum class Status { Reproduced, NotReproduced, Impossible };

  Status status = Status::Impossible;
  std::optional<Violation> violation;  // Reproduced
  std::vector<std::string> history;    // Reproduced: commands leading to it
  std::size_t matching_states = 0;
  std::string detail;
};

std::string_view to_string(ReplayResult::Status status);

// Looks for a reachable state agreeing with the counterexample on every
// readable attribute path, runs the obligation's feature there with the
// counterexample arguments and reports whether the monitor flags the same
// clause. Impossible when no reachable state matches.
ReplayResult replay_counterexample(const CheckedProgram& program, const Obligation& obligation,
                                   const Environment& counterexample, const Domains& domains,
                                   const ExploreOptions& options = {});

struct SweepResult {
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t violations = 0;  // excluding top-level precondition refusals
  std::vector<std::string> exceptions;
  bool ok() const { return exceptions.empty(); }
};

// Runs every feature with every argument tuple from every reachable state of
// every class. Each monitored violation must correspond to an obligation
// whose verdict is not Discharged.
SweepResult soundness_sweep(const CheckedProgram& program,
                            const std::vector<std::pair<Obligation, Verdict>>& verdicts,
                            const Domains& domains, const ExploreOptions& options = {});

}  // namespace miniproof

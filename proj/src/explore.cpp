#include "miniproof/explore.hpp"

#include <deque>
#include <map>
#include <set>
#include <tuple>

namespace miniproof {

std::vector<std::vector<Value>> argument_tuples(const Feature& feature, const Domains& domains) {
  std::vector<std::vector<Value>> out{{}};
  for (const auto& p : feature.params) {
    const std::vector<Value> vals =
        p.type.is_ref() ? std::vector<Value>{VoidValue{}} : domains.values(p.type);
    std::vector<std::vector<Value>> next;
    next.reserve(out.size() * vals.size());
    for (const auto& prefix : out)
      for (const auto& v : vals) {
        next.push_back(prefix);
        next.back().push_back(v);
      }
    out = std::move(next);
  }
  return out;
}

bool in_domain(const Machine& m, RefValue root, const Domains& domains) {
  for (const auto& [path, v] : m.flatten(root))
    if (const auto* i = std::get_if<std::int64_t>(&v); i && (*i < domains.int_lo || *i > domains.int_hi))
      return false;
  return true;
}

namespace {

std::string command_text(const std::string& head, const std::vector<Value>& args) {
  if (args.empty()) return head;
  std::string out = head + " (";
  for (std::size_t i = 0; i < args.size(); ++i) out += (i ? ", " : "") + to_string(args[i]);
  return out + ")";
}

std::string create_text(const std::string& cls, const std::vector<Value>& args) {
  return command_text("create x: " + cls, args);
}

std::string call_text(const std::string& feature, const std::vector<Value>& args) {
  return command_text("call x." + feature, args);
}

const Feature* creator_of(const CheckedProgram& program, const std::string& cls) {
  const ClassDecl& c = program.cls(cls);
  return c.creator.empty() ? nullptr : c.find_feature(c.creator);
}

}  // namespace

void explore(const CheckedProgram& program, const std::string& cls, const Domains& domains,
             const ExploreOptions& options,
             const std::function<bool(const ExploredState&)>& visit) {
  const ClassDecl& c = program.cls(cls);
  std::set<std::string> seen;
  std::deque<std::pair<ExploredState, int>> queue;

  auto admit = [&](ExploredState s, int depth) {
    if (seen.size() >= options.max_states) return true;
    if (!in_domain(s.machine, s.root, domains)) return true;
    if (!seen.insert(s.machine.fingerprint(s.root)).second) return true;
    if (!visit(s)) return false;
    queue.emplace_back(std::move(s), depth);
    return true;
  };

  const Feature* creator = creator_of(program, cls);
  const auto creations =
      creator ? argument_tuples(*creator, domains) : std::vector<std::vector<Value>>{{}};
  for (const auto& args : creations) {
    Machine m(program, options.runtime);
    RefValue root;
    try {
      root = m.create(cls, args);
    } catch (const std::exception&) {
      continue;
    }
    m.clear_checks();
    if (!admit(ExploredState{std::move(m), root, {create_text(cls, args)}}, 0)) return;
  }

  while (!queue.empty()) {
    auto [state, depth] = std::move(queue.front());
    queue.pop_front();
    if (depth >= options.max_depth) continue;
    for (const auto& f : c.features) {
      if (f.is_creator) continue;
      for (const auto& args : argument_tuples(f, domains)) {
        Machine m = state.machine;
        try {
          m.call(state.root, f.name, args);
        } catch (const std::exception&) {
          continue;
        }
        m.clear_checks();
        auto history = state.history;
        history.push_back(call_text(f.name, args));
        if (!admit(ExploredState{std::move(m), state.root, std::move(history)}, depth + 1)) return;
      }
    }
  }
}

std::string_view to_string(ReplayResult::Status status) {
  switch (status) {
    case ReplayResult::Status::Reproduced: return "reproduced";
    case ReplayResult::Status::NotReproduced: return "not reproduced";
    case ReplayResult::Status::Impossible: return "impossible";
  }
  return "?";
}

namespace {

bool same_clause(const Violation& v, const Obligation& o) {
  const auto kind = obligation_kind(v.kind);
  return kind && *kind == o.kind && v.label == o.provenance && v.class_name == o.class_name &&
         v.feature_name == o.feature_name;
}

// Counterexample symbols naming pre-state attribute paths of Current.
bool is_state_symbol(const std::string& name, const Feature& feature) {
  if (name.empty() || name[0] == '$' || name.find('\'') != std::string::npos) return false;
  if (name == "Void" || name.rfind("Void.", 0) == 0) return false;
  return feature.find_param(name) == nullptr;
}

bool value_matches(const Value& expected, const Value& actual) {
  if (std::holds_alternative<RefValue>(expected)) return std::holds_alternative<RefValue>(actual);
  return expected == actual;
}

}  // namespace

ReplayResult replay_counterexample(const CheckedProgram& program, const Obligation& obligation,
                                   const Environment& counterexample, const Domains& domains,
                                   const ExploreOptions& options) {
  ReplayResult result;
  const ClassDecl& c = program.cls(obligation.class_name);
  const Feature* feature = c.find_feature(obligation.feature_name);
  if (!feature) {
    result.detail = "obligation does not belong to a routine";
    return result;
  }

  std::vector<Value> args;
  for (const auto& p : feature->params) {
    auto it = counterexample.find(p.name);
    Value v = it != counterexample.end() ? it->second : domains.values(p.type).front();
    if (p.type.is_ref() && !is_void(v)) {
      result.detail = "reference argument " + p.name + " cannot be supplied";
      return result;
    }
    args.push_back(std::move(v));
  }

  auto attempt = [&](Machine& m, const std::function<void()>& run,
                     std::vector<std::string> history) {
    try {
      run();
    } catch (const ContractViolation& e) {
      if (same_clause(e.violation(), obligation)) {
        result.status = ReplayResult::Status::Reproduced;
        result.violation = e.violation();
        result.history = std::move(history);
        return true;
      }
      if (result.detail.empty()) result.detail = "monitor reported " + e.violation().describe();
    } catch (const std::exception& e) {
      if (result.detail.empty()) result.detail = e.what();
    }
    (void)m;
    return false;
  };

  if (feature->is_creator) {
    Machine m(program, options.runtime);
    result.matching_states = 1;
    result.status = ReplayResult::Status::NotReproduced;
    attempt(m, [&] { m.create(c.name, args); }, {create_text(c.name, args)});
    if (result.status == ReplayResult::Status::NotReproduced && result.detail.empty())
      result.detail = "creation succeeded";
    return result;
  }

  std::vector<std::pair<std::string, Value>> wanted;
  for (const auto& [name, v] : counterexample)
    if (is_state_symbol(name, *feature)) wanted.emplace_back(name, v);

  explore(program, c.name, domains, options, [&](const ExploredState& s) {
    for (const auto& [path, v] : wanted) {
      try {
        if (!value_matches(v, s.machine.read(s.root, path))) return true;
      } catch (const std::exception&) {
        // Unreadable in this state (behind Void): no constraint.
      }
    }
    ++result.matching_states;
    Machine m = s.machine;
    auto history = s.history;
    history.push_back(call_text(feature->name, args));
    return !attempt(m, [&] { m.call(s.root, feature->name, args); }, std::move(history));
  });

  if (result.status != ReplayResult::Status::Reproduced) {
    if (result.matching_states == 0) {
      result.status = ReplayResult::Status::Impossible;
      result.detail = "no reachable state agrees with the counterexample";
    } else {
      result.status = ReplayResult::Status::NotReproduced;
      if (result.detail.empty()) result.detail = "call succeeded in every matching state";
    }
  }
  return result;
}

SweepResult soundness_sweep(const CheckedProgram& program,
                            const std::vector<std::pair<Obligation, Verdict>>& verdicts,
                            const Domains& domains, const ExploreOptions& options) {
  using Key = std::tuple<std::string, std::string, ObligationKind, std::string>;
  std::map<Key, std::vector<const std::pair<Obligation, Verdict>*>> index;
  for (const auto& entry : verdicts) {
    const Obligation& o = entry.first;
    index[{o.class_name, o.feature_name, o.kind, o.provenance}].push_back(&entry);
  }

  SweepResult result;
  std::set<std::string> reported;
  auto judge = [&](const Violation& v, const std::vector<std::string>& history) {
    if (v.kind == CheckKind::Precondition) return;
    ++result.violations;
    const auto kind = obligation_kind(v.kind);
    std::string problem;
    auto it = kind ? index.find({v.class_name, v.feature_name, *kind, v.label}) : index.end();
    if (it == index.end()) {
      problem = "no obligation for " + v.describe();
    } else {
      bool refuted = false;
      for (const auto* e : it->second) refuted |= e->second.kind != Verdict::Kind::Discharged;
      if (!refuted) problem = it->second.front()->first.id + " is Discharged but " + v.describe();
    }
    if (problem.empty() || !reported.insert(problem).second) return;
    std::string trail;
    for (const auto& h : history) trail += (trail.empty() ? "" : "; ") + h;
    result.exceptions.push_back(problem + " after: " + trail);
  };

  for (const auto& c : program.program().classes) {
    const Feature* creator = creator_of(program, c.name);
    if (creator) {
      for (const auto& args : argument_tuples(*creator, domains)) {
        Machine m(program, options.runtime);
        ++result.transitions;
        try {
          m.create(c.name, args);
        } catch (const ContractViolation& e) {
          judge(e.violation(), {create_text(c.name, args)});
        } catch (const std::exception& e) {
          result.exceptions.push_back(create_text(c.name, args) + ": " + e.what());
        }
      }
    }
    explore(program, c.name, domains, options, [&](const ExploredState& s) {
      ++result.states;
      for (const auto& f : c.features) {
        if (f.is_creator) continue;
        for (const auto& args : argument_tuples(f, domains)) {
          Machine m = s.machine;
          ++result.transitions;
          auto history = s.history;
          history.push_back(call_text(f.name, args));
          try {
            m.call(s.root, f.name, args);
          } catch (const ContractViolation& e) {
            judge(e.violation(), history);
          } catch (const std::exception& e) {
            result.exceptions.push_back(history.back() + ": " + e.what());
          }
        }
      }
      return true;
    });
  }
  return result;
}

}  // namespace miniproof

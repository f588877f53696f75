#pragma once

#include <string>
#include <vector>

#include "miniproof/analyzer.hpp"
#include "miniproof/corpus.hpp"
#include "miniproof/discharge.hpp"
#include "miniproof/parser.hpp"
#include "miniproof/vcgen.hpp"

namespace testing {

inline miniproof::CheckedProgram load(const std::string& entry) {
  return miniproof::analyze(miniproof::parse(miniproof::load_builtin(entry).source));
}

inline miniproof::CheckedProgram compile(const std::string& source) {
  return miniproof::analyze(miniproof::parse(source));
}

inline const miniproof::Obligation& find(const std::vector<miniproof::Obligation>& obs,
                                         const std::string& id) {
  for (const auto& o : obs)
    if (o.id == id) return o;
  throw std::out_of_range("no obligation " + id);
}

// Reference decision procedure: walks every environment in enumeration
// order and returns the first falsifying one.
inline miniproof::Verdict brute_force(const miniproof::Obligation& o,
                                      const miniproof::Domains& d) {
  using namespace miniproof;
  if (o.kind == ObligationKind::Unsupported) return Verdict::error("creation expression in contract");
  EnvironmentEnumerator en(o.formula, d);
  Environment env;
  while (en.next(env)) {
    try {
      if (!evaluate_formula(o.formula, env)) return Verdict::failed(env);
    } catch (const EvalError& e) {
      return Verdict::error(e.what());
    }
  }
  return Verdict::discharged();
}

}  // namespace testing

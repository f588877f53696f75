#pragma once

// Verification-condition generation by weakest preconditions.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "miniproof/analyzer.hpp"
#include "miniproof/ast.hpp"

namespace miniproof {

enum class ObligationKind {
  Postcondition,
  InvariantMaintenance,
  Frame,
  CalleePrecondition,
  Overflow,
  VoidDereference,
  CheckAssertion,
  Unsupported,
};

std::string_view to_string(ObligationKind kind);
bool parse_obligation_kind(std::string_view text, ObligationKind& out);

struct Obligation {
  std::string id;  // Class.feature.Kind.index
  ObligationKind kind = ObligationKind::Postcondition;
  std::string class_name;
  std::string feature_name;
  ExprPtr formula;
  std::string provenance;
};

// Depth to which frame checks compare reference-typed model queries.
inline constexpr int kFrameDepth = 2;

struct VerifyOptions {
  bool check_overflow = false;
  int overflow_width = 32;  // 8, 16, 32 or 64
  std::int64_t int_lo = -8;
  std::int64_t int_hi = 8;

  std::int64_t overflow_min() const;
  std::int64_t overflow_max() const;
  // Empty when the options are acceptable, otherwise a description.
  std::string validate() const;
};

// "LO..HI" with optional signs; false when malformed.
bool parse_int_range(std::string_view text, std::int64_t& lo, std::int64_t& hi);

// Weakest precondition of a statement list inside `feature` of `cls`.
// Inline assertions (callee preconditions, void and overflow checks,
// check statements) are assumed, so this is the partial-correctness wp
// used for postcondition-style obligations.
ExprPtr wp(const CheckedProgram& program, const ClassDecl& cls, const Feature& feature,
           const std::vector<Stmt>& body, const ExprPtr& post, const VerifyOptions& opts = {});

std::vector<Obligation> generate_obligations(const CheckedProgram& program,
                                             const VerifyOptions& opts);

// Formula rendered in source syntax.
std::string formula_text(const Obligation& o);

// JSON array of {id, kind, class, feature, provenance, formula}.
std::string obligations_json(const std::vector<Obligation>& obligations);

}  // namespace miniproof

#pragma once

// Helpers for building and rewriting verification formulas.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "miniproof/ast.hpp"

namespace miniproof {

// The storage location an expression denotes: a root name optionally
// followed by attribute reads ("station.current_screen.msg"). Reads of
// constant attributes and non-designator expressions have no location.
// A read through a Void literal is rooted at "Void".
std::optional<std::string> location_of(const Expr& e);

// Replaces every occurrence of `location` by `replacement`. Operands of
// `old` are left untouched: they denote entry values.
ExprPtr substitute(const ExprPtr& e, const std::string& location, const ExprPtr& replacement);

// Generic bottom-up rewrite; `fn` sees nodes whose operands were already
// rewritten and returns a replacement or nullptr to keep the node.
using RewriteFn = std::function<ExprPtr(const ExprPtr&)>;
ExprPtr rewrite(const ExprPtr& e, const RewriteFn& fn, bool descend_into_old = true);

// Removes `old` wrappers (used once a formula is stated over entry values).
ExprPtr strip_old(const ExprPtr& e);

ExprPtr conj(const ExprPtr& a, const ExprPtr& b);
ExprPtr conj(const std::vector<ExprPtr>& parts);
ExprPtr implies(const ExprPtr& hyp, const ExprPtr& goal);
ExprPtr negate(const ExprPtr& e);
ExprPtr equals(const ExprPtr& a, const ExprPtr& b);
ExprPtr not_void(const ExprPtr& e);

bool is_true(const ExprPtr& e);

// Structural equality (positions and types ignored).
bool same_expr(const Expr& a, const Expr& b);

// Equivalence-preserving cleanup: folds operations on literals (constant
// attribute reads count as literals), boolean identities and comparisons of
// an expression with itself.
ExprPtr simplify(const ExprPtr& e);

// Free symbols of a formula with their types, sorted by name.
struct FreeSymbol {
  std::string name;
  Type type;
  bool operator==(const FreeSymbol&) const = default;
};
std::vector<FreeSymbol> free_symbols(const ExprPtr& formula);

}  // namespace miniproof

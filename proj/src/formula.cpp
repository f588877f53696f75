#include "miniproof/formula.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace miniproof {

std::optional<std::string> location_of(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Name:
      if (e.constant) return std::nullopt;
      return e.text;
    case ExprKind::VoidLit: return std::string("Void");
    case ExprKind::Qualified: {
      if (e.constant) return std::nullopt;
      auto base = location_of(*e.operands[0]);
      if (!base) return std::nullopt;
      return *base + "." + e.text;
    }
    default: return std::nullopt;
  }
}

namespace {

ExprPtr with_operands(const ExprPtr& e, std::vector<ExprPtr> ops) {
  bool same = ops.size() == e->operands.size();
  for (std::size_t i = 0; same && i < ops.size(); ++i) same = ops[i] == e->operands[i];
  if (same) return e;
  auto n = std::make_shared<Expr>(*e);
  n->operands = std::move(ops);
  return n;
}

}  // namespace

ExprPtr substitute(const ExprPtr& e, const std::string& location, const ExprPtr& replacement) {
  if (e->kind == ExprKind::Old) return e;
  if (e->kind == ExprKind::Name || e->kind == ExprKind::Qualified) {
    auto loc = location_of(*e);
    if (loc && *loc == location) return replacement;
  }
  if (e->operands.empty()) return e;
  std::vector<ExprPtr> ops;
  ops.reserve(e->operands.size());
  for (const auto& op : e->operands) ops.push_back(substitute(op, location, replacement));
  return with_operands(e, std::move(ops));
}

ExprPtr rewrite(const ExprPtr& e, const RewriteFn& fn, bool descend_into_old) {
  ExprPtr cur = e;
  if (!e->operands.empty() && (descend_into_old || e->kind != ExprKind::Old)) {
    std::vector<ExprPtr> ops;
    ops.reserve(e->operands.size());
    for (const auto& op : e->operands) ops.push_back(rewrite(op, fn, descend_into_old));
    cur = with_operands(e, std::move(ops));
  }
  if (ExprPtr r = fn(cur)) return r;
  return cur;
}

ExprPtr strip_old(const ExprPtr& e) {
  return rewrite(e, [](const ExprPtr& n) -> ExprPtr {
    return n->kind == ExprKind::Old ? n->operands[0] : nullptr;
  });
}

bool is_true(const ExprPtr& e) { return e->kind == ExprKind::BoolLit && e->bool_value; }

namespace {
bool is_false(const ExprPtr& e) { return e->kind == ExprKind::BoolLit && !e->bool_value; }
}  // namespace

ExprPtr conj(const ExprPtr& a, const ExprPtr& b) {
  if (is_true(a)) return b;
  if (is_true(b)) return a;
  if (is_false(a) || is_false(b)) return make_bool(false);
  return make_binary(BinaryOp::And, a, b);
}

ExprPtr conj(const std::vector<ExprPtr>& parts) {
  ExprPtr out = make_bool(true);
  for (const auto& p : parts) out = conj(out, p);
  return out;
}

ExprPtr implies(const ExprPtr& hyp, const ExprPtr& goal) {
  if (is_true(goal) || is_false(hyp)) return make_bool(true);
  if (is_true(hyp)) return goal;
  return make_binary(BinaryOp::Implies, hyp, goal);
}

ExprPtr negate(const ExprPtr& e) {
  if (e->kind == ExprKind::BoolLit) return make_bool(!e->bool_value);
  return make_unary(UnaryOp::Not, e);
}

ExprPtr equals(const ExprPtr& a, const ExprPtr& b) { return make_binary(BinaryOp::Eq, a, b); }

ExprPtr not_void(const ExprPtr& e) {
  return make_binary(BinaryOp::Ne, e, make_void(e->type));
}

namespace {

void collect_symbols(const ExprPtr& e, std::map<std::string, Type>& out) {
  if (e->kind == ExprKind::Name || e->kind == ExprKind::Qualified) {
    if (auto loc = location_of(*e)) out.emplace(*loc, e->type);
  }
  for (const auto& op : e->operands) collect_symbols(op, out);
}

}  // namespace

std::vector<FreeSymbol> free_symbols(const ExprPtr& formula) {
  std::map<std::string, Type> found;
  collect_symbols(formula, found);
  std::vector<FreeSymbol> out;
  out.reserve(found.size());
  for (auto& [name, type] : found) out.push_back({name, type});
  return out;
}

}  // namespace miniproof

namespace miniproof {

bool same_expr(const Expr& a, const Expr& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind || a.operands.size() != b.operands.size()) return false;
  switch (a.kind) {
    case ExprKind::IntLit: return a.int_value == b.int_value;
    case ExprKind::BoolLit: return a.bool_value == b.bool_value;
    case ExprKind::StrLit:
    case ExprKind::Create:
    case ExprKind::Name: return a.text == b.text;
    case ExprKind::SetLit: return a.elements == b.elements;
    case ExprKind::Qualified:
      if (a.text != b.text) return false;
      break;
    case ExprKind::Unary:
      if (a.unary_op != b.unary_op) return false;
      break;
    case ExprKind::Binary:
      if (a.binary_op != b.binary_op) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a.operands.size(); ++i)
    if (!same_expr(*a.operands[i], *b.operands[i])) return false;
  return true;
}

namespace {

// Literal view of an expression, or nullptr.
const Expr* literal(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
    case ExprKind::StrLit:
    case ExprKind::SetLit:
    case ExprKind::VoidLit: return e.get();
    case ExprKind::Name:
    case ExprKind::Qualified: return e->constant ? e->constant.get() : nullptr;
    default: return nullptr;
  }
}

// Three-way comparison of two literals of compatible types; nullopt when
// they cannot be compared for equality.
std::optional<bool> literal_equal(const Expr& a, const Expr& b) {
  if (a.kind == ExprKind::VoidLit || b.kind == ExprKind::VoidLit)
    return a.kind == b.kind;
  if (a.kind != b.kind) return std::nullopt;
  switch (a.kind) {
    case ExprKind::IntLit: return a.int_value == b.int_value;
    case ExprKind::BoolLit: return a.bool_value == b.bool_value;
    case ExprKind::StrLit: return a.text == b.text;
    case ExprKind::SetLit: {
      std::set<std::string> x(a.elements.begin(), a.elements.end());
      std::set<std::string> y(b.elements.begin(), b.elements.end());
      return x == y;
    }
    default: return std::nullopt;
  }
}

ExprPtr fold_binary(const ExprPtr& e) {
  const ExprPtr& l = e->operands[0];
  const ExprPtr& r = e->operands[1];
  const BinaryOp op = e->binary_op;
  const Expr* a = literal(l);
  const Expr* b = literal(r);
  const bool at = a && a->kind == ExprKind::BoolLit && a->bool_value;
  const bool af = a && a->kind == ExprKind::BoolLit && !a->bool_value;
  const bool bt = b && b->kind == ExprKind::BoolLit && b->bool_value;
  const bool bf = b && b->kind == ExprKind::BoolLit && !b->bool_value;
  switch (op) {
    case BinaryOp::And:
      if (af || bf) return make_bool(false);
      if (at) return r;
      if (bt) return l;
      return nullptr;
    case BinaryOp::Or:
      if (at || bt) return make_bool(true);
      if (af) return r;
      if (bf) return l;
      return nullptr;
    case BinaryOp::Implies:
      if (af || bt) return make_bool(true);
      if (at) return r;
      if (bf) return negate(l);
      return nullptr;
    default: break;
  }
  if (same_expr(*l, *r)) {
    switch (op) {
      case BinaryOp::Eq:
      case BinaryOp::Le:
      case BinaryOp::Ge: return make_bool(true);
      case BinaryOp::Ne:
      case BinaryOp::Lt:
      case BinaryOp::Gt: return make_bool(false);
      default: break;
    }
  }
  if (!a || !b) return nullptr;
  if (op == BinaryOp::Eq || op == BinaryOp::Ne) {
    auto eq = literal_equal(*a, *b);
    if (!eq) return nullptr;
    return make_bool(op == BinaryOp::Eq ? *eq : !*eq);
  }
  if (a->kind != ExprKind::IntLit || b->kind != ExprKind::IntLit) return nullptr;
  const std::int64_t x = a->int_value;
  const std::int64_t y = b->int_value;
  std::int64_t out = 0;
  switch (op) {
    case BinaryOp::Add:
      if (__builtin_add_overflow(x, y, &out)) return nullptr;
      return make_int(out);
    case BinaryOp::Sub:
      if (__builtin_sub_overflow(x, y, &out)) return nullptr;
      return make_int(out);
    case BinaryOp::Mul:
      if (__builtin_mul_overflow(x, y, &out)) return nullptr;
      return make_int(out);
    case BinaryOp::Lt: return make_bool(x < y);
    case BinaryOp::Le: return make_bool(x <= y);
    case BinaryOp::Gt: return make_bool(x > y);
    case BinaryOp::Ge: return make_bool(x >= y);
    default: return nullptr;
  }
}

}  // namespace

ExprPtr simplify(const ExprPtr& e) {
  return rewrite(e, [](const ExprPtr& n) -> ExprPtr {
    switch (n->kind) {
      case ExprKind::Old:
        return literal(n->operands[0]) ? n->operands[0] : nullptr;
      case ExprKind::Unary: {
        const Expr* a = literal(n->operands[0]);
        if (!a) {
          const Expr& inner = *n->operands[0];
          if (n->unary_op == UnaryOp::Not && inner.kind == ExprKind::Unary &&
              inner.unary_op == UnaryOp::Not)
            return inner.operands[0];
          return nullptr;
        }
        if (n->unary_op == UnaryOp::Not && a->kind == ExprKind::BoolLit)
          return make_bool(!a->bool_value);
        if (n->unary_op == UnaryOp::Neg && a->kind == ExprKind::IntLit &&
            a->int_value != INT64_MIN)
          return make_int(-a->int_value);
        return nullptr;
      }
      case ExprKind::Has: {
        const Expr* s = literal(n->operands[0]);
        const Expr* x = literal(n->operands[1]);
        if (!s || !x || s->kind != ExprKind::SetLit) return nullptr;
        if (x->kind == ExprKind::VoidLit) return make_bool(false);
        if (x->kind != ExprKind::StrLit) return nullptr;
        return make_bool(std::find(s->elements.begin(), s->elements.end(), x->text) !=
                         s->elements.end());
      }
      case ExprKind::Binary: return fold_binary(n);
      default: return nullptr;
    }
  });
}

}  // namespace miniproof

#include "miniproof/ast.hpp"

#include <algorithm>

namespace miniproof {

std::string to_string(const Type& type) {
  switch (type.kind) {
    case Type::Kind::Integer: return "INTEGER";
    case Type::Kind::Boolean: return "BOOLEAN";
    case Type::Kind::String: return "STRING";
    case Type::Kind::StringSet: return "SET_OF_STRING";
    case Type::Kind::Ref: return type.class_name;
    case Type::Kind::Void: return "NONE";
    case Type::Kind::Unknown: break;
  }
  return "<unknown>";
}

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "/=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
    case BinaryOp::Implies: return "implies";
  }
  return "?";
}

bool is_arithmetic(BinaryOp op) {
  return op == BinaryOp::Add || op == BinaryOp::Sub || op == BinaryOp::Mul;
}

namespace {

std::shared_ptr<Expr> node(ExprKind kind, SourcePos pos, Type type) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->pos = pos;
  e->type = std::move(type);
  return e;
}

}  // namespace

ExprPtr make_int(std::int64_t v, SourcePos pos) {
  auto e = node(ExprKind::IntLit, pos, Type::integer());
  e->int_value = v;
  return e;
}

ExprPtr make_bool(bool v, SourcePos pos) {
  auto e = node(ExprKind::BoolLit, pos, Type::boolean());
  e->bool_value = v;
  return e;
}

ExprPtr make_string(std::string v, SourcePos pos) {
  auto e = node(ExprKind::StrLit, pos, Type::string());
  e->text = std::move(v);
  return e;
}

ExprPtr make_set(std::vector<std::string> elements, SourcePos pos) {
  auto e = node(ExprKind::SetLit, pos, Type::string_set());
  e->elements = std::move(elements);
  return e;
}

ExprPtr make_void(Type type, SourcePos pos) { return node(ExprKind::VoidLit, pos, std::move(type)); }

ExprPtr make_name(std::string name, NameRef ref, Type type, SourcePos pos) {
  auto e = node(ExprKind::Name, pos, std::move(type));
  e->text = std::move(name);
  e->ref = ref;
  return e;
}

ExprPtr make_qualified(ExprPtr target, std::string attr, Type type, ExprPtr constant,
                       SourcePos pos) {
  auto e = node(ExprKind::Qualified, pos, std::move(type));
  e->text = std::move(attr);
  e->operands.push_back(std::move(target));
  e->constant = std::move(constant);
  return e;
}

ExprPtr make_old(ExprPtr operand, SourcePos pos) {
  auto e = node(ExprKind::Old, pos, operand->type);
  e->operands.push_back(std::move(operand));
  return e;
}

ExprPtr make_unary(UnaryOp op, ExprPtr operand, SourcePos pos) {
  auto e = node(ExprKind::Unary, pos, op == UnaryOp::Neg ? Type::integer() : Type::boolean());
  e->unary_op = op;
  e->operands.push_back(std::move(operand));
  return e;
}

ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourcePos pos) {
  auto e = node(ExprKind::Binary, pos, is_arithmetic(op) ? Type::integer() : Type::boolean());
  e->binary_op = op;
  e->operands.push_back(std::move(lhs));
  e->operands.push_back(std::move(rhs));
  return e;
}

ExprPtr make_has(ExprPtr set, ExprPtr element, SourcePos pos) {
  auto e = node(ExprKind::Has, pos, Type::boolean());
  e->operands.push_back(std::move(set));
  e->operands.push_back(std::move(element));
  return e;
}

ExprPtr make_create(std::string class_name, SourcePos pos) {
  auto e = node(ExprKind::Create, pos, Type::ref(class_name));
  e->text = std::move(class_name);
  return e;
}

bool contains_kind(const ExprPtr& e, ExprKind kind) {
  if (!e) return false;
  if (e->kind == kind) return true;
  return std::any_of(e->operands.begin(), e->operands.end(),
                     [kind](const ExprPtr& op) { return contains_kind(op, kind); });
}

const Param* Feature::find_param(std::string_view n) const {
  for (const auto& p : params)
    if (p.name == n) return &p;
  return nullptr;
}

const Attribute* ClassDecl::find_attribute(std::string_view n) const {
  for (const auto& a : attributes)
    if (a.name == n) return &a;
  return nullptr;
}

const Feature* ClassDecl::find_feature(std::string_view n) const {
  for (const auto& f : features)
    if (f.name == n) return &f;
  return nullptr;
}

const ClassDecl* Program::find_class(std::string_view n) const {
  for (const auto& c : classes)
    if (c.name == n) return &c;
  return nullptr;
}

std::vector<std::string> default_model_queries(const ClassDecl& cls) {
  if (cls.model_note) return *cls.model_note;
  std::vector<std::string> out;
  for (const auto& a : cls.attributes)
    if (!a.is_constant()) out.push_back(a.name);
  return out;
}

namespace {

void add_unique(std::vector<std::string>& pool, const std::string& s) {
  if (std::find(pool.begin(), pool.end(), s) == pool.end()) pool.push_back(s);
}

void collect(const ExprPtr& e, std::vector<std::string>& pool) {
  if (!e) return;
  if (e->kind == ExprKind::StrLit) add_unique(pool, e->text);
  if (e->kind == ExprKind::SetLit)
    for (const auto& s : e->elements) add_unique(pool, s);
  for (const auto& op : e->operands) collect(op, pool);
}

void collect(const std::vector<Stmt>& body, std::vector<std::string>& pool) {
  for (const auto& s : body) {
    if (s.receiver) collect(s.receiver, pool);
    for (const auto& a : s.args) collect(a, pool);
    collect(s.value, pool);
    collect(s.check.expr, pool);
    collect(s.then_branch, pool);
    collect(s.else_branch, pool);
  }
}

}  // namespace

std::vector<std::string> collect_string_pool(const Program& program) {
  std::vector<std::string> pool;
  for (const auto& c : program.classes) {
    for (const auto& a : c.attributes) collect(a.constant, pool);
    for (const auto& f : c.features) {
      for (const auto& cl : f.require) collect(cl.expr, pool);
      collect(f.body, pool);
      for (const auto& cl : f.ensure) collect(cl.expr, pool);
    }
    for (const auto& cl : c.invariant) collect(cl.expr, pool);
  }
  return pool;
}

}  // namespace miniproof

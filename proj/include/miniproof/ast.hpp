#pragma once

// Abstract syntax of the contract language (.ccl sources).

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace miniproof {

struct SourcePos {
  int line = 0;
  int column = 0;
};

struct Type {
  enum class Kind { Unknown, Integer, Boolean, String, StringSet, Ref, Void };

  Kind kind = Kind::Unknown;
  std::string class_name;  // Ref only

  static Type integer() { return {Kind::Integer, {}}; }
  static Type boolean() { return {Kind::Boolean, {}}; }
  static Type string() { return {Kind::String, {}}; }
  static Type string_set() { return {Kind::StringSet, {}}; }
  static Type void_type() { return {Kind::Void, {}}; }
  static Type ref(std::string cls) { return {Kind::Ref, std::move(cls)}; }

  bool is_ref() const { return kind == Kind::Ref; }
  bool operator==(const Type&) const = default;
};

std::string to_string(const Type& type);

enum class ExprKind {
  IntLit,
  BoolLit,
  StrLit,
  SetLit,
  VoidLit,
  Name,
  Qualified,
  Old,
  Unary,
  Binary,
  Has,
  Create,
};

// What a Name node denotes once resolved. Symbol is used only inside
// verification formulas (havoc results and instantiation placeholders).
enum class NameRef { Unresolved, Attribute, Param, Symbol };

enum class UnaryOp { Neg, Not };

enum class BinaryOp { Add, Sub, Mul, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Implies };

std::string_view to_string(BinaryOp op);
bool is_arithmetic(BinaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Expression trees are immutable and shared; rewriting builds new nodes.
struct Expr {
  ExprKind kind = ExprKind::IntLit;
  SourcePos pos;
  Type type;  // set by the analyzer (and by formula builders)

  std::int64_t int_value = 0;
  bool bool_value = false;
  // Name: identifier. Qualified: attribute name. StrLit: the literal.
  // Create: class name.
  std::string text;
  std::vector<std::string> elements;  // SetLit
  NameRef ref = NameRef::Unresolved;
  UnaryOp unary_op = UnaryOp::Neg;
  BinaryOp binary_op = BinaryOp::Add;
  // Unary/Old: [operand]. Binary: [lhs, rhs]. Qualified: [target].
  // Has: [set, element].
  std::vector<ExprPtr> operands;
  // Literal value of a constant attribute read (Name or Qualified).
  ExprPtr constant;
};

ExprPtr make_int(std::int64_t v, SourcePos pos = {});
ExprPtr make_bool(bool v, SourcePos pos = {});
ExprPtr make_string(std::string v, SourcePos pos = {});
ExprPtr make_set(std::vector<std::string> elements, SourcePos pos = {});
ExprPtr make_void(Type type = Type::void_type(), SourcePos pos = {});
ExprPtr make_name(std::string name, NameRef ref, Type type, SourcePos pos = {});
ExprPtr make_qualified(ExprPtr target, std::string attr, Type type, ExprPtr constant = nullptr,
                       SourcePos pos = {});
ExprPtr make_old(ExprPtr operand, SourcePos pos = {});
ExprPtr make_unary(UnaryOp op, ExprPtr operand, SourcePos pos = {});
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourcePos pos = {});
ExprPtr make_has(ExprPtr set, ExprPtr element, SourcePos pos = {});
ExprPtr make_create(std::string class_name, SourcePos pos = {});

bool contains_kind(const ExprPtr& e, ExprKind kind);

struct Clause {
  std::string label;
  bool labeled = false;  // false: label was generated from the clause position
  ExprPtr expr;
  SourcePos pos;
};

enum class StmtKind { Assign, QualifiedAssign, Create, Call, If, Check };

struct Stmt {
  StmtKind kind = StmtKind::Assign;
  SourcePos pos;
  // Assign/QualifiedAssign: assigned attribute. Create: created attribute.
  std::string target;
  // QualifiedAssign and Call.
  ExprPtr receiver;
  // Call: called feature. Create: explicit creator name, may be empty.
  std::string feature;
  std::vector<ExprPtr> args;
  // Assign/QualifiedAssign: right-hand side. If: guard.
  ExprPtr value;
  // Check.
  Clause check;
  std::vector<Stmt> then_branch;
  std::vector<Stmt> else_branch;
  bool has_else = false;
  // Resolved by the analyzer. Create: class of the new object.
  // Call and QualifiedAssign: class of the receiver.
  std::string target_class;
};

struct Param {
  std::string name;
  Type type;
  SourcePos pos;
};

struct Attribute {
  std::string name;
  Type type;
  ExprPtr constant;  // set for constant attributes (`name: T = literal`)
  SourcePos pos;

  bool is_constant() const { return constant != nullptr; }
};

struct Feature {
  std::string name;
  std::vector<Param> params;
  std::vector<Clause> require;
  std::optional<std::vector<std::string>> modify;
  std::vector<Stmt> body;
  std::vector<Clause> ensure;
  bool creator_note = false;  // `note status: creator`
  bool is_creator = false;    // resolved by the analyzer
  SourcePos pos;

  const Param* find_param(std::string_view name) const;
};

struct ClassDecl {
  std::string name;
  std::optional<std::vector<std::string>> model_note;  // `note model: ...`
  std::vector<std::string> create_clause;              // `create make`
  std::vector<Attribute> attributes;
  std::vector<Feature> features;
  std::vector<Clause> invariant;
  std::string creator;  // resolved by the analyzer
  SourcePos pos;

  const Attribute* find_attribute(std::string_view name) const;
  const Feature* find_feature(std::string_view name) const;
  const Feature* creator_feature() const { return find_feature(creator); }
};

struct Program {
  std::vector<ClassDecl> classes;
  // Every string literal in the program, deduplicated, in order of first
  // appearance. This is the value order used by enumeration.
  std::vector<std::string> string_pool;

  const ClassDecl* find_class(std::string_view name) const;
};

// All non-constant attributes when the class has no model note, the declared
// list otherwise.
std::vector<std::string> default_model_queries(const ClassDecl& cls);

// Collects string literals (including set literal members and constant
// attribute values) in source order.
std::vector<std::string> collect_string_pool(const Program& program);

}  // namespace miniproof

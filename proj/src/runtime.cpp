#include "miniproof/runtime.hpp"

#include <algorithm>
#include <functional>

#include "miniproof/formula.hpp"
#include "miniproof/parser.hpp"

namespace miniproof {

namespace {

std::string text_of(const Expr& e) { return pretty(ExprPtr(ExprPtr{}, &e)); }

Value literal_of(const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit: return e.int_value;
    case ExprKind::BoolLit: return e.bool_value;
    case ExprKind::StrLit: return e.text;
    case ExprKind::SetLit: return StringSet(e.elements.begin(), e.elements.end());
    default: return VoidValue{};
  }
}

Value default_of(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Integer: return std::int64_t{0};
    case Type::Kind::Boolean: return false;
    case Type::Kind::StringSet: return StringSet{};
    default: return VoidValue{};
  }
}

std::int64_t to_int(const Value& v) {
  if (auto p = std::get_if<std::int64_t>(&v)) return *p;
  throw EvalError("integer value expected");
}

bool to_bool(const Value& v) {
  if (auto p = std::get_if<bool>(&v)) return *p;
  throw EvalError("boolean value expected");
}

std::int64_t bounded(std::int64_t v, const Expr& e, const EvalLimits& limits) {
  if (limits.overflow && (v < limits.overflow->first || v > limits.overflow->second))
    throw OverflowError(text_of(e));
  return v;
}

}  // namespace

Value eval_expr(const Expr& e, Store& store, const EvalLimits& limits) {
  switch (e.kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
    case ExprKind::StrLit:
    case ExprKind::SetLit:
    case ExprKind::VoidLit: return literal_of(e);
    case ExprKind::Name:
      if (e.constant) return literal_of(*e.constant);
      return store.name(e);
    case ExprKind::Qualified: {
      const Expr& target_expr = *e.operands[0];
      Value target = eval_expr(target_expr, store, limits);
      if (is_void(target)) throw VoidDereference(text_of(target_expr));
      if (e.constant) return literal_of(*e.constant);
      return store.field(target, e);
    }
    case ExprKind::Old: return store.old(e);
    case ExprKind::Create: throw UnsupportedInContract();
    case ExprKind::Unary: {
      Value v = eval_expr(*e.operands[0], store, limits);
      if (e.unary_op == UnaryOp::Not) return !to_bool(v);
      return bounded(checked_sub(0, to_int(v)), e, limits);
    }
    case ExprKind::Has: {
      Value set = eval_expr(*e.operands[0], store, limits);
      Value x = eval_expr(*e.operands[1], store, limits);
      const auto* s = std::get_if<StringSet>(&set);
      if (!s) throw EvalError("set value expected");
      if (is_void(x)) return false;
      const auto* str = std::get_if<std::string>(&x);
      if (!str) throw EvalError("string value expected");
      return s->count(*str) > 0;
    }
    case ExprKind::Binary: break;
  }
  const Expr& l = *e.operands[0];
  const Expr& r = *e.operands[1];
  switch (e.binary_op) {
    case BinaryOp::And:
      return to_bool(eval_expr(l, store, limits)) && to_bool(eval_expr(r, store, limits));
    case BinaryOp::Or:
      return to_bool(eval_expr(l, store, limits)) || to_bool(eval_expr(r, store, limits));
    case BinaryOp::Implies:
      return !to_bool(eval_expr(l, store, limits)) || to_bool(eval_expr(r, store, limits));
    default: break;
  }
  Value a = eval_expr(l, store, limits);
  Value b = eval_expr(r, store, limits);
  switch (e.binary_op) {
    case BinaryOp::Eq: return a == b;
    case BinaryOp::Ne: return a != b;
    case BinaryOp::Add: return bounded(checked_add(to_int(a), to_int(b)), e, limits);
    case BinaryOp::Sub: return bounded(checked_sub(to_int(a), to_int(b)), e, limits);
    case BinaryOp::Mul: return bounded(checked_mul(to_int(a), to_int(b)), e, limits);
    case BinaryOp::Lt: return to_int(a) < to_int(b);
    case BinaryOp::Le: return to_int(a) <= to_int(b);
    case BinaryOp::Gt: return to_int(a) > to_int(b);
    case BinaryOp::Ge: return to_int(a) >= to_int(b);
    default: throw EvalError("unexpected operator");
  }
}

namespace {

class EnvStore : public Store {
 public:
  EnvStore(const Environment& env, const Environment& old_env) : env_(env), old_env_(old_env) {}

  Value name(const Expr& e) override { return lookup(e.text); }

  Value field(const Value&, const Expr& read) override {
    auto loc = location_of(read);
    if (!loc) throw EvalError("attribute read without a location");
    return lookup(*loc);
  }

  Value old(const Expr& o) override {
    EnvStore inner(old_env_, old_env_);
    return eval_expr(*o.operands[0], inner);
  }

 private:
  const Environment& env_;
  const Environment& old_env_;

  Value lookup(const std::string& key) const {
    auto it = env_.find(key);
    if (it == env_.end()) throw EvalError("no value for " + key);
    return it->second;
  }
};

}  // namespace

Value eval_expr(const ExprPtr& e, const Environment& env, const Environment& old_env) {
  EnvStore store(env, old_env);
  return eval_expr(*e, store);
}

std::string_view to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::Precondition: return "Precondition";
    case CheckKind::CalleePrecondition: return "CalleePrecondition";
    case CheckKind::Postcondition: return "Postcondition";
    case CheckKind::InvariantMaintenance: return "InvariantMaintenance";
    case CheckKind::Frame: return "Frame";
    case CheckKind::Overflow: return "Overflow";
    case CheckKind::VoidDereference: return "VoidDereference";
    case CheckKind::CheckAssertion: return "CheckAssertion";
    case CheckKind::Unsupported: return "Unsupported";
  }
  return "?";
}

std::optional<ObligationKind> obligation_kind(CheckKind kind) {
  switch (kind) {
    case CheckKind::Precondition: return std::nullopt;
    case CheckKind::CalleePrecondition: return ObligationKind::CalleePrecondition;
    case CheckKind::Postcondition: return ObligationKind::Postcondition;
    case CheckKind::InvariantMaintenance: return ObligationKind::InvariantMaintenance;
    case CheckKind::Frame: return ObligationKind::Frame;
    case CheckKind::Overflow: return ObligationKind::Overflow;
    case CheckKind::VoidDereference: return ObligationKind::VoidDereference;
    case CheckKind::CheckAssertion: return ObligationKind::CheckAssertion;
    case CheckKind::Unsupported: return ObligationKind::Unsupported;
  }
  return std::nullopt;
}

std::string Violation::describe() const {
  return std::string(to_string(kind)) + " violation of '" + label + "' in " + class_name + "." +
         feature_name;
}

ContractViolation::ContractViolation(Violation v)
    : std::runtime_error(v.describe()), v_(std::move(v)) {}

struct Machine::Frame {
  RefValue current;
  const ClassDecl* cls = nullptr;
  const Feature* feature = nullptr;
  std::map<std::string, Value> params;
  std::map<const Expr*, Value> olds;
  std::map<const Expr*, std::string> void_olds;  // old operand hit Void
  int own_steps = 0;
  int* steps = &own_steps;  // shared by every frame of one outside call
};

class HeapStore : public Store {
 public:
  HeapStore(const Machine& m, const Machine::Frame& f, bool allow_old)
      : m_(m), f_(f), allow_old_(allow_old) {}

  Value name(const Expr& e) override {
    if (e.ref == NameRef::Param) {
      auto it = f_.params.find(e.text);
      if (it != f_.params.end()) return it->second;
    } else if (e.ref == NameRef::Attribute) {
      return attribute(f_.current, e.text);
    }
    throw EvalError("unknown name " + e.text);
  }

  Value field(const Value& target, const Expr& read) override {
    const auto* r = std::get_if<RefValue>(&target);
    if (!r) throw EvalError("object expected");
    return attribute(*r, read.text);
  }

  Value old(const Expr& o) override {
    if (!allow_old_) throw EvalError("old outside a postcondition");
    if (auto it = f_.void_olds.find(&o); it != f_.void_olds.end()) throw VoidDereference(it->second);
    auto it = f_.olds.find(&o);
    if (it == f_.olds.end()) throw EvalError("missing old snapshot");
    return it->second;
  }

 private:
  const Machine& m_;
  const Machine::Frame& f_;
  bool allow_old_;

  Value attribute(RefValue r, const std::string& name) const {
    const Object& obj = m_.object(r);
    auto it = obj.fields.find(name);
    if (it == obj.fields.end()) throw EvalError("no attribute " + name);
    return it->second;
  }
};

Machine::Machine(const CheckedProgram& program, RuntimeOptions options)
    : program_(program), options_(options) {}

const Object& Machine::object(RefValue r) const {
  if (r.id < 0 || static_cast<std::size_t>(r.id) >= heap_.size())
    throw EvalError("dangling reference");
  return heap_[r.id];
}

RefValue Machine::allocate(const std::string& cls) {
  const ClassDecl& decl = program_.cls(cls);
  Object obj;
  obj.cls = cls;
  for (const auto& a : decl.attributes)
    if (!a.is_constant()) obj.fields[a.name] = default_of(a.type);
  heap_.push_back(std::move(obj));
  return RefValue{static_cast<int>(heap_.size() - 1)};
}

RefValue Machine::create(const std::string& cls, const std::vector<Value>& args) {
  const ClassDecl& decl = program_.cls(cls);
  const Feature* creator = decl.creator_feature();
  if (!creator) throw std::invalid_argument("class " + cls + " has no creator");
  if (creator->params.size() != args.size())
    throw std::invalid_argument(cls + "." + creator->name + " expects " +
                                std::to_string(creator->params.size()) + " argument(s)");
  auto saved = heap_;
  try {
    RefValue r = allocate(cls);
    invoke(r, *creator, args, nullptr);
    return r;
  } catch (...) {
    heap_ = std::move(saved);
    throw;
  }
}

void Machine::call(RefValue target, const std::string& feature, const std::vector<Value>& args) {
  const Object& obj = object(target);
  const Feature* f = program_.cls(obj.cls).find_feature(feature);
  if (!f) throw std::invalid_argument("class " + obj.cls + " has no feature " + feature);
  if (f->params.size() != args.size())
    throw std::invalid_argument(obj.cls + "." + feature + " expects " +
                                std::to_string(f->params.size()) + " argument(s)");
  auto saved = heap_;
  try {
    invoke(target, *f, args, nullptr);
  } catch (...) {
    heap_ = std::move(saved);
    throw;
  }
}

namespace {

void collect_olds(const ExprPtr& e, std::vector<const Expr*>& out) {
  if (e->kind == ExprKind::Old) {
    out.push_back(e.get());
    return;
  }
  for (const auto& op : e->operands) collect_olds(op, out);
}

}  // namespace

void Machine::invoke(RefValue target, const Feature& feature, const std::vector<Value>& args,
                     Frame* caller) {
  Frame f;
  if (caller) f.steps = caller->steps;
  f.current = target;
  f.cls = &program_.cls(object(target).cls);
  f.feature = &feature;
  for (std::size_t i = 0; i < feature.params.size(); ++i) f.params[feature.params[i].name] = args[i];

  auto record = [&](const char* phase, const std::string& label, bool ok) {
    checks_.push_back({phase, f.cls->name, feature.name, label, ok});
  };

  for (const auto& c : feature.require) {
    bool ok;
    try {
      ok = to_bool(eval_contract(*c.expr, f, false));
    } catch (const UnsupportedInContract&) {
      fail(CheckKind::Unsupported, c.label, f);
    }
    record("require", c.label, ok);
    if (!ok) {
      if (caller)
        fail(CheckKind::CalleePrecondition, f.cls->name + "." + feature.name + "." + c.label,
             *caller);
      fail(CheckKind::Precondition, c.label, f);
    }
  }

  // Entry snapshots: one per syntactic `old` operand, and deep copies of the
  // model queries the feature promises to leave alone.
  std::vector<const Expr*> olds;
  for (const auto& c : feature.ensure) collect_olds(c.expr, olds);
  for (const Expr* o : olds) {
    try {
      f.olds[o] = eval_contract(*o->operands[0], f, false);
    } catch (const ContractViolation& v) {
      if (v.violation().kind != CheckKind::VoidDereference) throw;
      f.void_olds[o] = v.violation().label.substr(5);
    }
  }
  std::vector<std::pair<const Attribute*, Value>> frame;
  if (feature.modify) {
    for (const auto& q : program_.model_queries(f.cls->name)) {
      if (std::find(feature.modify->begin(), feature.modify->end(), q) != feature.modify->end())
        continue;
      const Attribute* a = f.cls->find_attribute(q);
      if (!a || a->is_constant()) continue;
      frame.emplace_back(a, snapshot(object(target).fields.at(q), a->type, kFrameDepth));
    }
  }

  exec(feature.body, f);

  std::optional<std::pair<CheckKind, std::string>> first;
  auto check = [&](const char* phase, CheckKind kind, const Clause& c) {
    bool ok;
    try {
      ok = to_bool(eval_contract(*c.expr, f, true));
    } catch (const UnsupportedInContract&) {
      record(phase, c.label, false);
      if (!first) first.emplace(CheckKind::Unsupported, c.label);
      return;
    }
    record(phase, c.label, ok);
    if (!ok && !first) first.emplace(kind, c.label);
  };
  for (const auto& c : feature.ensure) check("ensure", CheckKind::Postcondition, c);
  for (const auto& c : f.cls->invariant) check("invariant", CheckKind::InvariantMaintenance, c);
  for (const auto& [a, before] : frame) {
    const bool ok = snapshot(object(target).fields.at(a->name), a->type, kFrameDepth) == before;
    record("frame", "frame:" + a->name, ok);
    if (!ok && !first) first.emplace(CheckKind::Frame, "frame:" + a->name);
  }
  if (first) fail(first->first, first->second, f);
}

void Machine::exec(const std::vector<Stmt>& body, Frame& frame) {
  for (const auto& s : body) exec(s, frame);
}

void Machine::exec(const Stmt& s, Frame& f) {
  if (++*f.steps > options_.step_budget)
    throw StepBudgetExceeded("step budget of " + std::to_string(options_.step_budget) +
                             " statements exceeded in " + f.cls->name + "." + f.feature->name);
  switch (s.kind) {
    case StmtKind::Assign: {
      Value v = eval_body(*s.value, f);
      heap_[f.current.id].fields[s.target] = std::move(v);
      break;
    }
    case StmtKind::QualifiedAssign: {
      Value r = eval_body(*s.receiver, f);
      if (is_void(r)) fail(CheckKind::VoidDereference, "void:" + pretty(s.receiver), f);
      Value v = eval_body(*s.value, f);
      heap_[std::get<RefValue>(r).id].fields[s.target] = std::move(v);
      break;
    }
    case StmtKind::Create: {
      std::vector<Value> args;
      for (const auto& a : s.args) args.push_back(eval_body(*a, f));
      RefValue r = allocate(s.target_class);
      invoke(r, *program_.cls(s.target_class).creator_feature(), args, &f);
      heap_[f.current.id].fields[s.target] = r;
      break;
    }
    case StmtKind::Call: {
      Value r = eval_body(*s.receiver, f);
      if (is_void(r)) fail(CheckKind::VoidDereference, "void:" + pretty(s.receiver), f);
      std::vector<Value> args;
      for (const auto& a : s.args) args.push_back(eval_body(*a, f));
      const RefValue target = std::get<RefValue>(r);
      const Feature* callee = program_.cls(object(target).cls).find_feature(s.feature);
      invoke(target, *callee, args, &f);
      break;
    }
    case StmtKind::If:
      if (to_bool(eval_body(*s.value, f)))
        exec(s.then_branch, f);
      else
        exec(s.else_branch, f);
      break;
    case StmtKind::Check: {
      const bool ok = to_bool(eval_body(*s.check.expr, f));
      checks_.push_back({"check", f.cls->name, f.feature->name, s.check.label, ok});
      if (!ok) fail(CheckKind::CheckAssertion, s.check.label, f);
      break;
    }
  }
}

Value Machine::eval_body(const Expr& e, Frame& f) {
  HeapStore store(*this, f, false);
  EvalLimits limits;
  if (options_.overflow_width > 0 && options_.overflow_width < 64) {
    const std::int64_t hi = (std::int64_t{1} << (options_.overflow_width - 1)) - 1;
    limits.overflow = std::make_pair(-hi - 1, hi);
  }
  try {
    return eval_expr(e, store, limits);
  } catch (const VoidDereference& v) {
    fail(CheckKind::VoidDereference, "void:" + v.receiver(), f);
  } catch (const OverflowError& o) {
    fail(CheckKind::Overflow, "overflow:" + o.expr(), f);
  }
}

Value Machine::eval_contract(const Expr& e, Frame& f, bool allow_old) {
  HeapStore store(*this, f, allow_old);
  try {
    return eval_expr(e, store);
  } catch (const VoidDereference& v) {
    fail(CheckKind::VoidDereference, "void:" + v.receiver(), f);
  }
}

Value Machine::snapshot(const Value& v, const Type& type, int depth) const {
  if (!type.is_ref() || depth <= 1 || is_void(v)) return v;
  // Deep snapshot rendered as text: identity followed by attribute values.
  const RefValue r = std::get<RefValue>(v);
  const Object& obj = object(r);
  std::string out = to_string(v) + "{";
  for (const auto& a : program_.cls(obj.cls).attributes) {
    if (a.is_constant()) continue;
    out += a.name + "=" + to_string(snapshot(obj.fields.at(a.name), a.type, depth - 1)) + ";";
  }
  return out + "}";
}

Value Machine::read(RefValue root, const std::string& path) const {
  Value cur = root;
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t dot = path.find('.', start);
    const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos
                                                                         : dot - start);
    if (is_void(cur)) throw VoidDereference(path.substr(0, start ? start - 1 : 0));
    const auto* r = std::get_if<RefValue>(&cur);
    if (!r) throw EvalError("path " + path + " reads through a non-object");
    const Object& obj = object(*r);
    const Attribute* a = program_.cls(obj.cls).find_attribute(part);
    if (!a) throw EvalError("no attribute " + part + " in " + obj.cls);
    cur = a->is_constant() ? literal_of(*a->constant) : obj.fields.at(part);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return cur;
}

Environment Machine::flatten(RefValue root, int depth) const {
  Environment out;
  std::map<int, int> canon{{root.id, 0}};
  std::function<void(RefValue, const std::string&, int)> walk = [&](RefValue r,
                                                                    const std::string& prefix,
                                                                    int d) {
    const Object& obj = object(r);
    for (const auto& a : program_.cls(obj.cls).attributes) {
      if (a.is_constant()) continue;
      const Value& v = obj.fields.at(a.name);
      const std::string path = prefix.empty() ? a.name : prefix + "." + a.name;
      if (const auto* ref = std::get_if<RefValue>(&v)) {
        auto [it, fresh] = canon.emplace(ref->id, static_cast<int>(canon.size()));
        out[path] = RefValue{it->second};
        if (fresh && d > 1) walk(*ref, path, d - 1);
      } else {
        out[path] = v;
      }
    }
  };
  walk(root, "", depth);
  return out;
}

std::string Machine::fingerprint(RefValue root) const {
  std::map<int, int> canon;
  std::vector<int> order;
  std::string out;
  std::function<int(int)> number = [&](int id) {
    auto [it, fresh] = canon.emplace(id, static_cast<int>(canon.size()));
    if (fresh) order.push_back(id);
    return it->second;
  };
  number(root.id);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Object& obj = heap_[order[i]];
    out += obj.cls + "{";
    for (const auto& [name, v] : obj.fields) {
      out += name + "=";
      if (const auto* r = std::get_if<RefValue>(&v))
        out += "#" + std::to_string(number(r->id));
      else
        out += to_string(v);
      out += ";";
    }
    out += "}";
  }
  return out;
}

Environment Machine::describe_state(const Frame& frame) const {
  Environment env = flatten(frame.current);
  for (const auto& [k, v] : frame.params) env[k] = v;
  return env;
}

void Machine::fail(CheckKind kind, std::string label, const Frame& frame) const {
  Violation v;
  v.kind = kind;
  v.label = std::move(label);
  v.class_name = frame.cls->name;
  v.feature_name = frame.feature->name;
  v.env = describe_state(frame);
  throw ContractViolation(std::move(v));
}

}  // namespace miniproof

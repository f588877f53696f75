#include "miniproof/analyzer.hpp"

#include <algorithm>
#include <set>

namespace miniproof {

namespace {

std::string summarize(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += '\n';
    out += std::to_string(d.pos.line) + ":" + std::to_string(d.pos.column) + ": " + d.message;
  }
  return out;
}

enum class Context { Require, Ensure, Invariant, Body, Constant };

bool is_contract(Context c) {
  return c == Context::Require || c == Context::Ensure || c == Context::Invariant;
}

bool assignable(const Type& target, const Type& source) {
  if (target.kind == Type::Kind::Unknown || source.kind == Type::Kind::Unknown) return true;
  if (source.kind == Type::Kind::Void)
    return target.kind == Type::Kind::Ref || target.kind == Type::Kind::String;
  return target == source;
}

bool comparable(const Type& a, const Type& b) {
  return assignable(a, b) || assignable(b, a) ||
         (a.kind == Type::Kind::Void && b.kind == Type::Kind::Void);
}

class Analyzer {
 public:
  explicit Analyzer(const Program& program) : in_(program) {}

  CheckedProgram run() {
    declare_classes();
    if (!diags_.empty()) throw SemanticError(diags_);
    Program out;
    out.string_pool = in_.string_pool.empty() ? collect_string_pool(in_) : in_.string_pool;
    for (const auto& c : in_.classes) out.classes.push_back(check_class(c));
    if (!diags_.empty()) throw SemanticError(diags_);
    return CheckedProgram(std::move(out), std::move(symbols_));
  }

 private:
  const Program& in_;
  std::vector<Diagnostic> diags_;
  std::map<std::string, ClassSymbols> symbols_;
  std::map<std::string, const ClassDecl*> classes_;

  const ClassDecl* current_ = nullptr;
  const Feature* feature_ = nullptr;
  bool inside_old_ = false;

  void error(SourcePos pos, std::string msg) { diags_.push_back({pos, std::move(msg)}); }

  void check_type_exists(const Type& t, SourcePos pos) {
    if (t.is_ref() && !classes_.contains(t.class_name))
      error(pos, "unresolved name '" + t.class_name + "': unknown class");
  }

  void declare_classes() {
    for (const auto& c : in_.classes) {
      if (!classes_.emplace(c.name, &c).second) {
        error(c.pos, "duplicate class '" + c.name + "'");
        continue;
      }
      ClassSymbols syms;
      std::set<std::string> names;
      for (std::size_t i = 0; i < c.attributes.size(); ++i) {
        const auto& a = c.attributes[i];
        if (!names.insert(a.name).second) error(a.pos, "duplicate member '" + a.name + "' in " + c.name);
        syms.attributes.emplace(a.name, i);
      }
      for (std::size_t i = 0; i < c.features.size(); ++i) {
        const auto& f = c.features[i];
        if (!names.insert(f.name).second) error(f.pos, "duplicate member '" + f.name + "' in " + c.name);
        syms.features.emplace(f.name, i);
      }

      std::set<std::string> creators;
      for (const auto& f : c.features)
        if (f.creator_note) creators.insert(f.name);
      for (const auto& n : c.create_clause) {
        if (!syms.features.contains(n))
          error(c.pos, "unresolved name '" + n + "': create clause names no feature of " + c.name);
        creators.insert(n);
      }
      if (creators.empty())
        error(c.pos, "missing creator: class " + c.name + " has no creation procedure");
      else if (creators.size() > 1)
        error(c.pos, "duplicate creator: class " + c.name + " declares more than one creation procedure");
      else
        syms.creator = *creators.begin();

      if (c.model_note) {
        for (const auto& m : *c.model_note) {
          const Attribute* a = c.find_attribute(m);
          if (!a || a->is_constant())
            error(c.pos, "model query '" + m + "' is not a declared attribute of " + c.name);
        }
      }
      syms.model_queries = default_model_queries(c);
      symbols_.emplace(c.name, std::move(syms));
    }
  }

  const Attribute* attribute_of(const std::string& cls, const std::string& name) const {
    auto it = classes_.find(cls);
    return it == classes_.end() ? nullptr : it->second->find_attribute(name);
  }

  ClassDecl check_class(const ClassDecl& c) {
    current_ = &c;
    ClassDecl out = c;
    out.creator = symbols_[c.name].creator;
    for (auto& a : out.attributes) {
      check_type_exists(a.type, a.pos);
      if (a.constant) {
        feature_ = nullptr;
        a.constant = annotate(a.constant, Context::Constant);
        if (!assignable(a.type, a.constant->type) || a.type.is_ref())
          error(a.pos, "type mismatch: constant '" + a.name + "' of type " + to_string(a.type) +
                           " initialized with " + to_string(a.constant->type));
      }
    }
    for (std::size_t i = 0; i < out.features.size(); ++i) {
      out.features[i] = check_feature(c.features[i]);
      out.features[i].is_creator = out.features[i].name == out.creator;
    }
    feature_ = nullptr;
    for (auto& cl : out.invariant) cl.expr = check_boolean(cl.expr, Context::Invariant);
    return out;
  }

  Feature check_feature(const Feature& f) {
    feature_ = &f;
    Feature out = f;
    std::set<std::string> names;
    for (const auto& p : f.params) {
      check_type_exists(p.type, p.pos);
      if (!names.insert(p.name).second) error(p.pos, "duplicate parameter '" + p.name + "'");
      if (current_->find_attribute(p.name) || current_->find_feature(p.name))
        error(p.pos, "parameter '" + p.name + "' shadows a member of " + current_->name);
    }
    for (auto& cl : out.require) cl.expr = check_boolean(cl.expr, Context::Require);
    if (f.modify) {
      const auto& mq = symbols_[current_->name].model_queries;
      for (const auto& m : *f.modify)
        if (std::find(mq.begin(), mq.end(), m) == mq.end())
          error(f.pos, "modify target '" + m + "' is not a model query of " + current_->name);
    }
    out.body = check_body(f.body);
    for (auto& cl : out.ensure) cl.expr = check_boolean(cl.expr, Context::Ensure);
    return out;
  }

  ExprPtr check_boolean(const ExprPtr& e, Context ctx) {
    ExprPtr typed = annotate(e, ctx);
    if (typed->type.kind != Type::Kind::Boolean && typed->type.kind != Type::Kind::Unknown)
      error(e->pos, "type mismatch: expected BOOLEAN, found " + to_string(typed->type));
    return typed;
  }

  std::vector<Stmt> check_body(const std::vector<Stmt>& body) {
    std::vector<Stmt> out;
    out.reserve(body.size());
    for (const auto& s : body) out.push_back(check_statement(s));
    return out;
  }

  void check_args(const Feature& callee, const std::string& cls, std::vector<ExprPtr>& args,
                  SourcePos pos) {
    if (args.size() != callee.params.size()) {
      error(pos, "arity mismatch: " + cls + "." + callee.name + " takes " +
                     std::to_string(callee.params.size()) + " argument(s), " +
                     std::to_string(args.size()) + " given");
      for (auto& a : args) a = annotate(a, Context::Body);
      return;
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      args[i] = annotate(args[i], Context::Body);
      if (!assignable(callee.params[i].type, args[i]->type))
        error(args[i]->pos, "type mismatch: argument " + std::to_string(i + 1) + " of " + cls + "." +
                                callee.name + " expects " + to_string(callee.params[i].type) +
                                ", found " + to_string(args[i]->type));
    }
  }

  Stmt check_statement(const Stmt& s) {
    Stmt out = s;
    switch (s.kind) {
      case StmtKind::Assign: {
        out.value = annotate(s.value, Context::Body);
        const Attribute* a = current_->find_attribute(s.target);
        if (!a) {
          error(s.pos, feature_ && feature_->find_param(s.target)
                           ? "parameter '" + s.target + "' is not assignable"
                           : "unresolved name '" + s.target + "'");
        } else if (a->is_constant()) {
          error(s.pos, "constant attribute '" + s.target + "' is not assignable");
        } else if (!assignable(a->type, out.value->type)) {
          error(s.pos, "type mismatch: cannot assign " + to_string(out.value->type) + " to '" +
                           s.target + "' of type " + to_string(a->type));
        }
        break;
      }
      case StmtKind::QualifiedAssign: {
        out.receiver = annotate(s.receiver, Context::Body);
        out.value = annotate(s.value, Context::Body);
        const Type& rt = out.receiver->type;
        if (rt.kind == Type::Kind::Unknown) break;
        if (!rt.is_ref()) {
          error(s.pos, "type mismatch: qualified assignment target is not an object");
          break;
        }
        out.target_class = rt.class_name;
        const Attribute* a = attribute_of(rt.class_name, s.target);
        if (!a)
          error(s.pos, "unresolved name '" + s.target + "' in class " + rt.class_name);
        else if (a->is_constant())
          error(s.pos, "constant attribute '" + s.target + "' is not assignable");
        else if (!assignable(a->type, out.value->type))
          error(s.pos, "type mismatch: cannot assign " + to_string(out.value->type) + " to '" +
                           s.target + "' of type " + to_string(a->type));
        break;
      }
      case StmtKind::Create: {
        const Attribute* a = current_->find_attribute(s.target);
        if (!a || !a->type.is_ref() || a->is_constant()) {
          error(s.pos, "creation target '" + s.target + "' is not an object attribute of " +
                           current_->name);
          for (auto& arg : out.args) arg = annotate(arg, Context::Body);
          break;
        }
        out.target_class = a->type.class_name;
        auto it = classes_.find(a->type.class_name);
        if (it == classes_.end()) break;
        const std::string& creator = symbols_[it->first].creator;
        if (!s.feature.empty() && s.feature != creator) {
          error(s.pos, "'" + s.feature + "' is not the creation procedure of " + it->first);
          break;
        }
        const Feature* cf = it->second->find_feature(creator);
        if (cf) check_args(*cf, it->first, out.args, s.pos);
        break;
      }
      case StmtKind::Call: {
        out.receiver = annotate(s.receiver, Context::Body);
        const Type& rt = out.receiver->type;
        if (rt.kind == Type::Kind::Unknown) {
          for (auto& arg : out.args) arg = annotate(arg, Context::Body);
          break;
        }
        if (!rt.is_ref()) {
          error(s.pos, "type mismatch: call receiver is not an object");
          break;
        }
        out.target_class = rt.class_name;
        auto it = classes_.find(rt.class_name);
        if (it == classes_.end()) break;
        const Feature* callee = it->second->find_feature(s.feature);
        if (!callee) {
          error(s.pos, "unresolved name '" + s.feature + "': no feature in " + rt.class_name);
          for (auto& arg : out.args) arg = annotate(arg, Context::Body);
          break;
        }
        if (callee->name == symbols_[rt.class_name].creator)
          error(s.pos, "creation procedure '" + s.feature + "' may only be used in a creation instruction");
        check_args(*callee, rt.class_name, out.args, s.pos);
        break;
      }
      case StmtKind::If:
        out.value = check_boolean(s.value, Context::Body);
        out.then_branch = check_body(s.then_branch);
        out.else_branch = check_body(s.else_branch);
        break;
      case StmtKind::Check:
        out.check.expr = check_boolean(s.check.expr, Context::Body);
        break;
    }
    return out;
  }

  ExprPtr retype(const ExprPtr& e, Type type, std::vector<ExprPtr> operands,
                 NameRef ref = NameRef::Unresolved, ExprPtr constant = nullptr) {
    auto n = std::make_shared<Expr>(*e);
    n->type = std::move(type);
    n->operands = std::move(operands);
    if (ref != NameRef::Unresolved) n->ref = ref;
    n->constant = std::move(constant);
    return n;
  }

  ExprPtr annotate(const ExprPtr& e, Context ctx) {
    switch (e->kind) {
      case ExprKind::IntLit:
      case ExprKind::BoolLit:
      case ExprKind::StrLit:
      case ExprKind::SetLit:
      case ExprKind::VoidLit: return e;
      case ExprKind::Create:
        if (!is_contract(ctx)) {
          error(e->pos, "creation expression outside a contract clause");
          return retype(e, {}, {});
        }
        if (!classes_.contains(e->text)) error(e->pos, "unresolved name '" + e->text + "': unknown class");
        return retype(e, Type::ref(e->text), {});
      case ExprKind::Name: {
        if (ctx == Context::Constant) {
          error(e->pos, "constant attributes take literal values");
          return retype(e, {}, {});
        }
        if (const Attribute* a = current_->find_attribute(e->text))
          return retype(e, a->type, {}, NameRef::Attribute, a->constant);
        if (feature_ && ctx != Context::Invariant) {
          if (const Param* p = feature_->find_param(e->text))
            return retype(e, p->type, {}, NameRef::Param);
        }
        error(e->pos, "unresolved name '" + e->text + "'");
        return retype(e, {}, {});
      }
      case ExprKind::Qualified: {
        ExprPtr target = annotate(e->operands[0], ctx);
        if (target->type.kind == Type::Kind::Unknown) return retype(e, {}, {target});
        if (!target->type.is_ref()) {
          error(e->pos, "type mismatch: '." + e->text + "' applied to " + to_string(target->type));
          return retype(e, {}, {target});
        }
        const Attribute* a = attribute_of(target->type.class_name, e->text);
        if (!a) {
          error(e->pos, "unresolved name '" + e->text + "' in class " + target->type.class_name);
          return retype(e, {}, {target});
        }
        return retype(e, a->type, {target}, NameRef::Unresolved, a->constant);
      }
      case ExprKind::Old: {
        if (ctx != Context::Ensure) {
          error(e->pos, "old outside ensure");
          return retype(e, {}, {annotate(e->operands[0], ctx)});
        }
        if (inside_old_) error(e->pos, "nested old expression");
        inside_old_ = true;
        ExprPtr inner = annotate(e->operands[0], ctx);
        inside_old_ = false;
        return retype(e, inner->type, {inner});
      }
      case ExprKind::Unary: {
        ExprPtr inner = annotate(e->operands[0], ctx);
        const Type want = e->unary_op == UnaryOp::Neg ? Type::integer() : Type::boolean();
        if (inner->type.kind != Type::Kind::Unknown && inner->type != want)
          error(e->pos, "type mismatch: operand of " +
                            std::string(e->unary_op == UnaryOp::Neg ? "'-'" : "'not'") +
                            " must be " + to_string(want));
        return retype(e, want, {inner});
      }
      case ExprKind::Binary: {
        ExprPtr l = annotate(e->operands[0], ctx);
        ExprPtr r = annotate(e->operands[1], ctx);
        const BinaryOp op = e->binary_op;
        auto expect = [&](const ExprPtr& x, const Type& t) {
          if (x->type.kind != Type::Kind::Unknown && x->type != t)
            error(x->pos, "type mismatch: operand of '" + std::string(to_string(op)) + "' must be " +
                              to_string(t) + ", found " + to_string(x->type));
        };
        Type result = Type::boolean();
        switch (op) {
          case BinaryOp::Add:
          case BinaryOp::Sub:
          case BinaryOp::Mul:
            expect(l, Type::integer());
            expect(r, Type::integer());
            result = Type::integer();
            break;
          case BinaryOp::Lt:
          case BinaryOp::Le:
          case BinaryOp::Gt:
          case BinaryOp::Ge:
            expect(l, Type::integer());
            expect(r, Type::integer());
            break;
          case BinaryOp::And:
          case BinaryOp::Or:
          case BinaryOp::Implies:
            expect(l, Type::boolean());
            expect(r, Type::boolean());
            break;
          case BinaryOp::Eq:
          case BinaryOp::Ne:
            if (!comparable(l->type, r->type))
              error(e->pos, "type mismatch: cannot compare " + to_string(l->type) + " with " +
                                to_string(r->type));
            break;
        }
        return retype(e, result, {l, r});
      }
      case ExprKind::Has: {
        ExprPtr set = annotate(e->operands[0], ctx);
        ExprPtr elem = annotate(e->operands[1], ctx);
        if (set->type.kind != Type::Kind::Unknown && set->type.kind != Type::Kind::StringSet)
          error(e->pos, "type mismatch: 'has' requires a SET_OF_STRING receiver, found " +
                            to_string(set->type));
        if (!assignable(Type::string(), elem->type))
          error(e->pos, "type mismatch: 'has' requires a STRING argument, found " +
                            to_string(elem->type));
        return retype(e, Type::boolean(), {set, elem});
      }
    }
    return e;
  }
};

}  // namespace

SemanticError::SemanticError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

CheckedProgram::CheckedProgram(Program program, std::map<std::string, ClassSymbols> symbols)
    : program_(std::make_shared<const Program>(std::move(program))), symbols_(std::move(symbols)) {}

const ClassDecl& CheckedProgram::cls(std::string_view name) const {
  const ClassDecl* c = program_->find_class(name);
  if (!c) throw std::out_of_range("unknown class " + std::string(name));
  return *c;
}

const Feature& CheckedProgram::feature(std::string_view c, std::string_view name) const {
  const Feature* f = cls(c).find_feature(name);
  if (!f) throw std::out_of_range("unknown feature " + std::string(c) + "." + std::string(name));
  return *f;
}

const std::vector<std::string>& CheckedProgram::model_queries(std::string_view c) const {
  return symbols_.at(std::string(c)).model_queries;
}

bool CheckedProgram::is_model_query(std::string_view c, std::string_view attr) const {
  const auto& mq = model_queries(c);
  return std::find(mq.begin(), mq.end(), attr) != mq.end();
}

CheckedProgram analyze(const Program& program) { return Analyzer(program).run(); }

}  // namespace miniproof

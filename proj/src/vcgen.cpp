#include "miniproof/vcgen.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <tuple>

#include <json.hpp>

#include "miniproof/formula.hpp"
#include "miniproof/parser.hpp"

namespace miniproof {

std::string_view to_string(ObligationKind kind) {
  switch (kind) {
    case ObligationKind::Postcondition: return "Postcondition";
    case ObligationKind::InvariantMaintenance: return "InvariantMaintenance";
    case ObligationKind::Frame: return "Frame";
    case ObligationKind::CalleePrecondition: return "CalleePrecondition";
    case ObligationKind::Overflow: return "Overflow";
    case ObligationKind::VoidDereference: return "VoidDereference";
    case ObligationKind::CheckAssertion: return "CheckAssertion";
    case ObligationKind::Unsupported: return "Unsupported";
  }
  return "?";
}

bool parse_obligation_kind(std::string_view text, ObligationKind& out) {
  for (int k = 0; k <= static_cast<int>(ObligationKind::Unsupported); ++k) {
    auto kind = static_cast<ObligationKind>(k);
    if (to_string(kind) == text) {
      out = kind;
      return true;
    }
  }
  return false;
}

std::int64_t VerifyOptions::overflow_min() const {
  if (overflow_width >= 64) return INT64_MIN;
  return -(std::int64_t{1} << (overflow_width - 1));
}

std::int64_t VerifyOptions::overflow_max() const {
  if (overflow_width >= 64) return INT64_MAX;
  return (std::int64_t{1} << (overflow_width - 1)) - 1;
}

std::string VerifyOptions::validate() const {
  if (overflow_width != 8 && overflow_width != 16 && overflow_width != 32 && overflow_width != 64)
    return "overflow width must be 8, 16, 32 or 64";
  if (int_lo > 0 || int_hi < 0) return "integer range must contain 0";
  if (int_hi - int_lo + 1 < 2) return "integer range must hold at least two values";
  if (check_overflow && (int_lo < overflow_min() || int_hi > overflow_max()))
    return "integer range exceeds the overflow width";
  return {};
}

bool parse_int_range(std::string_view text, std::int64_t& lo, std::int64_t& hi) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) return false;
  auto number = [](std::string_view t, std::int64_t& out) {
    if (!t.empty() && t[0] == '+') t.remove_prefix(1);
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    return ec == std::errc() && end == t.data() + t.size() && !t.empty();
  };
  std::int64_t a = 0;
  std::int64_t b = 0;
  if (!number(text.substr(0, dots), a) || !number(text.substr(dots + 2), b) || a > b) return false;
  lo = a;
  hi = b;
  return true;
}

namespace {

ExprPtr default_value(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Integer: return make_int(0);
    case Type::Kind::Boolean: return make_bool(false);
    case Type::Kind::StringSet: return make_set({});
    default: return make_void(t);
  }
}

ExprPtr symbol(const std::string& name, const Type& t) {
  return make_name(name, NameRef::Symbol, t);
}

// Attributes `a` for which the class invariant has a clause `a /= Void`.
std::set<std::string> guaranteed_attached(const ClassDecl& cls) {
  std::set<std::string> out;
  for (const auto& c : cls.invariant) {
    const Expr& e = *c.expr;
    if (e.kind != ExprKind::Binary || e.binary_op != BinaryOp::Ne) continue;
    const Expr* a = e.operands[0].get();
    const Expr* b = e.operands[1].get();
    if (a->kind == ExprKind::VoidLit) std::swap(a, b);
    if (b->kind == ExprKind::VoidLit && a->kind == ExprKind::Name && a->ref == NameRef::Attribute)
      out.insert(a->text);
  }
  return out;
}

bool has_create(const Clause& c) { return contains_kind(c.expr, ExprKind::Create); }

struct Site {
  int index = 0;
  ObligationKind kind = ObligationKind::VoidDereference;
  ExprPtr cond;
  std::string provenance;
};

class Generator {
 public:
  Generator(const CheckedProgram& program, const ClassDecl& cls, const Feature& feature,
            const VerifyOptions& opts)
      : program_(program), cls_(cls), feature_(feature), opts_(opts),
        attached_(feature.is_creator ? std::set<std::string>{} : guaranteed_attached(cls)) {
    collect(feature.body);
  }

  const std::vector<Site>& sites() const { return all_sites_; }

  // wp of the body with the given site asserted (or none when focus < 0).
  ExprPtr body_wp(const ExprPtr& post, int focus) {
    focus_ = focus;
    fresh_ = 0;
    return wp_list(feature_.body, post);
  }

  // Replaces the `Current` attributes by creation defaults.
  ExprPtr at_creation(ExprPtr f) const {
    for (const auto& a : cls_.attributes)
      if (!a.is_constant()) f = substitute(f, a.name, default_value(a.type));
    return f;
  }

 private:
  const CheckedProgram& program_;
  const ClassDecl& cls_;
  const Feature& feature_;
  const VerifyOptions& opts_;
  std::set<std::string> attached_;
  std::map<const Stmt*, std::vector<Site>> stmt_sites_;
  std::vector<Site> all_sites_;
  int focus_ = -1;
  int fresh_ = 0;

  // ---- site collection (source pre-order) ----

  void add_site(const Stmt& s, ObligationKind kind, ExprPtr cond, std::string prov) {
    Site site{static_cast<int>(all_sites_.size()), kind, std::move(cond), std::move(prov)};
    all_sites_.push_back(site);
    stmt_sites_[&s].push_back(std::move(site));
  }

  void void_site(const Stmt& s, const ExprPtr& target) {
    if (target->kind == ExprKind::Name && target->ref == NameRef::Attribute &&
        attached_.count(target->text))
      return;
    add_site(s, ObligationKind::VoidDereference, not_void(target), "void:" + pretty(target));
  }

  void expr_sites(const Stmt& s, const ExprPtr& e) {
    if (e->kind == ExprKind::Qualified) void_site(s, e->operands[0]);
    if (opts_.check_overflow &&
        ((e->kind == ExprKind::Binary && is_arithmetic(e->binary_op)) ||
         (e->kind == ExprKind::Unary && e->unary_op == UnaryOp::Neg))) {
      ExprPtr cond = conj(make_binary(BinaryOp::Le, make_int(opts_.overflow_min()), e),
                          make_binary(BinaryOp::Le, e, make_int(opts_.overflow_max())));
      add_site(s, ObligationKind::Overflow, cond, "overflow:" + pretty(e));
    }
    for (const auto& op : e->operands) expr_sites(s, op);
  }

  void collect(const std::vector<Stmt>& stmts) {
    for (const auto& s : stmts) collect(s);
  }

  void collect(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Assign: expr_sites(s, s.value); break;
      case StmtKind::QualifiedAssign:
        void_site(s, s.receiver);
        expr_sites(s, s.receiver);
        expr_sites(s, s.value);
        break;
      case StmtKind::Create: {
        for (const auto& a : s.args) expr_sites(s, a);
        const ClassDecl& target = program_.cls(s.target_class);
        const Feature& creator = *target.creator_feature();
        for (const auto& c : creator.require) {
          if (has_create(c)) continue;
          ExprPtr cond = instantiate_creation(c.expr, creator, s.args);
          add_site(s, ObligationKind::CalleePrecondition, cond,
                   target.name + "." + creator.name + "." + c.label);
        }
        break;
      }
      case StmtKind::Call: {
        void_site(s, s.receiver);
        expr_sites(s, s.receiver);
        for (const auto& a : s.args) expr_sites(s, a);
        const ClassDecl& target = program_.cls(s.target_class);
        const Feature& callee = *target.find_feature(s.feature);
        for (const auto& c : callee.require) {
          if (has_create(c)) continue;
          ExprPtr cond = instantiate_at(c.expr, s.receiver, callee, s.args);
          add_site(s, ObligationKind::CalleePrecondition, cond,
                   target.name + "." + callee.name + "." + c.label);
        }
        break;
      }
      case StmtKind::If:
        expr_sites(s, s.value);
        collect(s.then_branch);
        collect(s.else_branch);
        break;
      case StmtKind::Check:
        expr_sites(s, s.check.expr);
        add_site(s, ObligationKind::CheckAssertion, s.check.expr, s.check.label);
        break;
    }
  }

  // ---- instantiation of callee contracts ----

  // Rewrites a callee formula: attributes of `Current` become reads through
  // `receiver`, parameters become `args`. Old operands are evaluated now.
  ExprPtr instantiate_at(const ExprPtr& e, const ExprPtr& receiver, const Feature& callee,
                         const std::vector<ExprPtr>& args) const {
    return rewrite(e, [&](const ExprPtr& n) -> ExprPtr {
      if (n->kind == ExprKind::Old) return n->operands[0];
      if (n->kind != ExprKind::Name) return nullptr;
      if (n->ref == NameRef::Attribute)
        return make_qualified(receiver, n->text, n->type, n->constant);
      if (n->ref == NameRef::Param) return arg_for(callee, n->text, args);
      return nullptr;
    });
  }

  // Creator contract before the object exists: attributes hold defaults.
  ExprPtr instantiate_creation(const ExprPtr& e, const Feature& creator,
                               const std::vector<ExprPtr>& args) const {
    return rewrite(e, [&](const ExprPtr& n) -> ExprPtr {
      if (n->kind == ExprKind::Old) return n->operands[0];
      if (n->kind != ExprKind::Name) return nullptr;
      if (n->ref == NameRef::Attribute)
        return n->constant ? n->constant : default_value(n->type);
      if (n->ref == NameRef::Param) return arg_for(creator, n->text, args);
      return nullptr;
    });
  }

  static ExprPtr arg_for(const Feature& callee, const std::string& name,
                         const std::vector<ExprPtr>& args) {
    for (std::size_t i = 0; i < callee.params.size(); ++i)
      if (callee.params[i].name == name) return args.at(i);
    return nullptr;
  }

  // Post-state contract of a call: `old` operands and parameters become
  // placeholder symbols bound to pre-state expressions, so havoc leaves
  // them alone.
  ExprPtr post_state(const ExprPtr& e, const ExprPtr& receiver, const Feature& callee,
                     const std::vector<ExprPtr>& args, bool creation,
                     std::vector<std::pair<std::string, ExprPtr>>& bindings) {
    RewriteFn current = [&](const ExprPtr& n) -> ExprPtr {
      if (n->kind != ExprKind::Name) return nullptr;
      if (n->ref == NameRef::Attribute)
        return make_qualified(receiver, n->text, n->type, n->constant);
      if (n->ref == NameRef::Param) {
        ExprPtr arg = arg_for(callee, n->text, args);
        std::string name = "$" + std::to_string(fresh_++);
        bindings.emplace_back(name, arg);
        return symbol(name, n->type);
      }
      return nullptr;
    };
    ExprPtr with_old = rewrite(e, [&](const ExprPtr& n) -> ExprPtr {
      if (n->kind != ExprKind::Old) return nullptr;
      ExprPtr pre = creation ? instantiate_creation(n->operands[0], callee, args)
                             : instantiate_at(n->operands[0], receiver, callee, args);
      std::string name = "$" + std::to_string(fresh_++);
      bindings.emplace_back(name, pre);
      return symbol(name, n->type);
    }, false);
    return rewrite(with_old, current);
  }

  ExprPtr contract_hypothesis(const ClassDecl& target, const Feature& callee,
                              const ExprPtr& receiver, const std::vector<ExprPtr>& args,
                              bool creation,
                              std::vector<std::pair<std::string, ExprPtr>>& bindings) {
    std::vector<ExprPtr> parts;
    for (const auto& c : callee.ensure)
      if (!has_create(c))
        parts.push_back(post_state(c.expr, receiver, callee, args, creation, bindings));
    for (const auto& c : target.invariant)
      if (!has_create(c))
        parts.push_back(post_state(c.expr, receiver, callee, args, creation, bindings));
    return conj(parts);
  }

  static ExprPtr bind(ExprPtr f, const std::vector<std::pair<std::string, ExprPtr>>& bindings) {
    for (const auto& [name, value] : bindings) f = substitute(f, name, value);
    return f;
  }

  // ---- weakest preconditions ----

  ExprPtr wp_list(const std::vector<Stmt>& stmts, ExprPtr post) {
    for (auto it = stmts.rbegin(); it != stmts.rend(); ++it) post = wp_stmt(*it, post);
    return post;
  }

  ExprPtr wp_stmt(const Stmt& s, const ExprPtr& post) {
    ExprPtr core = wp_core(s, post);
    auto it = stmt_sites_.find(&s);
    if (it == stmt_sites_.end()) return core;
    std::vector<ExprPtr> assumed;
    ExprPtr asserted = make_bool(true);
    for (const auto& site : it->second) {
      if (site.index == focus_) asserted = site.cond;
      else assumed.push_back(site.cond);
    }
    return implies(conj(assumed), conj(asserted, core));
  }

  ExprPtr wp_core(const Stmt& s, const ExprPtr& post) {
    switch (s.kind) {
      case StmtKind::Assign: return substitute(post, s.target, s.value);
      case StmtKind::QualifiedAssign: {
        auto base = location_of(*s.receiver);
        if (!base) return post;
        return substitute(post, *base + "." + s.target, s.value);
      }
      case StmtKind::If:
        return conj(implies(s.value, wp_list(s.then_branch, post)),
                    implies(negate(s.value), wp_list(s.else_branch, post)));
      case StmtKind::Check: return post;
      case StmtKind::Call: return wp_call(s, post);
      case StmtKind::Create: return wp_create(s, post);
    }
    return post;
  }

  ExprPtr wp_call(const Stmt& s, const ExprPtr& post) {
    const ClassDecl& target = program_.cls(s.target_class);
    const Feature& callee = *target.find_feature(s.feature);
    std::vector<std::pair<std::string, ExprPtr>> bindings;
    ExprPtr hyp = contract_hypothesis(target, callee, s.receiver, s.args, false, bindings);
    ExprPtr f = implies(hyp, post);
    if (auto base = location_of(*s.receiver)) {
      const int k = fresh_++;
      for (const auto& attr : havoc_set(target, callee)) {
        const Attribute* a = target.find_attribute(attr);
        std::string loc = *base + "." + attr;
        f = substitute(f, loc, symbol(loc + "'" + std::to_string(k), a->type));
      }
    }
    return bind(f, bindings);
  }

  std::vector<std::string> havoc_set(const ClassDecl& target, const Feature& callee) const {
    std::vector<std::string> out;
    for (const auto& a : target.attributes) {
      if (a.is_constant()) continue;
      bool listed = !callee.modify ||
                    std::find(callee.modify->begin(), callee.modify->end(), a.name) !=
                        callee.modify->end();
      if (listed || !program_.is_model_query(target.name, a.name)) out.push_back(a.name);
    }
    return out;
  }

  ExprPtr wp_create(const Stmt& s, const ExprPtr& post) {
    const ClassDecl& target = program_.cls(s.target_class);
    const Feature& creator = *target.creator_feature();
    const Type t = Type::ref(target.name);
    ExprPtr obj = symbol(s.target + "'new" + std::to_string(fresh_++), t);
    std::vector<std::pair<std::string, ExprPtr>> bindings;
    ExprPtr hyp = conj(not_void(obj),
                       contract_hypothesis(target, creator, obj, s.args, true, bindings));
    ExprPtr f = implies(hyp, substitute(post, s.target, obj));
    return bind(f, bindings);
  }
};

// q = old q, extended through non-constant attributes of reference-typed
// queries.
ExprPtr unchanged(const CheckedProgram& program, const ExprPtr& q, int depth) {
  ExprPtr eq = equals(q, make_old(q));
  if (!q->type.is_ref() || depth <= 1) return eq;
  std::vector<ExprPtr> parts{eq};
  for (const auto& a : program.cls(q->type.class_name).attributes) {
    if (a.is_constant()) continue;
    parts.push_back(unchanged(program, make_qualified(q, a.name, a.type), depth - 1));
  }
  return conj(parts);
}

class ObligationSink {
 public:
  explicit ObligationSink(std::vector<Obligation>& out) : out_(out) {}

  void add(const std::string& cls, const std::string& feature, ObligationKind kind,
           ExprPtr formula, std::string provenance) {
    int& n = counters_[{cls, feature, kind}];
    Obligation o;
    o.id = cls + "." + feature + "." + std::string(to_string(kind)) + "." + std::to_string(n++);
    o.kind = kind;
    o.class_name = cls;
    o.feature_name = feature;
    o.formula = std::move(formula);
    o.provenance = std::move(provenance);
    out_.push_back(std::move(o));
  }

 private:
  std::vector<Obligation>& out_;
  std::map<std::tuple<std::string, std::string, ObligationKind>, int> counters_;
};

void feature_obligations(const CheckedProgram& program, const ClassDecl& cls,
                         const Feature& feature, const VerifyOptions& opts,
                         ObligationSink& sink) {
  Generator gen(program, cls, feature, opts);

  std::vector<ExprPtr> hyps;
  if (!feature.is_creator)
    for (const auto& c : cls.invariant)
      if (!has_create(c)) hyps.push_back(c.expr);
  for (const auto& c : feature.require)
    if (!has_create(c)) hyps.push_back(c.expr);
  const ExprPtr hyp = conj(hyps);

  auto close = [&](ExprPtr body) {
    ExprPtr f = strip_old(implies(hyp, body));
    return feature.is_creator ? gen.at_creation(f) : f;
  };

  const std::string& cn = cls.name;
  const std::string& fn = feature.name;
  for (const auto& c : feature.require)
    if (has_create(c)) sink.add(cn, fn, ObligationKind::Unsupported, c.expr, c.label);
  for (const auto& c : feature.ensure) {
    if (has_create(c)) {
      sink.add(cn, fn, ObligationKind::Unsupported, c.expr, c.label);
      continue;
    }
    sink.add(cn, fn, ObligationKind::Postcondition, close(gen.body_wp(c.expr, -1)), c.label);
  }
  for (const auto& c : cls.invariant) {
    if (has_create(c)) continue;
    sink.add(cn, fn, ObligationKind::InvariantMaintenance, close(gen.body_wp(c.expr, -1)),
             c.label);
  }
  if (feature.modify) {
    for (const auto& q : program.model_queries(cn)) {
      if (std::find(feature.modify->begin(), feature.modify->end(), q) != feature.modify->end())
        continue;
      const Attribute* a = cls.find_attribute(q);
      if (!a || a->is_constant()) continue;
      ExprPtr goal = unchanged(program, make_name(q, NameRef::Attribute, a->type), kFrameDepth);
      sink.add(cn, fn, ObligationKind::Frame, close(gen.body_wp(goal, -1)), "frame:" + q);
    }
  }
  for (const auto& site : gen.sites())
    sink.add(cn, fn, site.kind, close(gen.body_wp(make_bool(true), site.index)),
             site.provenance);
}

}  // namespace

ExprPtr wp(const CheckedProgram& program, const ClassDecl& cls, const Feature& feature,
           const std::vector<Stmt>& body, const ExprPtr& post, const VerifyOptions& opts) {
  Feature copy = feature;
  copy.body = body;
  Generator gen(program, cls, copy, opts);
  return gen.body_wp(post, -1);
}

std::vector<Obligation> generate_obligations(const CheckedProgram& program,
                                             const VerifyOptions& opts) {
  std::vector<Obligation> out;
  ObligationSink sink(out);
  for (const auto& cls : program.program().classes) {
    for (const auto& f : cls.features) feature_obligations(program, cls, f, opts, sink);
    for (const auto& c : cls.invariant)
      if (has_create(c))
        sink.add(cls.name, "invariant", ObligationKind::Unsupported, c.expr, c.label);
  }
  return out;
}

std::string formula_text(const Obligation& o) { return pretty(o.formula); }

std::string obligations_json(const std::vector<Obligation>& obligations) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& o : obligations) {
    arr.push_back({{"id", o.id},
                   {"kind", std::string(to_string(o.kind))},
                   {"class", o.class_name},
                   {"feature", o.feature_name},
                   {"provenance", o.provenance},
                   {"formula", formula_text(o)}});
  }
  return arr.dump(2);
}

}  // namespace miniproof

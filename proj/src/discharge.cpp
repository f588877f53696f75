#include "miniproof/discharge.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>

namespace miniproof {

std::vector<Value> Domains::values(const Type& type) const {
  std::vector<Value> out;
  switch (type.kind) {
    case Type::Kind::Integer:
      for (std::int64_t i = int_lo; i <= int_hi; ++i) out.emplace_back(i);
      break;
    case Type::Kind::Boolean:
      out.emplace_back(false);
      out.emplace_back(true);
      break;
    case Type::Kind::String:
      for (const auto& s : string_pool) out.emplace_back(s);
      out.emplace_back(VoidValue{});
      break;
    case Type::Kind::StringSet: {
      if (string_pool.size() > 16) throw EvalError("string pool too large to enumerate sets");
      const std::uint32_t n = 1u << string_pool.size();
      for (std::uint32_t mask = 0; mask < n; ++mask) {
        StringSet set;
        for (std::size_t i = 0; i < string_pool.size(); ++i)
          if (mask & (1u << i)) set.insert(string_pool[i]);
        out.emplace_back(std::move(set));
      }
      break;
    }
    case Type::Kind::Ref:
      for (int i = 0; i < max_refs; ++i) out.emplace_back(RefValue{i});
      out.emplace_back(VoidValue{});
      break;
    default: out.emplace_back(VoidValue{}); break;
  }
  return out;
}

std::string Domains::describe() const {
  return "int " + std::to_string(int_lo) + ".." + std::to_string(int_hi) + ", " +
         std::to_string(string_pool.size()) + " strings + Void, " + std::to_string(max_refs) +
         " object(s) per class";
}

Domains domains_for(const CheckedProgram& program, const VerifyOptions& opts) {
  Domains d;
  d.int_lo = opts.int_lo;
  d.int_hi = opts.int_hi;
  d.string_pool = program.program().string_pool;
  return d;
}

std::string_view to_string(Verdict::Kind kind) {
  switch (kind) {
    case Verdict::Kind::Discharged: return "Discharged";
    case Verdict::Kind::Failed: return "Failed";
    case Verdict::Kind::Error: return "Error";
  }
  return "?";
}

namespace {

Value literal_value(const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit: return e.int_value;
    case ExprKind::BoolLit: return e.bool_value;
    case ExprKind::StrLit: return e.text;
    case ExprKind::SetLit: return StringSet(e.elements.begin(), e.elements.end());
    default: return VoidValue{};
  }
}

// Formula compiled against a fixed symbol table.
struct Node {
  ExprKind kind = ExprKind::IntLit;
  UnaryOp unary_op = UnaryOp::Neg;
  BinaryOp binary_op = BinaryOp::Add;
  int symbol = -1;
  Value literal;
  std::vector<Node> kids;
};

Node compile(const Expr& e, const std::map<std::string, int>& table) {
  Node n;
  n.kind = e.kind;
  switch (e.kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
    case ExprKind::StrLit:
    case ExprKind::SetLit:
    case ExprKind::VoidLit: n.literal = literal_value(e); return n;
    case ExprKind::Name:
    case ExprKind::Qualified: {
      if (e.constant) {
        n.kind = e.constant->kind;
        n.literal = literal_value(*e.constant);
        return n;
      }
      auto loc = location_of(e);
      auto it = loc ? table.find(*loc) : table.end();
      if (it == table.end()) throw EvalError("unbound symbol in formula");
      n.symbol = it->second;
      return n;
    }
    case ExprKind::Old: return compile(*e.operands[0], table);
    case ExprKind::Create: return n;
    default: break;
  }
  n.unary_op = e.unary_op;
  n.binary_op = e.binary_op;
  for (const auto& op : e.operands) n.kids.push_back(compile(*op, table));
  return n;
}

using Slots = std::vector<const Value*>;
using Maybe = std::optional<Value>;

const std::int64_t& as_int(const Value& v) {
  if (auto p = std::get_if<std::int64_t>(&v)) return *p;
  throw EvalError("integer operand expected");
}

bool as_bool(const Value& v) {
  if (auto p = std::get_if<bool>(&v)) return *p;
  throw EvalError("boolean operand expected");
}

// Kleene evaluation: nullopt when unassigned symbols leave the value open.
Maybe eval(const Node& n, const Slots& slots) {
  switch (n.kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
    case ExprKind::StrLit:
    case ExprKind::SetLit:
    case ExprKind::VoidLit: return n.literal;
    case ExprKind::Name:
    case ExprKind::Qualified: {
      const Value* v = slots[n.symbol];
      if (!v) return std::nullopt;
      return *v;
    }
    case ExprKind::Create: throw EvalError("creation expression in contract");
    case ExprKind::Unary: {
      Maybe a = eval(n.kids[0], slots);
      if (!a) return std::nullopt;
      if (n.unary_op == UnaryOp::Not) return !as_bool(*a);
      return checked_sub(0, as_int(*a));
    }
    case ExprKind::Has: {
      Maybe s = eval(n.kids[0], slots);
      Maybe x = eval(n.kids[1], slots);
      if (!s || !x) return std::nullopt;
      const auto* set = std::get_if<StringSet>(&*s);
      if (!set) throw EvalError("set operand expected");
      if (is_void(*x)) return false;
      const auto* str = std::get_if<std::string>(&*x);
      if (!str) throw EvalError("string element expected");
      return set->count(*str) > 0;
    }
    case ExprKind::Binary: break;
    default: throw EvalError("unexpected node in formula");
  }
  const Node& l = n.kids[0];
  const Node& r = n.kids[1];
  switch (n.binary_op) {
    case BinaryOp::And: {
      Maybe a = eval(l, slots);
      if (a && !as_bool(*a)) return false;
      Maybe b = eval(r, slots);
      if (b && !as_bool(*b)) return false;
      if (a && b) return true;
      return std::nullopt;
    }
    case BinaryOp::Or: {
      Maybe a = eval(l, slots);
      if (a && as_bool(*a)) return true;
      Maybe b = eval(r, slots);
      if (b && as_bool(*b)) return true;
      if (a && b) return false;
      return std::nullopt;
    }
    case BinaryOp::Implies: {
      Maybe a = eval(l, slots);
      if (a && !as_bool(*a)) return true;
      Maybe b = eval(r, slots);
      if (b && as_bool(*b)) return true;
      if (a && b) return false;
      return std::nullopt;
    }
    default: break;
  }
  Maybe a = eval(l, slots);
  Maybe b = eval(r, slots);
  if (!a || !b) return std::nullopt;
  switch (n.binary_op) {
    case BinaryOp::Eq: return *a == *b;
    case BinaryOp::Ne: return *a != *b;
    case BinaryOp::Add: return checked_add(as_int(*a), as_int(*b));
    case BinaryOp::Sub: return checked_sub(as_int(*a), as_int(*b));
    case BinaryOp::Mul: return checked_mul(as_int(*a), as_int(*b));
    case BinaryOp::Lt: return as_int(*a) < as_int(*b);
    case BinaryOp::Le: return as_int(*a) <= as_int(*b);
    case BinaryOp::Gt: return as_int(*a) > as_int(*b);
    case BinaryOp::Ge: return as_int(*a) >= as_int(*b);
    default: throw EvalError("unexpected operator in formula");
  }
}

std::map<std::string, int> symbol_table(const std::vector<FreeSymbol>& symbols) {
  std::map<std::string, int> table;
  for (std::size_t i = 0; i < symbols.size(); ++i) table[symbols[i].name] = static_cast<int>(i);
  return table;
}

}  // namespace

Value evaluate(const ExprPtr& e, const Environment& env) {
  auto symbols = free_symbols(e);
  Slots slots;
  for (const auto& s : symbols) {
    auto it = env.find(s.name);
    if (it == env.end()) throw EvalError("no value for symbol " + s.name);
    slots.push_back(&it->second);
  }
  Maybe v = eval(compile(*e, symbol_table(symbols)), slots);
  if (!v) throw EvalError("formula not decided");
  return *v;
}

bool evaluate_formula(const ExprPtr& formula, const Environment& env) {
  return as_bool(evaluate(formula, env));
}

EnvironmentEnumerator::EnvironmentEnumerator(const ExprPtr& formula, const Domains& domains)
    : symbols_(free_symbols(formula)) {
  for (const auto& s : symbols_) values_.push_back(domains.values(s.type));
  cursor_.assign(symbols_.size(), 0);
}

bool EnvironmentEnumerator::next(Environment& out) {
  if (done_) return false;
  if (started_) {
    // Odometer with the last symbol varying fastest.
    std::size_t i = cursor_.size();
    while (i > 0) {
      --i;
      if (++cursor_[i] < values_[i].size()) break;
      cursor_[i] = 0;
      if (i == 0) {
        done_ = true;
        return false;
      }
    }
    if (cursor_.empty()) {
      done_ = true;
      return false;
    }
  }
  started_ = true;
  out.clear();
  for (std::size_t i = 0; i < symbols_.size(); ++i) out[symbols_[i].name] = values_[i][cursor_[i]];
  return true;
}

std::uint64_t EnvironmentEnumerator::count() const {
  std::uint64_t n = 1;
  for (const auto& v : values_) {
    if (n > UINT64_MAX / v.size()) return UINT64_MAX;
    n *= v.size();
  }
  return n;
}

std::vector<Environment> enumerate_environments(const Obligation& o, const Domains& domains) {
  EnvironmentEnumerator en(o.formula, domains);
  std::vector<Environment> out;
  Environment env;
  while (en.next(env)) out.push_back(env);
  return out;
}

namespace {

// Search-side evaluator. Values are encoded as (tag, payload) pairs so the
// inner loop never allocates: strings and sets refer to an interned pool.
enum class Tag : std::uint8_t { Unknown, Int, Bool, Str, Set, Void, Ref };

struct Code {
  Tag tag = Tag::Unknown;
  std::int64_t x = 0;
  bool operator==(const Code&) const = default;
};

struct CNode {
  ExprKind kind = ExprKind::IntLit;
  UnaryOp unary_op = UnaryOp::Neg;
  BinaryOp binary_op = BinaryOp::Add;
  int symbol = -1;
  Code literal;
  std::vector<CNode> kids;
};

class Encoder {
 public:
  explicit Encoder(const std::vector<std::string>& pool) {
    for (const auto& s : pool) intern(s);
  }

  int intern(const std::string& s) {
    auto [it, inserted] = index_.emplace(s, static_cast<int>(strings_.size()));
    if (inserted) strings_.push_back(s);
    return it->second;
  }

  Code encode(const Value& v) {
    struct Visitor {
      Encoder& enc;
      Code operator()(VoidValue) const { return {Tag::Void, 0}; }
      Code operator()(std::int64_t i) const { return {Tag::Int, i}; }
      Code operator()(bool b) const { return {Tag::Bool, b ? 1 : 0}; }
      Code operator()(const std::string& s) const { return {Tag::Str, enc.intern(s)}; }
      Code operator()(const StringSet& set) const {
        std::int64_t mask = 0;
        for (const auto& s : set) {
          int i = enc.intern(s);
          if (i >= 63) throw EvalError("too many distinct strings for set encoding");
          mask |= std::int64_t{1} << i;
        }
        return {Tag::Set, mask};
      }
      Code operator()(RefValue r) const { return {Tag::Ref, r.id}; }
    };
    return std::visit(Visitor{*this}, v);
  }

 private:
  std::map<std::string, int> index_;
  std::vector<std::string> strings_;
};

CNode compile_coded(const Expr& e, const std::map<std::string, int>& table, Encoder& enc) {
  CNode n;
  n.kind = e.kind;
  switch (e.kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
    case ExprKind::StrLit:
    case ExprKind::SetLit:
    case ExprKind::VoidLit: n.literal = enc.encode(literal_value(e)); return n;
    case ExprKind::Name:
    case ExprKind::Qualified: {
      if (e.constant) {
        n.kind = e.constant->kind;
        n.literal = enc.encode(literal_value(*e.constant));
        return n;
      }
      auto loc = location_of(e);
      auto it = loc ? table.find(*loc) : table.end();
      if (it == table.end()) throw EvalError("unbound symbol in formula");
      n.symbol = it->second;
      return n;
    }
    case ExprKind::Old: return compile_coded(*e.operands[0], table, enc);
    case ExprKind::Create: return n;
    default: break;
  }
  n.unary_op = e.unary_op;
  n.binary_op = e.binary_op;
  for (const auto& op : e.operands) n.kids.push_back(compile_coded(*op, table, enc));
  return n;
}

// Result of a partial evaluation: the value, or Unknown together with an
// unassigned symbol whose value is needed first.
struct Probe {
  Code value;
  int need = -1;
};

std::int64_t int_of(const Code& c) {
  if (c.tag != Tag::Int) throw EvalError("integer operand expected");
  return c.x;
}

bool bool_of(const Code& c) {
  if (c.tag != Tag::Bool) throw EvalError("boolean operand expected");
  return c.x != 0;
}

Probe known(Code c) { return {c, -1}; }
Probe known_bool(bool b) { return {{Tag::Bool, b ? 1 : 0}, -1}; }

Probe probe(const CNode& n, const std::vector<Code>& slots) {
  switch (n.kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
    case ExprKind::StrLit:
    case ExprKind::SetLit:
    case ExprKind::VoidLit: return known(n.literal);
    case ExprKind::Name:
    case ExprKind::Qualified: {
      const Code& c = slots[n.symbol];
      if (c.tag == Tag::Unknown) return {c, n.symbol};
      return known(c);
    }
    case ExprKind::Create: throw EvalError("creation expression in contract");
    case ExprKind::Unary: {
      Probe a = probe(n.kids[0], slots);
      if (a.value.tag == Tag::Unknown) return a;
      if (n.unary_op == UnaryOp::Not) return known_bool(!bool_of(a.value));
      return known({Tag::Int, checked_sub(0, int_of(a.value))});
    }
    case ExprKind::Has: {
      Probe s = probe(n.kids[0], slots);
      if (s.value.tag == Tag::Unknown) return s;
      Probe x = probe(n.kids[1], slots);
      if (x.value.tag == Tag::Unknown) return x;
      if (s.value.tag != Tag::Set) throw EvalError("set operand expected");
      if (x.value.tag == Tag::Void) return known_bool(false);
      if (x.value.tag != Tag::Str) throw EvalError("string element expected");
      return known_bool(x.value.x < 63 && ((s.value.x >> x.value.x) & 1));
    }
    case ExprKind::Binary: break;
    default: throw EvalError("unexpected node in formula");
  }
  const BinaryOp op = n.binary_op;
  if (op == BinaryOp::And || op == BinaryOp::Or || op == BinaryOp::Implies) {
    // Value of the left operand that decides the result on its own, and
    // the result it decides.
    const bool left_decides = op != BinaryOp::And;
    const bool left_result = op != BinaryOp::And;
    const bool right_decides = op != BinaryOp::And;
    Probe a = probe(n.kids[0], slots);
    bool a_known = a.value.tag != Tag::Unknown;
    bool av = a_known && bool_of(a.value);
    if (op == BinaryOp::Implies) {
      if (a_known && !av) return known_bool(true);
    } else if (a_known && av == left_decides) {
      return known_bool(left_result);
    }
    Probe b = probe(n.kids[1], slots);
    bool b_known = b.value.tag != Tag::Unknown;
    bool bv = b_known && bool_of(b.value);
    if (b_known && bv == right_decides) return known_bool(right_decides);
    if (a_known && b_known) {
      if (op == BinaryOp::Implies) return known_bool(!av || bv);
      return known_bool(op == BinaryOp::And ? (av && bv) : (av || bv));
    }
    return a_known ? b : a;
  }
  Probe a = probe(n.kids[0], slots);
  if (a.value.tag == Tag::Unknown) return a;
  Probe b = probe(n.kids[1], slots);
  if (b.value.tag == Tag::Unknown) return b;
  const Code& x = a.value;
  const Code& y = b.value;
  switch (op) {
    case BinaryOp::Eq: return known_bool(x == y);
    case BinaryOp::Ne: return known_bool(!(x == y));
    case BinaryOp::Add: return known({Tag::Int, checked_add(int_of(x), int_of(y))});
    case BinaryOp::Sub: return known({Tag::Int, checked_sub(int_of(x), int_of(y))});
    case BinaryOp::Mul: return known({Tag::Int, checked_mul(int_of(x), int_of(y))});
    case BinaryOp::Lt: return known_bool(int_of(x) < int_of(y));
    case BinaryOp::Le: return known_bool(int_of(x) <= int_of(y));
    case BinaryOp::Gt: return known_bool(int_of(x) > int_of(y));
    case BinaryOp::Ge: return known_bool(int_of(x) >= int_of(y));
    default: throw EvalError("unexpected operator in formula");
  }
}

class Search {
 public:
  Search(const ExprPtr& formula, const Domains& domains)
      : symbols_(free_symbols(formula)), enc_(domains.string_pool) {
    for (const auto& s : symbols_) {
      values_.push_back(domains.values(s.type));
      std::vector<Code> codes;
      for (const auto& v : values_.back()) codes.push_back(enc_.encode(v));
      codes_.push_back(std::move(codes));
    }
    root_ = compile_coded(*formula, symbol_table(symbols_), enc_);
    slots_.assign(symbols_.size(), Code{});
  }

  // Lexicographically first falsifying assignment of this formula's symbols.
  // A falsifier is first located with free symbol choice; the ordered
  // assignment is then fixed one symbol at a time.
  std::optional<Environment> run() {
    if (!falsifiable()) return std::nullopt;
    Environment env;
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      bool fixed = false;
      for (std::size_t k = 0; k < codes_[i].size() && !fixed; ++k) {
        slots_[i] = codes_[i][k];
        if (falsifiable()) {
          env[symbols_[i].name] = values_[i][k];
          fixed = true;
        }
      }
      if (!fixed) throw EvalError("inconsistent search state");
    }
    return env;
  }

 private:
  std::vector<FreeSymbol> symbols_;
  Encoder enc_;
  CNode root_;
  std::vector<std::vector<Value>> values_;
  std::vector<std::vector<Code>> codes_;
  std::vector<Code> slots_;

  bool falsifiable() {
    Probe p = probe(root_, slots_);
    if (p.value.tag != Tag::Unknown) return !bool_of(p.value);
    const int s = p.need;
    for (const Code& c : codes_[s]) {
      slots_[s] = c;
      if (falsifiable()) {
        slots_[s] = Code{};
        return true;
      }
    }
    slots_[s] = Code{};
    return false;
  }
};

}  // namespace

Verdict discharge(const Obligation& o, const Domains& domains) {
  if (o.kind == ObligationKind::Unsupported)
    return Verdict::error("creation expression in contract");
  try {
    const ExprPtr reduced = simplify(o.formula);
    auto falsifier = Search(reduced, domains).run();
    if (!falsifier) return Verdict::discharged();
    // Symbols the simplifier dropped do not affect the outcome; their first
    // values keep the environment lexicographically first.
    Environment env;
    for (const auto& s : free_symbols(o.formula)) {
      auto it = falsifier->find(s.name);
      env[s.name] = it != falsifier->end() ? it->second : domains.values(s.type).front();
    }
    return Verdict::failed(std::move(env));
  } catch (const EvalError& e) {
    return Verdict::error(e.what());
  }
}

std::vector<std::pair<Obligation, Verdict>> discharge_all(const std::vector<Obligation>& obligations,
                                                          const Domains& domains,
                                                          unsigned workers) {
  std::vector<std::pair<Obligation, Verdict>> out;
  out.reserve(obligations.size());
  for (const auto& o : obligations) out.emplace_back(o, Verdict{});
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, std::max<std::size_t>(1, obligations.size()));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < out.size();)
      out[i].second = discharge(out[i].first, domains);
  };
  if (workers <= 1) {
    work();
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace miniproof

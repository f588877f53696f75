#include <algorithm>
#include <sstream>

#include "miniproof/parser.hpp"

namespace miniproof {

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Binary:
      switch (e.binary_op) {
        case BinaryOp::Implies: return 1;
        case BinaryOp::Or: return 2;
        case BinaryOp::And: return 3;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 5;
        case BinaryOp::Mul: return 6;
        default: return 4;
      }
    case ExprKind::Unary:
    case ExprKind::Old:
    case ExprKind::Create: return 7;
    case ExprKind::IntLit: return e.int_value < 0 ? 7 : 9;
    case ExprKind::Qualified:
    case ExprKind::Has: return 8;
    default: return 9;
  }
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

void print(std::ostream& os, const Expr& e, int required);

void print_child(std::ostream& os, const ExprPtr& e, int required) {
  if (precedence(*e) < required) {
    os << '(';
    print(os, *e, 0);
    os << ')';
  } else {
    print(os, *e, required);
  }
}

void print(std::ostream& os, const Expr& e, int) {
  switch (e.kind) {
    case ExprKind::IntLit: os << e.int_value; return;
    case ExprKind::BoolLit: os << (e.bool_value ? "True" : "False"); return;
    case ExprKind::StrLit: os << quote(e.text); return;
    case ExprKind::SetLit: {
      os << '{';
      for (std::size_t i = 0; i < e.elements.size(); ++i) os << (i ? ", " : "") << quote(e.elements[i]);
      os << '}';
      return;
    }
    case ExprKind::VoidLit: os << "Void"; return;
    case ExprKind::Name: os << e.text; return;
    case ExprKind::Qualified:
      print_child(os, e.operands[0], 8);
      os << '.' << e.text;
      return;
    case ExprKind::Has:
      print_child(os, e.operands[0], 8);
      os << ".has (";
      print(os, *e.operands[1], 0);
      os << ')';
      return;
    case ExprKind::Old:
      os << "old ";
      print_child(os, e.operands[0], 7);
      return;
    case ExprKind::Unary:
      os << (e.unary_op == UnaryOp::Neg ? "-" : "not ");
      print_child(os, e.operands[0], 7);
      return;
    case ExprKind::Create: os << "create " << e.text; return;
    case ExprKind::Binary: {
      const int p = precedence(e);
      int left = p;
      int right = p + 1;
      if (e.binary_op == BinaryOp::Implies) {
        left = p + 1;
        right = p;
      } else if (p == 4) {
        left = p + 1;
      }
      print_child(os, e.operands[0], left);
      os << ' ' << to_string(e.binary_op) << ' ';
      print_child(os, e.operands[1], right);
      return;
    }
  }
}

void indent(std::ostream& os, int depth) {
  for (int i = 0; i < depth; ++i) os << "  ";
}

void print_args(std::ostream& os, const std::vector<ExprPtr>& args) {
  if (args.empty()) return;
  os << " (";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) os << ", ";
    print(os, *args[i], 0);
  }
  os << ')';
}

void print_clause(std::ostream& os, const Clause& c, int depth) {
  indent(os, depth);
  if (c.labeled) os << c.label << ": ";
  print(os, *c.expr, 0);
  os << '\n';
}

void print_statements(std::ostream& os, const std::vector<Stmt>& body, int depth) {
  for (const auto& s : body) {
    indent(os, depth);
    switch (s.kind) {
      case StmtKind::Assign:
        os << s.target << " := ";
        print(os, *s.value, 0);
        break;
      case StmtKind::QualifiedAssign:
        print(os, *s.receiver, 0);
        os << '.' << s.target << " := ";
        print(os, *s.value, 0);
        break;
      case StmtKind::Create:
        os << "create " << s.target;
        if (!s.feature.empty()) {
          os << '.' << s.feature;
          print_args(os, s.args);
        }
        break;
      case StmtKind::Call:
        print(os, *s.receiver, 0);
        os << '.' << s.feature;
        print_args(os, s.args);
        break;
      case StmtKind::If:
        os << "if ";
        print(os, *s.value, 0);
        os << " then\n";
        print_statements(os, s.then_branch, depth + 1);
        if (s.has_else) {
          indent(os, depth);
          os << "else\n";
          print_statements(os, s.else_branch, depth + 1);
        }
        indent(os, depth);
        os << "end";
        break;
      case StmtKind::Check:
        os << "check ";
        if (s.check.labeled) os << s.check.label << ": ";
        print(os, *s.check.expr, 0);
        os << " end";
        break;
    }
    os << '\n';
  }
}

void print_feature(std::ostream& os, const Feature& f) {
  indent(os, 1);
  os << f.name;
  if (!f.params.empty()) {
    os << " (";
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (i) os << "; ";
      os << f.params[i].name << ": " << to_string(f.params[i].type);
    }
    os << ')';
  }
  os << '\n';
  if (f.creator_note) {
    indent(os, 2);
    os << "note status: creator\n";
  }
  if (!f.require.empty()) {
    indent(os, 2);
    os << "require\n";
    for (const auto& c : f.require) print_clause(os, c, 3);
  }
  if (f.modify) {
    indent(os, 2);
    os << "modify";
    for (std::size_t i = 0; i < f.modify->size(); ++i) os << (i ? ", " : " ") << (*f.modify)[i];
    os << '\n';
  }
  indent(os, 2);
  os << "do\n";
  print_statements(os, f.body, 3);
  if (!f.ensure.empty()) {
    indent(os, 2);
    os << "ensure\n";
    for (const auto& c : f.ensure) print_clause(os, c, 3);
  }
  indent(os, 2);
  os << "end\n";
}

}  // namespace

std::string pretty(const ExprPtr& expr) {
  std::ostringstream os;
  print(os, *expr, 0);
  return os.str();
}

std::string pretty(const Program& program) {
  std::ostringstream os;
  bool first = true;
  for (const auto& c : program.classes) {
    if (!first) os << '\n';
    first = false;
    if (c.model_note) {
      os << "note model:";
      for (std::size_t i = 0; i < c.model_note->size(); ++i)
        os << (i ? ", " : " ") << (*c.model_note)[i];
      os << '\n';
    }
    os << "class " << c.name << '\n';
    if (!c.create_clause.empty()) {
      os << "create";
      for (std::size_t i = 0; i < c.create_clause.size(); ++i)
        os << (i ? ", " : " ") << c.create_clause[i];
      os << '\n';
    }
    if (!c.attributes.empty() || !c.features.empty()) {
      os << "feature\n";
      for (const auto& a : c.attributes) {
        indent(os, 1);
        os << a.name << ": " << to_string(a.type);
        if (a.constant) os << " = " << pretty(a.constant);
        os << '\n';
      }
      for (const auto& f : c.features) print_feature(os, f);
    }
    if (!c.invariant.empty()) {
      os << "invariant\n";
      for (const auto& cl : c.invariant) print_clause(os, cl, 1);
    }
    os << "end\n";
  }
  return os.str();
}

namespace {

void dump_expr(std::ostream& os, const ExprPtr& e) {
  if (!e) {
    os << "nil";
    return;
  }
  os << '(' << static_cast<int>(e->kind);
  switch (e->kind) {
    case ExprKind::IntLit: os << ' ' << e->int_value; break;
    case ExprKind::BoolLit: os << ' ' << e->bool_value; break;
    case ExprKind::Unary: os << " u" << static_cast<int>(e->unary_op); break;
    case ExprKind::Binary: os << " b" << static_cast<int>(e->binary_op); break;
    default: break;
  }
  if (!e->text.empty()) os << " '" << e->text << "'";
  for (const auto& s : e->elements) os << " \"" << s << '"';
  for (const auto& op : e->operands) {
    os << ' ';
    dump_expr(os, op);
  }
  os << ')';
}

void dump_clauses(std::ostream& os, const char* tag, const std::vector<Clause>& cs) {
  os << tag << '[';
  for (const auto& c : cs) {
    os << c.label << (c.labeled ? "!" : "?") << '=';
    dump_expr(os, c.expr);
    os << ';';
  }
  os << ']';
}

void dump_body(std::ostream& os, const std::vector<Stmt>& body) {
  os << '{';
  for (const auto& s : body) {
    os << "s" << static_cast<int>(s.kind) << ' ' << s.target << ' ' << s.feature << ' ';
    dump_expr(os, s.receiver);
    for (const auto& a : s.args) dump_expr(os, a);
    dump_expr(os, s.value);
    if (s.kind == StmtKind::Check) {
      os << s.check.label << (s.check.labeled ? "!" : "?");
      dump_expr(os, s.check.expr);
    }
    dump_body(os, s.then_branch);
    os << (s.has_else ? "else" : "");
    dump_body(os, s.else_branch);
    os << ';';
  }
  os << '}';
}

}  // namespace

std::string dump(const Program& program) {
  std::ostringstream os;
  for (const auto& c : program.classes) {
    os << "class " << c.name << " model=";
    if (c.model_note)
      for (const auto& m : *c.model_note) os << m << ',';
    else
      os << "<none>";
    os << " create=";
    for (const auto& n : c.create_clause) os << n << ',';
    os << '\n';
    for (const auto& a : c.attributes) {
      os << " attr " << a.name << ':' << to_string(a.type) << ' ';
      dump_expr(os, a.constant);
      os << '\n';
    }
    for (const auto& f : c.features) {
      os << " feature " << f.name << (f.creator_note ? " creator-note" : "") << " params=";
      for (const auto& p : f.params) os << p.name << ':' << to_string(p.type) << ',';
      os << ' ';
      dump_clauses(os, "require", f.require);
      if (f.modify) {
        os << " modify=";
        for (const auto& m : *f.modify) os << m << ',';
      }
      os << ' ';
      dump_body(os, f.body);
      dump_clauses(os, " ensure", f.ensure);
      os << '\n';
    }
    dump_clauses(os, " invariant", c.invariant);
    os << '\n';
  }
  std::vector<std::string> pool = program.string_pool;
  std::sort(pool.begin(), pool.end());
  os << "pool:";
  for (const auto& s : pool) os << " \"" << s << '"';
  os << '\n';
  return os.str();
}

}  // namespace miniproof

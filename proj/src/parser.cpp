#include "miniproof/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <unordered_set>

namespace miniproof {

namespace {

std::string join_expected(const std::vector<std::string>& expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) out += i + 1 == expected.size() ? " or " : ", ";
    out += expected[i];
  }
  return out;
}

const std::unordered_set<std::string_view> kKeywords = {
    "class", "create", "feature", "note",  "require", "do",    "ensure",  "invariant",
    "end",   "old",    "modify",  "if",    "then",    "else",  "check",   "and",
    "or",    "not",    "implies", "True",  "False",   "true",  "false",   "Void",
};

}  // namespace

ParseError::ParseError(SourcePos pos, std::vector<std::string> expected, std::string found)
    : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.column) +
                         ": expected " + join_expected(expected) + ", found " + found),
      pos_(pos),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n' || c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const SourcePos pos{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      std::string word(src.substr(i, j - i));
      const auto kind = kKeywords.contains(word) ? TokenKind::Keyword : TokenKind::Ident;
      out.push_back({kind, std::move(word), pos});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({TokenKind::Integer, std::string(src.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    if (c == '"') {
      std::string text;
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') {
        if (src[j] == '\\' && j + 1 < src.size()) ++j;
        text += src[j++];
      }
      if (j >= src.size() || src[j] != '"')
        throw ParseError(pos, {"closing '\"'"}, "end of line");
      out.push_back({TokenKind::String, std::move(text), pos});
      advance(j + 1 - i);
      continue;
    }
    static constexpr std::array<std::string_view, 4> kTwoChar = {":=", "/=", "<=", ">="};
    bool matched = false;
    for (auto sym : kTwoChar) {
      if (src.substr(i, 2) == sym) {
        out.push_back({TokenKind::Symbol, std::string(sym), pos});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("(),:.=<>+-*{};").find(c) != std::string_view::npos) {
      out.push_back({TokenKind::Symbol, std::string(1, c), pos});
      advance(1);
      continue;
    }
    throw ParseError(pos, {"token"}, std::string("character '") + c + "'");
  }
  out.push_back({TokenKind::End, "", {line, col}});
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view source) : tokens_(tokenize(source)) {}

  Program parse_program() {
    Program program;
    while (!at_end()) program.classes.push_back(parse_class());
    for (const auto& t : tokens_)
      if (t.kind == TokenKind::String &&
          std::find(pool_.begin(), pool_.end(), t.text) == pool_.end())
        pool_.push_back(t.text);
    program.string_pool = pool_;
    return program;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<std::string> pool_;

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  bool at_end() const { return peek().kind == TokenKind::End; }
  bool at_keyword(std::string_view kw) const {
    return peek().kind == TokenKind::Keyword && peek().text == kw;
  }
  bool at_symbol(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).kind == TokenKind::Symbol && peek(ahead).text == s;
  }
  bool at_ident(std::size_t ahead = 0) const { return peek(ahead).kind == TokenKind::Ident; }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::End: return "end of input";
      case TokenKind::String: return "string \"" + t.text + "\"";
      default: return "'" + t.text + "'";
    }
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    throw ParseError(peek().pos, std::move(expected), describe(peek()));
  }

  Token take() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail({"'" + std::string(kw) + "'"});
    take();
  }
  void expect_symbol(std::string_view s) {
    if (!at_symbol(s)) fail({"'" + std::string(s) + "'"});
    take();
  }
  std::string expect_ident(std::string_view what = "identifier") {
    if (!at_ident()) fail({std::string(what)});
    return take().text;
  }
  bool accept_keyword(std::string_view kw) {
    if (!at_keyword(kw)) return false;
    take();
    return true;
  }
  bool accept_symbol(std::string_view s) {
    if (!at_symbol(s)) return false;
    take();
    return true;
  }

  std::vector<std::string> parse_ident_list() {
    std::vector<std::string> out;
    if (!at_ident()) return out;
    out.push_back(take().text);
    while (accept_symbol(",")) out.push_back(expect_ident());
    return out;
  }

  ClassDecl parse_class() {
    ClassDecl cls;
    if (accept_keyword("note")) {
      const std::string key = expect_ident("'model'");
      if (key != "model") throw ParseError(tokens_[pos_ - 1].pos, {"'model'"}, "'" + key + "'");
      expect_symbol(":");
      cls.model_note = parse_ident_list();
    }
    cls.pos = peek().pos;
    if (!at_keyword("class")) fail({"'class'", "'note'"});
    take();
    cls.name = expect_ident("class name");
    if (accept_keyword("create")) cls.create_clause = parse_ident_list();
    while (accept_keyword("feature")) {
      while (at_ident()) parse_member(cls);
    }
    if (accept_keyword("invariant")) {
      cls.invariant = parse_clauses("invariant", {"end"});
    }
    if (!at_keyword("end")) {
      if (at_end())
        fail({"'end'"});
      fail({"'feature'", "'invariant'", "'end'", "feature name"});
    }
    take();
    return cls;
  }

  Type parse_type() {
    const SourcePos pos = peek().pos;
    const std::string name = expect_ident("type name");
    (void)pos;
    if (name == "INTEGER") return Type::integer();
    if (name == "BOOLEAN") return Type::boolean();
    if (name == "STRING") return Type::string();
    if (name == "SET_OF_STRING") return Type::string_set();
    return Type::ref(name);
  }

  void parse_member(ClassDecl& cls) {
    const SourcePos pos = peek().pos;
    const std::string name = take().text;
    if (accept_symbol(":")) {
      Attribute attr;
      attr.name = name;
      attr.pos = pos;
      attr.type = parse_type();
      if (accept_symbol("=")) attr.constant = parse_constant();
      cls.attributes.push_back(std::move(attr));
      return;
    }
    Feature f;
    f.name = name;
    f.pos = pos;
    if (accept_symbol("(")) {
      if (!at_symbol(")")) {
        do {
          std::vector<std::pair<std::string, SourcePos>> names;
          do {
            const SourcePos ppos = peek().pos;
            names.emplace_back(expect_ident("parameter name"), ppos);
          } while (accept_symbol(","));
          expect_symbol(":");
          const Type t = parse_type();
          for (auto& [n, p] : names) f.params.push_back({n, t, p});
        } while (accept_symbol(";"));
      }
      expect_symbol(")");
    }
    if (accept_keyword("note")) {
      const std::string key = expect_ident("'status'");
      if (key != "status") throw ParseError(tokens_[pos_ - 1].pos, {"'status'"}, "'" + key + "'");
      expect_symbol(":");
      const std::string value = expect_ident("'creator'");
      if (value != "creator")
        throw ParseError(tokens_[pos_ - 1].pos, {"'creator'"}, "'" + value + "'");
      f.creator_note = true;
    }
    if (accept_keyword("require")) f.require = parse_clauses("require", {"modify", "do"});
    if (accept_keyword("modify")) f.modify = parse_ident_list();
    expect_keyword("do");
    f.body = parse_statements({"ensure", "end"});
    if (accept_keyword("ensure")) f.ensure = parse_clauses("ensure", {"end"});
    expect_keyword("end");
    cls.features.push_back(std::move(f));
  }

  ExprPtr parse_constant() {
    const SourcePos pos = peek().pos;
    if (peek().kind == TokenKind::String) return make_string(take().text, pos);
    if (peek().kind == TokenKind::Integer) return make_int(parse_int(take()), pos);
    if (at_symbol("-") && peek(1).kind == TokenKind::Integer) {
      take();
      return make_int(-parse_int(take()), pos);
    }
    if (at_keyword("True") || at_keyword("true")) {
      take();
      return make_bool(true, pos);
    }
    if (at_keyword("False") || at_keyword("false")) {
      take();
      return make_bool(false, pos);
    }
    if (at_symbol("{")) return parse_set_literal();
    fail({"constant literal"});
  }

  std::int64_t parse_int(const Token& t) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size())
      throw ParseError(t.pos, {"integer within 64 bits"}, "'" + t.text + "'");
    return v;
  }

  bool at_any_keyword(const std::vector<std::string_view>& kws) const {
    return std::any_of(kws.begin(), kws.end(), [&](auto kw) { return at_keyword(kw); });
  }

  std::vector<Clause> parse_clauses(std::string_view section,
                                    const std::vector<std::string_view>& terminators) {
    std::vector<Clause> out;
    while (!at_any_keyword(terminators) && !at_end()) {
      Clause c;
      c.pos = peek().pos;
      if (at_ident() && at_symbol(":", 1)) {
        c.label = take().text;
        c.labeled = true;
        take();
      } else {
        c.label = std::string(section) + "_" + std::to_string(out.size() + 1);
      }
      c.expr = parse_expr();
      out.push_back(std::move(c));
      accept_symbol(";");
    }
    if (at_end()) {
      std::vector<std::string> expected;
      for (auto t : terminators) expected.push_back("'" + std::string(t) + "'");
      fail(expected);
    }
    return out;
  }

  bool at_statement_start() const {
    return at_ident() || at_keyword("create") || at_keyword("if") || at_keyword("check");
  }

  std::vector<Stmt> parse_statements(const std::vector<std::string_view>& terminators) {
    std::vector<Stmt> out;
    while (at_statement_start()) {
      out.push_back(parse_statement());
      accept_symbol(";");
    }
    if (!at_any_keyword(terminators)) {
      std::vector<std::string> expected;
      for (auto t : terminators) expected.push_back("'" + std::string(t) + "'");
      expected.push_back("statement");
      fail(expected);
    }
    return out;
  }

  std::vector<ExprPtr> parse_args() {
    std::vector<ExprPtr> args;
    expect_symbol("(");
    if (!at_symbol(")")) {
      do {
        args.push_back(parse_expr());
      } while (accept_symbol(","));
    }
    expect_symbol(")");
    return args;
  }

  Stmt parse_statement() {
    Stmt s;
    s.pos = peek().pos;
    if (accept_keyword("create")) {
      s.kind = StmtKind::Create;
      s.target = expect_ident("attribute name");
      if (accept_symbol(".")) {
        s.feature = expect_ident("creation procedure");
        if (at_symbol("(")) s.args = parse_args();
      }
      return s;
    }
    if (accept_keyword("if")) {
      s.kind = StmtKind::If;
      s.value = parse_expr();
      expect_keyword("then");
      s.then_branch = parse_statements({"else", "end"});
      if (accept_keyword("else")) {
        s.has_else = true;
        s.else_branch = parse_statements({"end"});
      }
      expect_keyword("end");
      return s;
    }
    if (accept_keyword("check")) {
      s.kind = StmtKind::Check;
      s.check.pos = peek().pos;
      if (at_ident() && at_symbol(":", 1)) {
        s.check.label = take().text;
        s.check.labeled = true;
        take();
      } else {
        s.check.label = "check";
      }
      s.check.expr = parse_expr();
      expect_keyword("end");
      return s;
    }
    // Designator chain: a, a.b, a.b.c(args)
    std::vector<std::pair<std::string, SourcePos>> chain;
    chain.emplace_back(peek().text, peek().pos);
    take();
    while (accept_symbol(".")) {
      const SourcePos p = peek().pos;
      chain.emplace_back(expect_ident("feature name"), p);
    }
    if (at_symbol(":=")) {
      take();
      if (chain.size() > 2) fail({"assignment to an attribute or a qualified attribute"});
      s.value = parse_expr();
      if (chain.size() == 1) {
        s.kind = StmtKind::Assign;
        s.target = chain[0].first;
      } else {
        s.kind = StmtKind::QualifiedAssign;
        s.receiver = make_name(chain[0].first, NameRef::Unresolved, {}, chain[0].second);
        s.target = chain[1].first;
      }
      return s;
    }
    if (chain.size() < 2) fail({"':='", "'.'"});
    s.kind = StmtKind::Call;
    ExprPtr recv = make_name(chain[0].first, NameRef::Unresolved, {}, chain[0].second);
    for (std::size_t i = 1; i + 1 < chain.size(); ++i)
      recv = make_qualified(recv, chain[i].first, {}, nullptr, chain[i].second);
    s.receiver = recv;
    s.feature = chain.back().first;
    if (at_symbol("(")) s.args = parse_args();
    return s;
  }

  // implies (right assoc) < or < and < comparison < additive < multiplicative < unary
  ExprPtr parse_expr() { return parse_implies(); }

  ExprPtr parse_implies() {
    ExprPtr lhs = parse_or();
    if (at_keyword("implies")) {
      const SourcePos p = take().pos;
      return make_binary(BinaryOp::Implies, lhs, parse_implies(), p);
    }
    return lhs;
  }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (at_keyword("or")) {
      const SourcePos p = take().pos;
      lhs = make_binary(BinaryOp::Or, lhs, parse_and(), p);
    }
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_comparison();
    while (at_keyword("and")) {
      const SourcePos p = take().pos;
      lhs = make_binary(BinaryOp::And, lhs, parse_comparison(), p);
    }
    return lhs;
  }

  ExprPtr parse_comparison() {
    ExprPtr lhs = parse_additive();
    static const std::vector<std::pair<std::string_view, BinaryOp>> kOps = {
        {"=", BinaryOp::Eq}, {"/=", BinaryOp::Ne}, {"<", BinaryOp::Lt},
        {"<=", BinaryOp::Le}, {">", BinaryOp::Gt}, {">=", BinaryOp::Ge}};
    for (auto [sym, op] : kOps) {
      if (at_symbol(sym)) {
        const SourcePos p = take().pos;
        return make_binary(op, lhs, parse_additive(), p);
      }
    }
    return lhs;
  }

  ExprPtr parse_additive() {
    ExprPtr lhs = parse_multiplicative();
    while (at_symbol("+") || at_symbol("-")) {
      const Token t = take();
      lhs = make_binary(t.text == "+" ? BinaryOp::Add : BinaryOp::Sub, lhs,
                        parse_multiplicative(), t.pos);
    }
    return lhs;
  }

  ExprPtr parse_multiplicative() {
    ExprPtr lhs = parse_unary();
    while (at_symbol("*")) {
      const SourcePos p = take().pos;
      lhs = make_binary(BinaryOp::Mul, lhs, parse_unary(), p);
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    const SourcePos p = peek().pos;
    if (at_symbol("-")) {
      take();
      if (peek().kind == TokenKind::Integer) return parse_postfix(make_int(-parse_int(take()), p));
      return make_unary(UnaryOp::Neg, parse_unary(), p);
    }
    if (accept_keyword("not")) return make_unary(UnaryOp::Not, parse_unary(), p);
    if (accept_keyword("old")) return make_old(parse_unary(), p);
    return parse_postfix(parse_primary());
  }

  ExprPtr parse_postfix(ExprPtr e) {
    while (accept_symbol(".")) {
      const SourcePos p = peek().pos;
      const std::string name = expect_ident("attribute name");
      if (name == "has" && at_symbol("(")) {
        auto args = parse_args();
        if (args.size() != 1) throw ParseError(p, {"one argument to 'has'"}, std::to_string(args.size()));
        e = make_has(e, args[0], p);
        continue;
      }
      if (at_symbol("(")) fail({"attribute read (only 'has' takes arguments)"});
      e = make_qualified(e, name, {}, nullptr, p);
    }
    return e;
  }

  ExprPtr parse_set_literal() {
    const SourcePos p = peek().pos;
    expect_symbol("{");
    std::vector<std::string> elems;
    if (!at_symbol("}")) {
      do {
        if (peek().kind != TokenKind::String) fail({"string literal"});
        elems.push_back(take().text);
      } while (accept_symbol(","));
    }
    expect_symbol("}");
    return make_set(std::move(elems), p);
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    const SourcePos p = t.pos;
    switch (t.kind) {
      case TokenKind::Integer: return make_int(parse_int(take()), p);
      case TokenKind::String: return make_string(take().text, p);
      case TokenKind::Ident: return make_name(take().text, NameRef::Unresolved, {}, p);
      case TokenKind::Keyword:
        if (t.text == "True" || t.text == "true") {
          take();
          return make_bool(true, p);
        }
        if (t.text == "False" || t.text == "false") {
          take();
          return make_bool(false, p);
        }
        if (t.text == "Void") {
          take();
          return make_void(Type::void_type(), p);
        }
        if (t.text == "create") {
          take();
          return make_create(expect_ident("class name"), p);
        }
        break;
      case TokenKind::Symbol:
        if (t.text == "(") {
          take();
          ExprPtr e = parse_expr();
          expect_symbol(")");
          return e;
        }
        if (t.text == "{") return parse_set_literal();
        break;
      case TokenKind::End: break;
    }
    fail({"expression"});
  }
};

}  // namespace

Program parse(std::string_view source) { return Parser(source).parse_program(); }

Program merge_programs(std::vector<Program> parts) {
  Program out;
  for (auto& p : parts) {
    for (auto& c : p.classes) out.classes.push_back(std::move(c));
    for (auto& s : p.string_pool)
      if (std::find(out.string_pool.begin(), out.string_pool.end(), s) == out.string_pool.end())
        out.string_pool.push_back(s);
  }
  return out;
}

}  // namespace miniproof

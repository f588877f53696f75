#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "miniproof/ast.hpp"

namespace miniproof {

enum class TokenKind {
  Ident,
  Keyword,
  Integer,
  String,
  Symbol,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  SourcePos pos;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(SourcePos pos, std::vector<std::string> expected, std::string found);

  SourcePos pos() const { return pos_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  SourcePos pos_;
  std::vector<std::string> expected_;
  std::string found_;
};

std::vector<Token> tokenize(std::string_view source);

// Parses one source file. Classes from several files can be merged with
// merge_programs before analysis.
Program parse(std::string_view source);

Program merge_programs(std::vector<Program> parts);

// Deterministic source rendering: two-space indent, one clause per line.
std::string pretty(const Program& program);
std::string pretty(const ExprPtr& expr);

// Position-free structural dump used to compare ASTs.
std::string dump(const Program& program);

}  // namespace miniproof

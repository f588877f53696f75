#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "miniproof/ast.hpp"

namespace miniproof {

struct Diagnostic {
  SourcePos pos;
  std::string message;
};

class SemanticError : public std::runtime_error {
 public:
  explicit SemanticError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

struct ClassSymbols {
  std::map<std::string, std::size_t> attributes;  // name -> index in ClassDecl::attributes
  std::map<std::string, std::size_t> features;    // name -> index in ClassDecl::features
  std::vector<std::string> model_queries;
  std::string creator;

  bool operator==(const ClassSymbols&) const = default;
};

// An analyzed program: every name resolved, every expression typed, the
// creator of each class identified. Immutable once built.
class CheckedProgram {
 public:
  CheckedProgram(Program program, std::map<std::string, ClassSymbols> symbols);

  const Program& program() const { return *program_; }
  const std::map<std::string, ClassSymbols>& symbols() const { return symbols_; }

  const ClassDecl& cls(std::string_view name) const;
  const Feature& feature(std::string_view cls, std::string_view name) const;
  const std::vector<std::string>& model_queries(std::string_view cls) const;
  bool is_model_query(std::string_view cls, std::string_view attr) const;

 private:
  std::shared_ptr<const Program> program_;
  std::map<std::string, ClassSymbols> symbols_;
};

// Throws SemanticError carrying every diagnostic found.
CheckedProgram analyze(const Program& program);

}  // namespace miniproof

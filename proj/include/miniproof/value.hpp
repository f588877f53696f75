#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace miniproof {

struct VoidValue {
  bool operator==(const VoidValue&) const = default;
  auto operator<=>(const VoidValue&) const = default;
};

// Object identity. At run time an index into the heap; during enumeration
// the index of a canonical object.
struct RefValue {
  int id = 0;
  bool operator==(const RefValue&) const = default;
  auto operator<=>(const RefValue&) const = default;
};

using StringSet = std::set<std::string>;
using Value = std::variant<VoidValue, std::int64_t, bool, std::string, StringSet, RefValue>;

// Symbol (attribute path, parameter, or havoc symbol) -> value.
using Environment = std::map<std::string, Value>;

inline bool is_void(const Value& v) { return std::holds_alternative<VoidValue>(v); }

// Renders a value in scenario-literal syntax: 42, True, "text", Void,
// {"a", "b"}, #0 for an object.
std::string to_string(const Value& v);
std::string to_string(const Environment& env);

// Parses the syntax produced by to_string(Value).
Value parse_value(std::string_view text);

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_sub(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

}  // namespace miniproof

#include "miniproof/value.hpp"

#include <cctype>
#include <charconv>

namespace miniproof {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

struct Reader {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("bad value literal '" + std::string(text) + "': " + what);
  }

  std::string read_string() {
    if (pos >= text.size() || text[pos] != '"') fail("expected '\"'");
    ++pos;
    std::string out;
    while (pos < text.size() && text[pos] != '"') {
      if (text[pos] == '\\' && pos + 1 < text.size()) ++pos;
      out += text[pos++];
    }
    if (pos >= text.size()) fail("unterminated string");
    ++pos;
    return out;
  }

  Value read() {
    skip_ws();
    if (pos >= text.size()) fail("empty");
    const char c = text[pos];
    if (c == '"') return read_string();
    if (c == '{') {
      ++pos;
      StringSet set;
      skip_ws();
      if (pos < text.size() && text[pos] == '}') {
        ++pos;
        return set;
      }
      while (true) {
        skip_ws();
        set.insert(read_string());
        skip_ws();
        if (pos < text.size() && text[pos] == ',') {
          ++pos;
          continue;
        }
        if (pos < text.size() && text[pos] == '}') {
          ++pos;
          return set;
        }
        fail("expected ',' or '}'");
      }
    }
    if (c == '#') {
      ++pos;
      int id = 0;
      auto [p, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), id);
      if (ec != std::errc()) fail("expected object index");
      pos = static_cast<std::size_t>(p - text.data());
      return RefValue{id};
    }
    if (c == '-' || (c >= '0' && c <= '9')) {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), v);
      if (ec != std::errc()) fail("expected integer");
      pos = static_cast<std::size_t>(p - text.data());
      return v;
    }
    std::size_t end = pos;
    while (end < text.size() && std::isalpha(static_cast<unsigned char>(text[end]))) ++end;
    const std::string_view word = text.substr(pos, end - pos);
    pos = end;
    if (word == "True" || word == "true") return true;
    if (word == "False" || word == "false") return false;
    if (word == "Void") return VoidValue{};
    fail("unknown literal");
  }
};

}  // namespace

std::string to_string(const Value& v) {
  struct Visitor {
    std::string operator()(VoidValue) const { return "Void"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(bool b) const { return b ? "True" : "False"; }
    std::string operator()(const std::string& s) const { return quote(s); }
    std::string operator()(const StringSet& set) const {
      std::string out = "{";
      bool first = true;
      for (const auto& s : set) {
        if (!first) out += ", ";
        first = false;
        out += quote(s);
      }
      return out + "}";
    }
    std::string operator()(RefValue r) const { return "#" + std::to_string(r.id); }
  };
  return std::visit(Visitor{}, v);
}

std::string to_string(const Environment& env) {
  std::string out;
  for (const auto& [k, v] : env) {
    if (!out.empty()) out += ", ";
    out += k + "=" + to_string(v);
  }
  return out;
}

Value parse_value(std::string_view text) {
  Reader r{text};
  Value v = r.read();
  r.skip_ws();
  if (r.pos != text.size()) r.fail("trailing characters");
  return v;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw EvalError("integer arithmetic exceeds 64 bits");
  return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw EvalError("integer arithmetic exceeds 64 bits");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw EvalError("integer arithmetic exceeds 64 bits");
  return r;
}

}  // namespace miniproof

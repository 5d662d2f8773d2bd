#include "bitensor/parse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numbers>

namespace bitensor {

ParseError::ParseError(std::size_t offset, std::string message, std::string token)
    : std::runtime_error("parse error at offset " + std::to_string(offset) + ": " + message +
                         (token.empty() ? std::string() : " (near '" + token + "')")),
      offset_(offset),
      message_(std::move(message)),
      token_(std::move(token)) {}

namespace {

struct FunctionEntry {
  std::string_view name;
  Op op;
};

constexpr FunctionEntry kFunctions[] = {
    {"sin", Op::Sin},   {"cos", Op::Cos},   {"tan", Op::Tan},   {"exp", Op::Exp},
    {"log", Op::Log},   {"sqrt", Op::Sqrt}, {"sinh", Op::Sinh}, {"cosh", Op::Cosh},
};

// Tags a freshly built node with the source offset of its operator so that
// evaluation errors can point back into the source.
Expr located(const Expr& e, std::size_t offset, const Expr& a, const Expr& b) {
  if (e.node().offset >= 0 || e.same_node(a) || e.same_node(b)) return e;
  auto copy = std::make_shared<Node>(e.node());
  copy->offset = static_cast<int>(offset);
  return Expr(NodePtr(std::move(copy)));
}

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> vars) : src_(src), vars_(vars) {}

  Expr run() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError(0, "empty expression", "");
    Expr e = expr();
    skip_ws();
    if (pos_ < src_.size()) throw ParseError(pos_, "unexpected trailing input", token_at(pos_));
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  [[nodiscard]] std::string token_at(std::size_t at) const {
    if (at >= src_.size()) return "<end>";
    const char c = src_[at];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
      std::size_t end = at;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_' || src_[end] == '.')) {
        ++end;
      }
      return std::string(src_.substr(at, end - at));
    }
    return std::string(1, c);
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('+')) {
        Expr rhs = term();
        lhs = located(lhs + rhs, at, lhs, rhs);
      } else if (accept('-')) {
        Expr rhs = term();
        lhs = located(lhs - rhs, at, lhs, rhs);
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('*')) {
        Expr rhs = unary();
        lhs = located(lhs * rhs, at, lhs, rhs);
      } else if (accept('/')) {
        Expr rhs = unary();
        lhs = located(lhs / rhs, at, lhs, rhs);
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    skip_ws();
    const std::size_t at = pos_;
    if (accept('^')) {
      Expr exponent = unary();
      if (!exponent.is_constant()) throw ParseError(at, "exponent must be constant", "^");
      return pow(base, exponent.constant_value());
    }
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError(pos_, "unexpected end of input", "<end>");
    const std::size_t start = pos_;
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      if (!accept(')')) throw ParseError(pos_, "expected ')'", token_at(pos_));
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      const std::string ident(src_.substr(start, pos_ - start));
      skip_ws();
      const bool call = pos_ < src_.size() && src_[pos_] == '(';
      if (call) {
        const auto fn = std::find_if(std::begin(kFunctions), std::end(kFunctions),
                                     [&](const FunctionEntry& f) { return f.name == ident; });
        if (fn == std::end(kFunctions)) throw ParseError(start, "unknown function", ident);
        ++pos_;
        Expr arg = expr();
        if (!accept(')')) throw ParseError(pos_, "expected ')' after function argument", token_at(pos_));
        return located(apply_function(fn->op, arg), start, arg, arg);
      }
      if (ident == "pi") return Expr::constant(std::numbers::pi, static_cast<int>(start));
      if (std::find(vars_.begin(), vars_.end(), ident) == vars_.end()) {
        throw ParseError(start, "undeclared variable", ident);
      }
      return Expr::variable(ident, static_cast<int>(start));
    }
    throw ParseError(start, "unexpected character", token_at(start));
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        digits();
      }
    }
    const std::string_view text = src_.substr(start, pos_ - start);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ParseError(start, "malformed number", std::string(text));
    }
    return Expr::constant(value, static_cast<int>(start));
  }

  std::string_view src_;
  std::span<const std::string> vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view source, std::span<const std::string> allowed_vars) {
  return Parser(source, allowed_vars).run();
}

}  // namespace bitensor

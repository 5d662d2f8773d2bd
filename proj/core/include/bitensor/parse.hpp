#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "bitensor/expr.hpp"

namespace bitensor {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string message, std::string token);

  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
  [[nodiscard]] const std::string& message() const noexcept { return message_; }
  [[nodiscard]] const std::string& token() const noexcept { return token_; }

 private:
  std::size_t offset_;
  std::string message_;
  std::string token_;
};

/// Parses the expression language:
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := ('-' | '+') unary | power
///     power   := primary ('^' unary)?
///     primary := number | 'pi' | ident | func '(' expr ')' | '(' expr ')'
///
/// `^` is right associative and binds tighter than unary minus. Exponents
/// must reduce to constants. Identifiers not listed in `allowed_vars` are
/// rejected.
[[nodiscard]] Expr parse(std::string_view source, std::span<const std::string> allowed_vars);

}  // namespace bitensor

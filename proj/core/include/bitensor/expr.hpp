#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bitensor {

/// Node kinds of the expression grammar. Pow always carries a constant exponent.
enum class Op : std::uint8_t {
  Const,
  Var,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Sin,
  Cos,
  Tan,
  Exp,
  Log,
  Sqrt,
  Sinh,
  Cosh,
};

[[nodiscard]] bool is_unary_function(Op op) noexcept;
[[nodiscard]] std::string_view function_name(Op op) noexcept;

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// One immutable tree node. Subtrees are shared freely, so an Expr is a DAG.
struct Node {
  Op op = Op::Const;
  double value = 0.0;  // literal for Const, exponent for Pow
  std::string name;    // identifier for Var
  NodePtr lhs;
  NodePtr rhs;
  int offset = -1;  // byte offset in the parsed source, -1 for derived nodes
};

/// Raised by evaluation when an operation leaves its real domain.
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& message, std::string location, int offset)
      : std::domain_error(message), location_(std::move(location)), offset_(offset) {}

  /// Printed form of the offending subexpression.
  [[nodiscard]] const std::string& location() const noexcept { return location_; }
  /// Source offset of the offending node, or -1 when the node was derived.
  [[nodiscard]] int offset() const noexcept { return offset_; }

 private:
  std::string location_;
  int offset_;
};

/// Immutable symbolic scalar expression over named real variables.
///
/// The arithmetic operators and the free functions below apply light
/// simplification while building: constant folding, absorption of 0 and 1,
/// and merging of nested integer powers. No canonical form is attempted.
class Expr {
 public:
  Expr();  // the constant 0
  Expr(double value);  // NOLINT(google-explicit-constructor)
  explicit Expr(NodePtr node);

  [[nodiscard]] static Expr constant(double value, int offset = -1);
  [[nodiscard]] static Expr variable(std::string name, int offset = -1);

  [[nodiscard]] const Node& node() const noexcept { return *node_; }
  [[nodiscard]] const NodePtr& ptr() const noexcept { return node_; }
  [[nodiscard]] Op op() const noexcept { return node_->op; }

  [[nodiscard]] bool is_constant() const noexcept { return node_->op == Op::Const; }
  [[nodiscard]] bool is_zero() const noexcept { return is_constant() && node_->value == 0.0; }
  [[nodiscard]] bool is_one() const noexcept { return is_constant() && node_->value == 1.0; }
  [[nodiscard]] double constant_value() const;

  [[nodiscard]] bool same_node(const Expr& other) const noexcept { return node_ == other.node_; }

 private:
  NodePtr node_;
};

[[nodiscard]] Expr operator+(const Expr& a, const Expr& b);
[[nodiscard]] Expr operator-(const Expr& a, const Expr& b);
[[nodiscard]] Expr operator*(const Expr& a, const Expr& b);
[[nodiscard]] Expr operator/(const Expr& a, const Expr& b);
[[nodiscard]] Expr operator-(const Expr& a);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

[[nodiscard]] Expr pow(const Expr& base, double exponent);
[[nodiscard]] Expr sin(const Expr& a);
[[nodiscard]] Expr cos(const Expr& a);
[[nodiscard]] Expr tan(const Expr& a);
[[nodiscard]] Expr exp(const Expr& a);
[[nodiscard]] Expr log(const Expr& a);
[[nodiscard]] Expr sqrt(const Expr& a);
[[nodiscard]] Expr sinh(const Expr& a);
[[nodiscard]] Expr cosh(const Expr& a);

/// Builds the node `op(a)` for a unary function op, with constant folding.
[[nodiscard]] Expr apply_function(Op op, const Expr& a);

/// Exact partial derivative with respect to `var`. Shared subtrees are
/// differentiated once.
[[nodiscard]] Expr differentiate(const Expr& e, std::string_view var);

/// Replaces variables by expressions. Unlisted variables are kept.
[[nodiscard]] Expr substitute(const Expr& e, const std::map<std::string, Expr, std::less<>>& replacements);

using Bindings = std::map<std::string, double, std::less<>>;

/// Tree-walking evaluation. Throws DomainError for log of a non-positive
/// value, division by zero, square root of a negative value, or a
/// fractional power of a negative base; throws std::out_of_range for an
/// unbound variable.
[[nodiscard]] double evaluate(const Expr& e, const Bindings& bindings);

/// Pretty-prints with minimal parentheses; literals use the shortest
/// representation that round-trips.
[[nodiscard]] std::string to_string(const Expr& e);

[[nodiscard]] std::set<std::string> free_variables(const Expr& e);

/// Number of distinct nodes reachable from `e` (pointer identity).
[[nodiscard]] std::size_t node_count(const Expr& e);

/// Applies a unary function to a number with the same domain rules as
/// evaluation. Returns false when the argument is outside the domain.
[[nodiscard]] bool apply_scalar(Op op, double x, double& out) noexcept;
[[nodiscard]] bool apply_scalar_pow(double base, double exponent, double& out) noexcept;

}  // namespace bitensor

#include "bitensor/expr.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace bitensor {

namespace {

NodePtr make_node(Op op, double value, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

bool is_integer(double x) { return std::isfinite(x) && std::floor(x) == x; }

const Expr& zero_expr() {
  static const Expr z = Expr::constant(0.0);
  return z;
}

const Expr& one_expr() {
  static const Expr o = Expr::constant(1.0);
  return o;
}

Expr binary(Op op, const Expr& a, const Expr& b) { return Expr(make_node(op, 0.0, a.ptr(), b.ptr())); }

Expr folded_or(Op op, const Expr& a, double result_if_finite, bool ok) {
  if (ok && std::isfinite(result_if_finite)) return Expr::constant(result_if_finite);
  return Expr(make_node(op, 0.0, a.ptr()));
}

}  // namespace

bool is_unary_function(Op op) noexcept {
  switch (op) {
    case Op::Sin:
    case Op::Cos:
    case Op::Tan:
    case Op::Exp:
    case Op::Log:
    case Op::Sqrt:
    case Op::Sinh:
    case Op::Cosh:
      return true;
    default:
      return false;
  }
}

std::string_view function_name(Op op) noexcept {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tan: return "tan";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Sinh: return "sinh";
    case Op::Cosh: return "cosh";
    default: return "";
  }
}

bool apply_scalar(Op op, double x, double& out) noexcept {
  switch (op) {
    case Op::Sin: out = std::sin(x); return true;
    case Op::Cos: out = std::cos(x); return true;
    case Op::Tan: out = std::tan(x); return true;
    case Op::Exp: out = std::exp(x); return true;
    case Op::Log:
      if (!(x > 0.0)) return false;
      out = std::log(x);
      return true;
    case Op::Sqrt:
      if (!(x >= 0.0)) return false;
      out = std::sqrt(x);
      return true;
    case Op::Sinh: out = std::sinh(x); return true;
    case Op::Cosh: out = std::cosh(x); return true;
    case Op::Neg: out = -x; return true;
    default: return false;
  }
}

bool apply_scalar_pow(double base, double exponent, double& out) noexcept {
  if (base < 0.0 && !is_integer(exponent)) return false;
  if (base == 0.0 && exponent < 0.0) return false;
  if (exponent == 2.0) {
    out = base * base;
  } else if (exponent == 1.0) {
    out = base;
  } else if (exponent == 0.5) {
    out = std::sqrt(base);
  } else {
    out = std::pow(base, exponent);
  }
  return true;
}

Expr::Expr() : node_(zero_expr().ptr()) {}

Expr::Expr(double value) : node_(make_node(Op::Const, value)) {}

Expr::Expr(NodePtr node) : node_(std::move(node)) {
  if (!node_) throw std::invalid_argument("Expr: null node");
}

Expr Expr::constant(double value, int offset) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = value;
  n->offset = offset;
  return Expr(NodePtr(std::move(n)));
}

Expr Expr::variable(std::string name, int offset) {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->name = std::move(name);
  n->offset = offset;
  return Expr(NodePtr(std::move(n)));
}

double Expr::constant_value() const {
  if (!is_constant()) throw std::logic_error("Expr::constant_value on a non-constant expression");
  return node_->value;
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() + b.constant_value());
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (b.op() == Op::Neg) return a - Expr(b.node().lhs);
  if (a.same_node(b)) return Expr::constant(2.0) * a;
  return binary(Op::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() - b.constant_value());
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  if (a.same_node(b)) return zero_expr();
  if (b.op() == Op::Neg) return a + Expr(b.node().lhs);
  return binary(Op::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() * b.constant_value());
  if (a.is_zero() || b.is_zero()) return zero_expr();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.is_constant() && a.constant_value() == -1.0) return -b;
  if (b.is_constant() && b.constant_value() == -1.0) return -a;
  if (b.is_constant()) return b * a;  // constants to the left
  if (a.is_constant() && b.op() == Op::Mul && Expr(b.node().lhs).is_constant()) {
    return Expr::constant(a.constant_value() * b.node().lhs->value) * Expr(b.node().rhs);
  }
  if (a.op() == Op::Neg && b.op() == Op::Neg) return Expr(a.node().lhs) * Expr(b.node().lhs);
  if (a.op() == Op::Neg) return -(Expr(a.node().lhs) * b);
  if (b.op() == Op::Neg) return -(a * Expr(b.node().lhs));
  if (a.same_node(b)) return pow(a, 2.0);
  return binary(Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && b.constant_value() != 0.0) {
    return Expr::constant(a.constant_value() / b.constant_value());
  }
  if (a.is_zero() && !(b.is_constant() && b.constant_value() == 0.0)) return zero_expr();
  if (b.is_one()) return a;
  if (b.is_constant() && b.constant_value() == -1.0) return -a;
  if (a.same_node(b)) return one_expr();
  if (a.op() == Op::Neg) return -(Expr(a.node().lhs) / b);
  return binary(Op::Div, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.constant_value());
  if (a.op() == Op::Neg) return Expr(a.node().lhs);
  return Expr(make_node(Op::Neg, 0.0, a.ptr()));
}

Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

Expr pow(const Expr& base, double exponent) {
  if (exponent == 0.0) return one_expr();
  if (exponent == 1.0) return base;
  if (base.is_constant()) {
    double v = 0.0;
    if (apply_scalar_pow(base.constant_value(), exponent, v) && std::isfinite(v)) return Expr::constant(v);
  }
  if (base.op() == Op::Pow && is_integer(exponent)) {
    return pow(Expr(base.node().lhs), base.node().value * exponent);
  }
  return Expr(make_node(Op::Pow, exponent, base.ptr()));
}

Expr apply_function(Op op, const Expr& a) {
  if (!is_unary_function(op)) throw std::invalid_argument("apply_function: not a unary function");
  if (a.is_constant()) {
    double v = 0.0;
    const bool ok = apply_scalar(op, a.constant_value(), v);
    return folded_or(op, a, v, ok);
  }
  if (op == Op::Exp && a.op() == Op::Log) return Expr(a.node().lhs);
  return Expr(make_node(op, 0.0, a.ptr()));
}

Expr sin(const Expr& a) { return apply_function(Op::Sin, a); }
Expr cos(const Expr& a) { return apply_function(Op::Cos, a); }
Expr tan(const Expr& a) { return apply_function(Op::Tan, a); }
Expr exp(const Expr& a) { return apply_function(Op::Exp, a); }
Expr log(const Expr& a) { return apply_function(Op::Log, a); }
Expr sqrt(const Expr& a) { return apply_function(Op::Sqrt, a); }
Expr sinh(const Expr& a) { return apply_function(Op::Sinh, a); }
Expr cosh(const Expr& a) { return apply_function(Op::Cosh, a); }

Expr differentiate(const Expr& e, std::string_view var) {
  std::unordered_map<const Node*, Expr> memo;
  std::function<Expr(const NodePtr&)> d = [&](const NodePtr& n) -> Expr {
    if (auto it = memo.find(n.get()); it != memo.end()) return it->second;
    const Expr self(n);
    Expr result;
    switch (n->op) {
      case Op::Const:
        result = zero_expr();
        break;
      case Op::Var:
        result = n->name == var ? one_expr() : zero_expr();
        break;
      case Op::Neg:
        result = -d(n->lhs);
        break;
      case Op::Add:
        result = d(n->lhs) + d(n->rhs);
        break;
      case Op::Sub:
        result = d(n->lhs) - d(n->rhs);
        break;
      case Op::Mul: {
        const Expr a(n->lhs), b(n->rhs);
        result = d(n->lhs) * b + a * d(n->rhs);
        break;
      }
      case Op::Div: {
        const Expr a(n->lhs), b(n->rhs);
        const Expr da = d(n->lhs), db = d(n->rhs);
        if (db.is_zero()) {
          result = da / b;
        } else {
          result = (da * b - a * db) / pow(b, 2.0);
        }
        break;
      }
      case Op::Pow: {
        const Expr a(n->lhs);
        const Expr da = d(n->lhs);
        if (da.is_zero()) {
          result = zero_expr();
        } else {
          result = Expr::constant(n->value) * pow(a, n->value - 1.0) * da;
        }
        break;
      }
      default: {
        const Expr a(n->lhs);
        const Expr da = d(n->lhs);
        if (da.is_zero()) {
          result = zero_expr();
          break;
        }
        switch (n->op) {
          case Op::Sin: result = cos(a) * da; break;
          case Op::Cos: result = -(sin(a) * da); break;
          case Op::Tan: result = da / pow(cos(a), 2.0); break;
          case Op::Exp: result = self * da; break;
          case Op::Log: result = da / a; break;
          case Op::Sqrt: result = da / (Expr::constant(2.0) * self); break;
          case Op::Sinh: result = cosh(a) * da; break;
          case Op::Cosh: result = sinh(a) * da; break;
          default: throw std::logic_error("differentiate: unhandled op");
        }
      }
    }
    memo.emplace(n.get(), result);
    return result;
  };
  return d(e.ptr());
}

Expr substitute(const Expr& e, const std::map<std::string, Expr, std::less<>>& replacements) {
  std::unordered_map<const Node*, Expr> memo;
  std::function<Expr(const NodePtr&)> s = [&](const NodePtr& n) -> Expr {
    if (auto it = memo.find(n.get()); it != memo.end()) return it->second;
    Expr result{n};
    switch (n->op) {
      case Op::Const:
        break;
      case Op::Var:
        if (auto it = replacements.find(n->name); it != replacements.end()) result = it->second;
        break;
      case Op::Neg: result = -s(n->lhs); break;
      case Op::Add: result = s(n->lhs) + s(n->rhs); break;
      case Op::Sub: result = s(n->lhs) - s(n->rhs); break;
      case Op::Mul: result = s(n->lhs) * s(n->rhs); break;
      case Op::Div: result = s(n->lhs) / s(n->rhs); break;
      case Op::Pow: result = pow(s(n->lhs), n->value); break;
      default: result = apply_function(n->op, s(n->lhs)); break;
    }
    memo.emplace(n.get(), result);
    return result;
  };
  return s(e.ptr());
}

double evaluate(const Expr& e, const Bindings& bindings) {
  std::unordered_map<const Node*, double> memo;
  std::function<double(const NodePtr&)> ev = [&](const NodePtr& n) -> double {
    if (auto it = memo.find(n.get()); it != memo.end()) return it->second;
    double v = 0.0;
    auto fail = [&](const char* what) {
      throw DomainError(std::string("domain error: ") + what + " in '" + to_string(Expr(n)) + "'",
                        to_string(Expr(n)), n->offset);
    };
    switch (n->op) {
      case Op::Const: v = n->value; break;
      case Op::Var: {
        auto it = bindings.find(n->name);
        if (it == bindings.end()) throw std::out_of_range("unbound variable '" + n->name + "'");
        v = it->second;
        break;
      }
      case Op::Neg: v = -ev(n->lhs); break;
      case Op::Add: v = ev(n->lhs) + ev(n->rhs); break;
      case Op::Sub: v = ev(n->lhs) - ev(n->rhs); break;
      case Op::Mul: v = ev(n->lhs) * ev(n->rhs); break;
      case Op::Div: {
        const double a = ev(n->lhs), b = ev(n->rhs);
        if (b == 0.0) fail("division by zero");
        v = a / b;
        break;
      }
      case Op::Pow:
        if (!apply_scalar_pow(ev(n->lhs), n->value, v)) fail("power outside its domain");
        break;
      default:
        if (!apply_scalar(n->op, ev(n->lhs), v)) fail(n->op == Op::Log ? "log of a non-positive value" : "square root of a negative value");
        break;
    }
    memo.emplace(n.get(), v);
    return v;
  };
  return ev(e.ptr());
}

namespace {

int precedence(const Node& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    case Op::Const: return n.value < 0.0 ? 3 : 5;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_number failed");
  return std::string(buf, end);
}

void print(const Node& n, std::string& out);

void print_child(const Node& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print(child, out);
    out += ')';
  } else {
    print(child, out);
  }
}

void print(const Node& n, std::string& out) {
  switch (n.op) {
    case Op::Const:
      if (n.value < 0.0) {
        out += '-';
        out += format_number(-n.value);
      } else {
        out += format_number(n.value);
      }
      return;
    case Op::Var: out += n.name; return;
    case Op::Neg:
      out += '-';
      print_child(*n.lhs, 4, out);
      return;
    case Op::Add:
    case Op::Sub:
      print_child(*n.lhs, 1, out);
      out += n.op == Op::Add ? " + " : " - ";
      print_child(*n.rhs, 2, out);
      return;
    case Op::Mul:
    case Op::Div:
      print_child(*n.lhs, 2, out);
      out += n.op == Op::Mul ? "*" : "/";
      print_child(*n.rhs, 3, out);
      return;
    case Op::Pow:
      print_child(*n.lhs, 5, out);
      out += '^';
      if (n.value < 0.0) {
        out += "(-" + format_number(-n.value) + ")";
      } else {
        out += format_number(n.value);
      }
      return;
    default:
      out += function_name(n.op);
      out += '(';
      print(*n.lhs, out);
      out += ')';
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e.node(), out);
  return out;
}

std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> vars;
  std::unordered_set<const Node*> seen;
  std::function<void(const NodePtr&)> walk = [&](const NodePtr& n) {
    if (!n || !seen.insert(n.get()).second) return;
    if (n->op == Op::Var) vars.insert(n->name);
    walk(n->lhs);
    walk(n->rhs);
  };
  walk(e.ptr());
  return vars;
}

std::size_t node_count(const Expr& e) {
  std::unordered_set<const Node*> seen;
  std::function<void(const NodePtr&)> walk = [&](const NodePtr& n) {
    if (!n || !seen.insert(n.get()).second) return;
    walk(n->lhs);
    walk(n->rhs);
  };
  walk(e.ptr());
  return seen.size();
}

}  // namespace bitensor

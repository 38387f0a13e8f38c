#include <bit>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <numbers>

#include "igh/expr.hpp"

namespace igh::expr {

std::string_view function_name(Function f) {
  switch (f) {
    case Function::Exp: return "exp";
    case Function::Log: return "log";
    case Function::Sqrt: return "sqrt";
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Sinh: return "sinh";
    case Function::Cosh: return "cosh";
    case Function::Tanh: return "tanh";
    case Function::Abs: return "abs";
  }
  return "?";
}

std::string_view constant_name(NamedConstant c) { return c == NamedConstant::Pi ? "pi" : "e"; }

double constant_value(NamedConstant c) {
  return c == NamedConstant::Pi ? std::numbers::pi : std::numbers::e;
}

namespace {

node::NodePtr make(node::Node n) { return std::make_shared<const node::Node>(std::move(n)); }

}  // namespace

Expression::Expression() : root_(make({node::Literal{0.0}, true})) {}

Expression Expression::literal(double v) {
  if (!std::isfinite(v)) throw DomainError("non-finite literal");
  return Expression(make({node::Literal{v}, true}));
}

Expression Expression::variable(std::string name) {
  return Expression(make({node::Variable{std::move(name)}, false}));
}

Expression Expression::constant(NamedConstant c) { return Expression(make({node::Constant{c}, true})); }

Expression Expression::negate(Expression e) {
  const bool vf = e.variable_free();
  return Expression(make({node::Negate{std::move(e.root_)}, vf}));
}

Expression Expression::binary(BinaryOp op, Expression lhs, Expression rhs) {
  const bool vf = lhs.variable_free() && rhs.variable_free();
  return Expression(make({node::Binary{op, std::move(lhs.root_), std::move(rhs.root_)}, vf}));
}

Expression Expression::call(Function f, Expression arg) {
  const bool vf = arg.variable_free();
  return Expression(make({node::Call{f, std::move(arg.root_)}, vf}));
}

namespace {

bool equal(const node::Node& a, const node::Node& b) {
  if (a.kind.index() != b.kind.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.kind);
        if constexpr (std::is_same_v<T, node::Literal>) {
          return std::bit_cast<std::uint64_t>(x.value) == std::bit_cast<std::uint64_t>(y.value);
        } else if constexpr (std::is_same_v<T, node::Variable>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, node::Constant>) {
          return x.which == y.which;
        } else if constexpr (std::is_same_v<T, node::Negate>) {
          return equal(*x.operand, *y.operand);
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
        } else {
          return x.fn == y.fn && equal(*x.arg, *y.arg);
        }
      },
      a.kind);
}

// Printing precedence: sums 1, products 2, negation 3, powers 4, atoms 5.
int precedence(const node::Node& n) {
  if (const auto* b = std::get_if<node::Binary>(&n.kind)) {
    switch (b->op) {
      case BinaryOp::Add:
      case BinaryOp::Sub: return 1;
      case BinaryOp::Mul:
      case BinaryOp::Div: return 2;
      case BinaryOp::Pow: return 4;
    }
  }
  if (std::holds_alternative<node::Negate>(n.kind)) return 3;
  return 5;
}

char op_char(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
    case BinaryOp::Pow: return '^';
  }
  return '?';
}

void print(const node::Node& n, int min_prec, std::string& out) {
  const bool paren = precedence(n) < min_prec;
  if (paren) out += '(';
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, node::Literal>) {
          char buf[64];
          auto res = std::to_chars(buf, buf + sizeof buf, x.value);
          out.append(buf, res.ptr);
        } else if constexpr (std::is_same_v<T, node::Variable>) {
          out += x.name;
        } else if constexpr (std::is_same_v<T, node::Constant>) {
          out += constant_name(x.which);
        } else if constexpr (std::is_same_v<T, node::Negate>) {
          out += '-';
          print(*x.operand, 3, out);
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          const int p = precedence(n);
          if (x.op == BinaryOp::Pow) {
            print(*x.lhs, 5, out);
            out += '^';
            print(*x.rhs, 3, out);
          } else {
            print(*x.lhs, p, out);
            out += ' ';
            out += op_char(x.op);
            out += ' ';
            print(*x.rhs, p + 1, out);
          }
        } else {
          out += function_name(x.fn);
          out += '(';
          print(*x.arg, 0, out);
          out += ')';
        }
      },
      n.kind);
  if (paren) out += ')';
}

void collect(const node::Node& n, std::vector<std::string>& names) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, node::Variable>) {
          for (const auto& s : names)
            if (s == x.name) return;
          names.push_back(x.name);
        } else if constexpr (std::is_same_v<T, node::Negate>) {
          collect(*x.operand, names);
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          collect(*x.lhs, names);
          collect(*x.rhs, names);
        } else if constexpr (std::is_same_v<T, node::Call>) {
          collect(*x.arg, names);
        }
      },
      n.kind);
}

const double* literal_of(const Expression& e) {
  if (const auto* l = std::get_if<node::Literal>(&e.root().kind)) return &l->value;
  return nullptr;
}

}  // namespace

bool operator==(const Expression& a, const Expression& b) { return equal(a.root(), b.root()); }

std::string Expression::to_string() const {
  std::string out;
  print(*root_, 0, out);
  return out;
}

std::vector<std::string> Expression::variables() const {
  std::vector<std::string> names;
  collect(*root_, names);
  return names;
}

Expression number(double v) {
  if (v < 0.0) return Expression::negate(Expression::literal(-v));
  return Expression::literal(v == 0.0 ? 0.0 : v);
}

namespace {

// Literal value, looking through a single negation so folded negatives count.
bool numeric(const Expression& e, double& v) {
  if (const double* p = literal_of(e)) {
    v = *p;
    return true;
  }
  if (const auto* n = std::get_if<node::Negate>(&e.root().kind)) {
    if (const auto* l = std::get_if<node::Literal>(&n->operand->kind)) {
      v = -l->value;
      return true;
    }
  }
  return false;
}

}  // namespace

Expression operator+(const Expression& a, const Expression& b) {
  double x = 0.0, y = 0.0;
  const bool na = numeric(a, x), nb = numeric(b, y);
  if (na && nb) return number(x + y);
  if (na && x == 0.0) return b;
  if (nb && y == 0.0) return a;
  return Expression::binary(BinaryOp::Add, a, b);
}

Expression operator-(const Expression& a, const Expression& b) {
  double x = 0.0, y = 0.0;
  const bool na = numeric(a, x), nb = numeric(b, y);
  if (na && nb) return number(x - y);
  if (nb && y == 0.0) return a;
  if (na && x == 0.0) return -b;
  return Expression::binary(BinaryOp::Sub, a, b);
}

Expression operator*(const Expression& a, const Expression& b) {
  double x = 0.0, y = 0.0;
  const bool na = numeric(a, x), nb = numeric(b, y);
  if (na && nb) return number(x * y);
  if ((na && x == 0.0) || (nb && y == 0.0)) return number(0.0);
  if (na && x == 1.0) return b;
  if (nb && y == 1.0) return a;
  return Expression::binary(BinaryOp::Mul, a, b);
}

Expression operator/(const Expression& a, const Expression& b) {
  double x = 0.0, y = 0.0;
  const bool na = numeric(a, x), nb = numeric(b, y);
  if (nb && y == 1.0) return a;
  if (na && x == 0.0 && !(nb && y == 0.0)) return number(0.0);
  if (na && nb && y != 0.0) return number(x / y);
  return Expression::binary(BinaryOp::Div, a, b);
}

Expression operator-(const Expression& a) {
  double x = 0.0;
  if (numeric(a, x)) return number(-x);
  if (const auto* n = std::get_if<node::Negate>(&a.root().kind)) return Expression::wrap(n->operand);
  return Expression::negate(a);
}

Expression pow(const Expression& a, const Expression& b) {
  double y = 0.0;
  if (numeric(b, y)) {
    if (y == 0.0) return number(1.0);
    if (y == 1.0) return a;
  }
  return Expression::binary(BinaryOp::Pow, a, b);
}

Expression apply(Function f, const Expression& a) { return Expression::call(f, a); }

}  // namespace igh::expr

#pragma once
// Expression language: parsing, printing, evaluation with forward-mode
// derivatives up to third order, and a few symbolic helpers (substitution,
// differentiation) used to build pulled-back metrics and Hessians.
//
// Grammar (see docs/expression-grammar.md):
//   expression = term { ("+" | "-") term }
//   term       = unary { ("*" | "/") unary }
//   unary      = ("-" | "+") unary | power
//   power      = primary [ "^" unary ]
//   primary    = number | identifier | function "(" expression ")" | "(" expression ")"

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "igh/errors.hpp"

namespace igh::expr {

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Exp, Log, Sqrt, Sin, Cos, Sinh, Cosh, Tanh, Abs };
enum class NamedConstant { Pi, E };

std::string_view function_name(Function f);
std::string_view constant_name(NamedConstant c);
double constant_value(NamedConstant c);

class Expression;

namespace node {
struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Literal {
  double value;
};
struct Variable {
  std::string name;
};
struct Constant {
  NamedConstant which;
};
struct Negate {
  NodePtr operand;
};
struct Binary {
  BinaryOp op;
  NodePtr lhs, rhs;
};
struct Call {
  Function fn;
  NodePtr arg;
};

struct Node {
  std::variant<Literal, Variable, Constant, Negate, Binary, Call> kind;
  bool variable_free;  // no Variable anywhere below
};
}  // namespace node

/// Immutable expression tree. Copies share structure.
class Expression {
 public:
  Expression();  // literal 0

  static Expression literal(double v);
  static Expression variable(std::string name);
  static Expression constant(NamedConstant c);
  static Expression negate(Expression e);
  static Expression binary(BinaryOp op, Expression lhs, Expression rhs);
  static Expression call(Function f, Expression arg);

  static Expression wrap(node::NodePtr n) { return Expression(std::move(n)); }
  const node::NodePtr& node_ptr() const { return root_; }
  const node::Node& root() const { return *root_; }
  bool variable_free() const { return root_->variable_free; }

  /// Structural equality (same tree shape, ops, names and literal bits).
  friend bool operator==(const Expression& a, const Expression& b);

  /// Minimal-parenthesis text that parses back to an identical tree.
  std::string to_string() const;

  /// Variable names in order of first appearance.
  std::vector<std::string> variables() const;

 private:
  explicit Expression(node::NodePtr n) : root_(std::move(n)) {}
  node::NodePtr root_;
};

Expression parse_expr(std::string_view text);

// Builders with light constant folding (0 + x = x, 1 * x = x, literal arithmetic).
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression pow(const Expression& a, const Expression& b);
Expression apply(Function f, const Expression& a);
Expression number(double v);

/// Replace variables by expressions; names not in the map are left as they are.
Expression substitute(const Expression& e, const std::map<std::string, Expression>& replacement);

/// Symbolic partial derivative with respect to a variable.
Expression differentiate(const Expression& e, std::string_view var);

/// Binds variable names to values by position.
struct Bindings {
  std::span<const std::string> names;
  std::span<const double> values;
};

double evaluate(const Expression& e, const Bindings& at);

/// Value plus all partial derivatives up to `order` (at most 3) with respect to
/// the bound variables. Mixed partials are stored once per sorted multi-index,
/// so d(i, j) == d(j, i) holds exactly.
class DerivativeJet {
 public:
  DerivativeJet(int dim, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }

  double value() const { return value_; }
  double d(int i) const;
  double d(int i, int j) const;
  double d(int i, int j, int k) const;

  void set_value(double v) { value_ = v; }
  void set(int i, double v);
  void set(int i, int j, double v);
  void set(int i, int j, int k, double v);

 private:
  int dim_;
  int order_;
  double value_ = 0.0;
  std::vector<double> first_;
  std::vector<double> second_;
  std::vector<double> third_;
};

DerivativeJet eval_jet(const Expression& e, const Bindings& at, int order);

}  // namespace igh::expr

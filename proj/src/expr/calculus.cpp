#include "igh/expr.hpp"

namespace igh::expr {

Expression substitute(const Expression& e, const std::map<std::string, Expression>& replacement) {
  if (e.variable_free()) return e;
  return std::visit(
      [&](const auto& x) -> Expression {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, node::Variable>) {
          auto it = replacement.find(x.name);
          return it == replacement.end() ? e : it->second;
        } else if constexpr (std::is_same_v<T, node::Negate>) {
          return Expression::negate(substitute(Expression::wrap(x.operand), replacement));
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          return Expression::binary(x.op, substitute(Expression::wrap(x.lhs), replacement),
                                    substitute(Expression::wrap(x.rhs), replacement));
        } else if constexpr (std::is_same_v<T, node::Call>) {
          return Expression::call(x.fn, substitute(Expression::wrap(x.arg), replacement));
        } else {
          return e;
        }
      },
      e.root().kind);
}

Expression differentiate(const Expression& e, std::string_view var) {
  if (e.variable_free()) return number(0.0);
  return std::visit(
      [&](const auto& x) -> Expression {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, node::Variable>) {
          return number(x.name == var ? 1.0 : 0.0);
        } else if constexpr (std::is_same_v<T, node::Negate>) {
          return -differentiate(Expression::wrap(x.operand), var);
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          const Expression u = Expression::wrap(x.lhs);
          const Expression w = Expression::wrap(x.rhs);
          const Expression du = differentiate(u, var);
          const Expression dw = differentiate(w, var);
          switch (x.op) {
            case BinaryOp::Add: return du + dw;
            case BinaryOp::Sub: return du - dw;
            case BinaryOp::Mul: return du * w + u * dw;
            case BinaryOp::Div: return du / w - u * dw / pow(w, number(2.0));
            case BinaryOp::Pow:
              if (w.variable_free()) return w * pow(u, w - number(1.0)) * du;
              return e * (dw * apply(Function::Log, u) + w * du / u);
          }
          return number(0.0);
        } else if constexpr (std::is_same_v<T, node::Call>) {
          const Expression u = Expression::wrap(x.arg);
          const Expression du = differentiate(u, var);
          switch (x.fn) {
            case Function::Exp: return e * du;
            case Function::Log: return du / u;
            case Function::Sqrt: return du / (number(2.0) * e);
            case Function::Sin: return apply(Function::Cos, u) * du;
            case Function::Cos: return -(apply(Function::Sin, u) * du);
            case Function::Sinh: return apply(Function::Cosh, u) * du;
            case Function::Cosh: return apply(Function::Sinh, u) * du;
            case Function::Tanh: return (number(1.0) - pow(e, number(2.0))) * du;
            case Function::Abs: return u / e * du;
          }
          return number(0.0);
        } else {
          return number(0.0);
        }
      },
      e.root().kind);
}

}  // namespace igh::expr

// Evaluation through nested forward-mode dual numbers. Dual<T> carries one
// directional derivative; nesting it k times yields mixed partials of order k
// along the seeded directions.

#include <algorithm>
#include <array>
#include <cmath>
#include <type_traits>

#include "igh/expr.hpp"

namespace igh::expr {
namespace {

template <class T>
struct Dual {
  T a{};
  T b{};
};

inline double primal(double x) { return x; }
template <class T>
double primal(const Dual<T>& x) {
  return primal(x.a);
}

template <class T>
Dual<T> operator+(const Dual<T>& x, const Dual<T>& y) {
  return {x.a + y.a, x.b + y.b};
}
template <class T>
Dual<T> operator-(const Dual<T>& x, const Dual<T>& y) {
  return {x.a - y.a, x.b - y.b};
}
template <class T>
Dual<T> operator-(const Dual<T>& x) {
  return {-x.a, -x.b};
}
template <class T>
Dual<T> operator*(const Dual<T>& x, const Dual<T>& y) {
  return {x.a * y.a, x.a * y.b + x.b * y.a};
}
template <class T>
Dual<T> operator*(double s, const Dual<T>& x) {
  return {s * x.a, s * x.b};
}
template <class T>
Dual<T> operator/(const Dual<T>& x, const Dual<T>& y) {
  const T q = x.a / y.a;
  return {q, (x.b - q * y.b) / y.a};
}

inline double one_like(double) { return 1.0; }
template <class T>
Dual<T> one_like(const Dual<T>& x) {
  return {one_like(x.a), T{}};
}

// Elementary functions, double and dual overloads.
inline double f_exp(double x) { return std::exp(x); }
inline double f_log(double x) { return std::log(x); }
inline double f_sqrt(double x) { return std::sqrt(x); }
inline double f_sin(double x) { return std::sin(x); }
inline double f_cos(double x) { return std::cos(x); }
inline double f_sinh(double x) { return std::sinh(x); }
inline double f_cosh(double x) { return std::cosh(x); }
inline double f_tanh(double x) { return std::tanh(x); }
inline double f_pow(double x, double c) { return std::pow(x, c); }

template <class T>
Dual<T> f_exp(const Dual<T>& x) {
  const T e = f_exp(x.a);
  return {e, e * x.b};
}
template <class T>
Dual<T> f_log(const Dual<T>& x) {
  return {f_log(x.a), x.b / x.a};
}
template <class T>
Dual<T> f_sqrt(const Dual<T>& x) {
  const T s = f_sqrt(x.a);
  return {s, x.b / (2.0 * s)};
}
template <class T>
Dual<T> f_sin(const Dual<T>& x) {
  return {f_sin(x.a), f_cos(x.a) * x.b};
}
template <class T>
Dual<T> f_cos(const Dual<T>& x) {
  return {f_cos(x.a), -(f_sin(x.a) * x.b)};
}
template <class T>
Dual<T> f_sinh(const Dual<T>& x) {
  return {f_sinh(x.a), f_cosh(x.a) * x.b};
}
template <class T>
Dual<T> f_cosh(const Dual<T>& x) {
  return {f_cosh(x.a), f_sinh(x.a) * x.b};
}
template <class T>
Dual<T> f_tanh(const Dual<T>& x) {
  const T t = f_tanh(x.a);
  return {t, (one_like(t) - t * t) * x.b};
}
template <class T>
Dual<T> f_pow(const Dual<T>& x, double c) {
  return {f_pow(x.a, c), c * f_pow(x.a, c - 1.0) * x.b};
}


template <class T>
T constant_like(double v) {
  if constexpr (std::is_same_v<T, double>) {
    return v;
  } else {
    T out{};
    out.a = constant_like<decltype(out.a)>(v);
    return out;
  }
}

template <class T>
T ipow(T base, unsigned n) {
  T result = constant_like<T>(1.0);
  while (n) {
    if (n & 1u) result = result * base;
    n >>= 1u;
    if (n) base = base * base;
  }
  return result;
}

template <class T>
class Evaluator {
 public:
  Evaluator(std::span<const std::string> names, std::span<const T> values)
      : names_(names), values_(values) {}

  T eval(const node::Node& n) const {
    return std::visit([&](const auto& x) -> T { return visit(x); }, n.kind);
  }

 private:
  static constexpr bool kDeriv = !std::is_same_v<T, double>;
  std::span<const std::string> names_;
  std::span<const T> values_;

  T visit(const node::Literal& x) const { return constant_like<T>(x.value); }
  T visit(const node::Constant& x) const { return constant_like<T>(constant_value(x.which)); }
  T visit(const node::Variable& x) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == x.name) return values_[i];
    throw UnboundVariable(x.name);
  }
  T visit(const node::Negate& x) const { return -eval(*x.operand); }

  T visit(const node::Binary& x) const {
    if (x.op == BinaryOp::Pow) return power(x);
    const T l = eval(*x.lhs);
    const T r = eval(*x.rhs);
    switch (x.op) {
      case BinaryOp::Add: return l + r;
      case BinaryOp::Sub: return l - r;
      case BinaryOp::Mul: return l * r;
      case BinaryOp::Div:
        if (primal(r) == 0.0) throw DomainError("division by zero");
        return l / r;
      case BinaryOp::Pow: break;
    }
    return l;
  }

  T power(const node::Binary& x) const {
    const T base = eval(*x.lhs);
    const double b = primal(base);
    if (x.rhs->variable_free) {
      const double c = Evaluator<double>({}, {}).eval(*x.rhs);
      if (c == std::round(c) && std::abs(c) <= 1024.0) {
        const T p = ipow(base, static_cast<unsigned>(std::abs(c)));
        if (c >= 0.0) return p;
        if (b == 0.0) throw DomainError("zero raised to a negative power");
        return constant_like<T>(1.0) / p;
      }
      if (b < 0.0) throw DomainError("negative base with non-integer exponent");
      if (b == 0.0) {
        if (c > 0.0 && !kDeriv) return constant_like<T>(0.0);
        throw DomainError("power not differentiable at zero base");
      }
      return f_pow(base, c);
    }
    if (b <= 0.0) throw DomainError("non-positive base with variable exponent");
    return f_exp(eval(*x.rhs) * f_log(base));
  }

  T visit(const node::Call& x) const {
    const T u = eval(*x.arg);
    const double v = primal(u);
    switch (x.fn) {
      case Function::Exp: return f_exp(u);
      case Function::Log:
        if (v <= 0.0) throw DomainError("log of non-positive value");
        return f_log(u);
      case Function::Sqrt:
        if (v < 0.0) throw DomainError("sqrt of negative value");
        if (v == 0.0 && kDeriv) throw DomainError("sqrt not differentiable at zero");
        return f_sqrt(u);
      case Function::Sin: return f_sin(u);
      case Function::Cos: return f_cos(u);
      case Function::Sinh: return f_sinh(u);
      case Function::Cosh: return f_cosh(u);
      case Function::Tanh: return f_tanh(u);
      case Function::Abs:
        if (v == 0.0 && kDeriv) throw DomainError("abs not differentiable at zero");
        return v < 0.0 ? -u : u;
    }
    return u;
  }
};

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;

void require_finite(double v) {
  if (!std::isfinite(v)) throw DomainError("non-finite result");
}

void check_bindings(const Bindings& at) {
  if (at.names.size() != at.values.size())
    throw Error("bindings: names and values differ in length");
}

}  // namespace

double evaluate(const Expression& e, const Bindings& at) {
  check_bindings(at);
  const double v = Evaluator<double>(at.names, at.values).eval(e.root());
  require_finite(v);
  return v;
}

DerivativeJet::DerivativeJet(int dim, int order)
    : dim_(dim),
      order_(order),
      first_(order >= 1 ? dim : 0, 0.0),
      second_(order >= 2 ? dim * dim : 0, 0.0),
      third_(order >= 3 ? dim * dim * dim : 0, 0.0) {
  if (order < 0 || order > 3) throw Error("jet order must be in 0..3");
}

double DerivativeJet::d(int i) const { return first_.at(i); }

double DerivativeJet::d(int i, int j) const {
  if (i > j) std::swap(i, j);
  return second_.at(i * dim_ + j);
}

double DerivativeJet::d(int i, int j, int k) const {
  std::array<int, 3> idx{i, j, k};
  std::sort(idx.begin(), idx.end());
  return third_.at((idx[0] * dim_ + idx[1]) * dim_ + idx[2]);
}

void DerivativeJet::set(int i, double v) { first_.at(i) = v; }

void DerivativeJet::set(int i, int j, double v) {
  if (i > j) std::swap(i, j);
  second_.at(i * dim_ + j) = v;
}

void DerivativeJet::set(int i, int j, int k, double v) {
  std::array<int, 3> idx{i, j, k};
  std::sort(idx.begin(), idx.end());
  third_.at((idx[0] * dim_ + idx[1]) * dim_ + idx[2]) = v;
}

DerivativeJet eval_jet(const Expression& e, const Bindings& at, int order) {
  check_bindings(at);
  const int n = static_cast<int>(at.names.size());
  DerivativeJet jet(n, order);
  const node::Node& root = e.root();

  if (order == 0 || n == 0) {
    jet.set_value(evaluate(e, at));
    return jet;
  }

  if (order == 1) {
    std::vector<D1> vars(n);
    for (int i = 0; i < n; ++i) {
      for (int v = 0; v < n; ++v) vars[v] = {at.values[v], v == i ? 1.0 : 0.0};
      const D1 r = Evaluator<D1>(at.names, vars).eval(root);
      if (i == 0) jet.set_value(r.a);
      jet.set(i, r.b);
    }
  } else if (order == 2) {
    std::vector<D2> vars(n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        for (int v = 0; v < n; ++v)
          vars[v] = {{at.values[v], v == i ? 1.0 : 0.0}, {v == j ? 1.0 : 0.0, 0.0}};
        const D2 r = Evaluator<D2>(at.names, vars).eval(root);
        if (i == 0 && j == 0) jet.set_value(r.a.a);
        if (j == i) jet.set(i, r.a.b);
        jet.set(i, j, r.b.b);
      }
    }
  } else {
    std::vector<D3> vars(n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        for (int k = j; k < n; ++k) {
          for (int v = 0; v < n; ++v) {
            vars[v].a = {{at.values[v], v == i ? 1.0 : 0.0}, {v == j ? 1.0 : 0.0, 0.0}};
            vars[v].b = {{v == k ? 1.0 : 0.0, 0.0}, {0.0, 0.0}};
          }
          const D3 r = Evaluator<D3>(at.names, vars).eval(root);
          if (i == 0 && j == 0 && k == 0) jet.set_value(r.a.a.a);
          if (j == i && k == i) jet.set(i, r.a.a.b);
          if (k == j) jet.set(i, j, r.a.b.b);
          jet.set(i, j, k, r.b.b.b);
        }
      }
    }
  }

  require_finite(jet.value());
  for (int i = 0; i < n; ++i) {
    require_finite(jet.d(i));
    if (order >= 2)
      for (int j = i; j < n; ++j) {
        require_finite(jet.d(i, j));
        if (order >= 3)
          for (int k = j; k < n; ++k) require_finite(jet.d(i, j, k));
      }
  }
  return jet;
}

}  // namespace igh::expr

#include <cctype>
#include <charconv>
#include <optional>

#include "igh/expr.hpp"

namespace igh::expr {
namespace {

std::optional<Function> lookup_function(std::string_view name) {
  static constexpr Function all[] = {Function::Exp,  Function::Log,  Function::Sqrt,
                                     Function::Sin,  Function::Cos,  Function::Sinh,
                                     Function::Cosh, Function::Tanh, Function::Abs};
  for (Function f : all)
    if (function_name(f) == name) return f;
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expression parse() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    Expression e = expression();
    skip_space();
    if (pos_ != text_.size()) throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expression expression() {
    Expression lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = Expression::binary(BinaryOp::Add, lhs, term());
      } else if (accept('-')) {
        lhs = Expression::binary(BinaryOp::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expression term() {
    Expression lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expression::binary(BinaryOp::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = Expression::binary(BinaryOp::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  Expression unary() {
    if (accept('-')) return Expression::negate(unary());
    if (accept('+')) return unary();
    return power();
  }

  Expression power() {
    Expression base = primary();
    if (accept('^')) return Expression::binary(BinaryOp::Pow, base, unary());
    return base;
  }

  Expression primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expression inner = expression();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number_literal();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  Expression number_literal() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError("malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        digits();
      }
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw ParseError("malformed number", start);
    return Expression::literal(value);
  }

  Expression identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      auto fn = lookup_function(name);
      if (!fn) throw ParseError("unknown function '" + std::string(name) + "'", start);
      ++pos_;
      Expression arg = expression();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return Expression::call(*fn, arg);
    }
    if (name == "pi") return Expression::constant(NamedConstant::Pi);
    if (name == "e") return Expression::constant(NamedConstant::E);
    if (lookup_function(name))
      throw ParseError("function '" + std::string(name) + "' used without arguments", start);
    return Expression::variable(std::string(name));
  }
};

}  // namespace

Expression parse_expr(std::string_view text) { return Parser(text).parse(); }

}  // namespace igh::expr

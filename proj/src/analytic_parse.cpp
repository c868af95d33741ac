#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <string>

#include "analytic_node.hpp"
#include "cmc/analytic.hpp"
#include "cmc/error.hpp"

namespace cmc {

using detail::Node;
using detail::NodePtr;
using detail::Op;

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_const(cplx v, int parent_prec) {
  if (v.imag() == 0.0) {
    std::string s = format_number(v.real());
    return (v.real() < 0 && parent_prec > 1) ? "(" + s + ")" : s;
  }
  std::string s;
  if (v.real() != 0.0) s = format_number(v.real()) + " + ";
  s += format_number(v.imag()) + "*i";
  return "(" + s + ")";
}

// Precedences: 1 sum, 2 product, 3 power, 4 atom.
std::string print(const Node& n, int parent_prec) {
  switch (n.op) {
    case Op::Const: return format_const(n.value, parent_prec);
    case Op::Var: return "z";
    case Op::Add: {
      std::string s;
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) s += " + ";
        s += print(*n.args[i], 1);
      }
      return parent_prec > 1 ? "(" + s + ")" : s;
    }
    case Op::Mul: {
      std::string s;
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) s += "*";
        s += print(*n.args[i], 2);
      }
      return parent_prec > 2 ? "(" + s + ")" : s;
    }
    case Op::Pow: {
      const double e = n.exponent;
      std::string exponent = format_number(e);
      if (e < 0 || !detail::is_integer(e)) exponent = "(" + exponent + ")";
      std::string s = print(*n.args[0], 4) + "^" + exponent;
      return parent_prec > 3 ? "(" + s + ")" : s;
    }
    case Op::Series:
      return "taylor<" + format_number(n.series->center) + "," + std::to_string(n.series->coeffs.size()) +
             ">(" + print(*n.args[0], 0) + ")";
    default: return std::string(detail::function_name(n.op)) + "(" + print(*n.args[0], 0) + ")";
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  AnalyticFn parse_all() {
    AnalyticFn f = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::ParseError,
                what + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

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

  AnalyticFn expr() {
    AnalyticFn acc = term();
    for (;;) {
      if (accept('+')) {
        acc = acc + term();
      } else if (accept('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  AnalyticFn term() {
    AnalyticFn acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        acc = acc / unary();
      } else {
        return acc;
      }
    }
  }

  AnalyticFn unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  AnalyticFn power() {
    AnalyticFn base = primary();
    if (!accept('^')) return base;
    const AnalyticFn exponent = unary();
    const auto e = exponent.constant_value();
    if (!e || e->imag() != 0.0) fail("exponent must be a real constant");
    return pow(base, e->real());
  }

  AnalyticFn primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (accept('(')) {
      AnalyticFn inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  AnalyticFn number() {
    const std::string rest(text_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return AnalyticFn(v);
  }

  AnalyticFn identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    if (name == "z" || name == "x") return AnalyticFn::variable();
    if (name == "i") return AnalyticFn(cplx(0.0, 1.0));
    if (name == "pi") return AnalyticFn(std::numbers::pi);
    if (name == "e") return AnalyticFn(std::numbers::e);

    if (!accept('(')) fail("unknown identifier '" + name + "'");
    const AnalyticFn arg = expr();
    if (!accept(')')) fail("expected ')' after function argument");
    if (name == "exp") return exp(arg);
    if (name == "ln" || name == "log") return ln(arg);
    if (name == "sin") return sin(arg);
    if (name == "cos") return cos(arg);
    if (name == "tan") return sin(arg) / cos(arg);
    if (name == "sinh") return sinh(arg);
    if (name == "cosh") return cosh(arg);
    if (name == "tanh") return sinh(arg) / cosh(arg);
    if (name == "sqrt") return sqrt(arg);
    fail("unknown function '" + name + "'");
  }
};

}  // namespace

AnalyticFn AnalyticFn::parse(std::string_view text) { return Parser(text).parse_all(); }

std::string AnalyticFn::to_string() const { return print(*node_, 0); }

}  // namespace cmc

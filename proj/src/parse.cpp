#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <numbers>
#include <string>

#include "pdmq/error.hpp"
#include "pdmq/expr.hpp"

namespace pdmq {

namespace {

constexpr std::array kFunctions = {
    std::pair{"sqrt", Func::Sqrt},       std::pair{"exp", Func::Exp},
    std::pair{"log", Func::Log},         std::pair{"sin", Func::Sin},
    std::pair{"cos", Func::Cos},         std::pair{"tan", Func::Tan},
    std::pair{"sinh", Func::Sinh},       std::pair{"cosh", Func::Cosh},
    std::pair{"tanh", Func::Tanh},       std::pair{"arcsin", Func::Arcsin},
    std::pair{"arctan", Func::Arctan},   std::pair{"arcsinh", Func::Arcsinh},
    std::pair{"arctanh", Func::Arctanh}, std::pair{"abs", Func::Abs},
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("empty input", pos_);
    Expr e = expr();
    skip_space();
    if (pos_ != text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
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

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(BinOp::Add, lhs, term());
      } else if (accept('-')) {
        lhs = Expr::binary(BinOp::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(BinOp::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = Expr::binary(BinOp::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return Expr::negate(unary());
    return power();
  }

  Expr power() {
    Expr base = primary();
    skip_space();
    const std::size_t at = pos_;
    if (accept('^')) {
      Expr exponent = unary();
      if (depends_on_x(exponent)) throw ParseError("exponent must not depend on x", at);
      return Expr::binary(BinOp::Pow, base, exponent);
    }
    return base;
  }

  Expr primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t count = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) throw ParseError("malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw ParseError("malformed exponent", mark);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) throw ParseError("malformed number", start);
    return Expr(value);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view ident = text_.substr(start, pos_ - start);
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      for (const auto& [name, f] : kFunctions) {
        if (ident == name) {
          ++pos_;
          Expr arg = expr();
          expect(')');
          return Expr::apply(f, arg);
        }
      }
      throw ParseError("unknown function '" + std::string(ident) + "'", start);
    }
    if (ident == "x") return Expr::variable();
    if (ident == "pi") return Expr(std::numbers::pi);
    return Expr::parameter(std::string(ident));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Binding strength used by the printer.
enum Prec { kAdd = 1, kMul = 2, kUnary = 3, kPow = 4, kAtom = 5 };

int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Negate: return kUnary;
    case Expr::Kind::Binary:
      switch (e.op()) {
        case BinOp::Add:
        case BinOp::Sub: return kAdd;
        case BinOp::Mul:
        case BinOp::Div: return kMul;
        case BinOp::Pow: return kPow;
      }
      break;
    case Expr::Kind::Constant: return e.value() < 0 ? kUnary : kAtom;
    default: return kAtom;
  }
  return kAtom;
}

std::string format_number(double v) {
  if (v == std::numbers::pi) return "pi";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // shortest representation that round-trips
  for (int digits = 1; digits < 17; ++digits) {
    char trial[32];
    std::snprintf(trial, sizeof trial, "%.*g", digits, v);
    double back = 0.0;
    std::from_chars(trial, trial + std::char_traits<char>::length(trial), back);
    if (back == v) return trial;
  }
  return buf;
}

void print(const Expr& e, std::string& out);

void print_child(const Expr& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print(child, out);
    out += ')';
  } else {
    print(child, out);
  }
}

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Constant: {
      const double v = e.value();
      if (v < 0) {
        out += '-';
        out += format_number(-v);
      } else {
        out += format_number(v);
      }
      return;
    }
    case Expr::Kind::Variable: out += 'x'; return;
    case Expr::Kind::Parameter: out += e.name(); return;
    case Expr::Kind::Sampled:
      out += "sampled";
      out.append(static_cast<std::size_t>(e.order()), '\'');
      return;
    case Expr::Kind::Negate:
      out += '-';
      print_child(e.arg(), kUnary, out);
      return;
    case Expr::Kind::Function:
      out += func_name(e.func());
      out += '(';
      print(e.arg(), out);
      out += ')';
      return;
    case Expr::Kind::Binary: {
      const int p = precedence(e);
      if (e.op() == BinOp::Pow) {
        print_child(e.lhs(), kAtom, out);
        out += '^';
        print_child(e.rhs(), kUnary, out);
        return;
      }
      print_child(e.lhs(), p, out);
      switch (e.op()) {
        case BinOp::Add: out += " + "; break;
        case BinOp::Sub: out += " - "; break;
        case BinOp::Mul: out += '*'; break;
        case BinOp::Div: out += '/'; break;
        case BinOp::Pow: break;
      }
      // right operands of the same level keep parentheses so the tree shape survives
      print_child(e.rhs(), p + 1, out);
      return;
    }
  }
}

}  // namespace

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

}  // namespace pdmq

#pragma once

// Symbolic expressions in one spatial variable `x` and named real parameters.
//
// Expr is an immutable tree with value semantics: copies share nodes, and no
// operation mutates an existing tree. Every operation here is pure and may be
// called concurrently.

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

#include "pdmq/interp.hpp"

namespace pdmq {

using Bindings = std::map<std::string, double, std::less<>>;

enum class Func {
  Sqrt, Exp, Log, Sin, Cos, Tan, Sinh, Cosh, Tanh, Arcsin, Arctan, Arcsinh, Arctanh, Abs
};

enum class BinOp { Add, Sub, Mul, Div, Pow };

std::string_view func_name(Func f);

class Expr {
 public:
  enum class Kind { Constant, Variable, Parameter, Negate, Function, Binary, Sampled };

  /// The constant 0.
  Expr();
  /// Implicit so that `2.0 * e` and `e + 1` read naturally.
  Expr(double value);  // NOLINT(google-explicit-constructor)

  static Expr variable();
  static Expr parameter(std::string name);
  /// Tabulated function of x. `order` selects a derivative of the interpolant.
  static Expr sampled(std::shared_ptr<const UniformCubicSpline> table, int order = 0);

  static Expr negate(Expr arg);
  static Expr apply(Func f, Expr arg);
  static Expr binary(BinOp op, Expr lhs, Expr rhs);

  Kind kind() const;
  double value() const;              // Constant
  const std::string& name() const;   // Parameter
  Func func() const;                 // Function
  BinOp op() const;                  // Binary
  const Expr& arg() const;           // Negate, Function
  const Expr& lhs() const;           // Binary
  const Expr& rhs() const;           // Binary
  const UniformCubicSpline& table() const;  // Sampled
  const std::shared_ptr<const UniformCubicSpline>& table_ptr() const;
  int order() const;                 // Sampled

  bool is_constant() const { return kind() == Kind::Constant; }
  bool is_constant(double v) const { return is_constant() && value() == v; }

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

Expr operator-(const Expr& e);
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, const Expr& exponent);

Expr sqrt(const Expr& e);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr tan(const Expr& e);
Expr sinh(const Expr& e);
Expr cosh(const Expr& e);
Expr tanh(const Expr& e);
Expr arcsin(const Expr& e);
Expr arctan(const Expr& e);
Expr arcsinh(const Expr& e);
Expr arctanh(const Expr& e);
Expr abs(const Expr& e);

/// Parses the text grammar:
///   expr    := term (('+'|'-') term)*
///   term    := unary (('*'|'/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          (right-associative)
///   primary := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
/// `x` is the variable, `pi` the constant, any other bare IDENT a parameter.
Expr parse_expr(std::string_view text);

/// Evaluates at x. Throws DomainFault or UnboundParameter.
template <typename Scalar>
Scalar evaluate(const Expr& e, Scalar x, const Bindings& bindings = {});

inline double eval_expr(const Expr& e, double x, const Bindings& bindings = {}) {
  return evaluate<double>(e, x, bindings);
}

/// Exact derivative with respect to x; parameters are constants.
Expr diff_expr(const Expr& e);
/// n-th derivative.
Expr diff_expr(const Expr& e, int n);

/// Constant folding and the identities 0*e, e+0, e*1, e^1, --e.
Expr simplify(const Expr& e);

/// Replaces bound parameters by constants (and folds what becomes constant).
Expr substitute(const Expr& e, const Bindings& bindings);

/// Renders in the parse grammar with the minimal parentheses that preserve
/// the tree shape. Sampled nodes print as `sampled'...` and do not re-parse.
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);
bool depends_on_x(const Expr& e);
std::set<std::string> free_parameters(const Expr& e);
std::size_t node_count(const Expr& e);

/// Evaluator with parameters pre-substituted, for hot loops.
class BoundExpr {
 public:
  BoundExpr() = default;
  BoundExpr(const Expr& e, const Bindings& bindings);
  double operator()(double x) const { return evaluate<double>(expr_, x); }
  const Expr& expr() const { return expr_; }

 private:
  Expr expr_;
};

}  // namespace pdmq

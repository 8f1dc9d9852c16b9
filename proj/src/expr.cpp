#include "pdmq/expr.hpp"

#include <cmath>
#include <optional>
#include <utility>

#include "pdmq/error.hpp"

namespace pdmq {

struct Expr::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;
  std::string name;
  Func func = Func::Sqrt;
  BinOp op = BinOp::Add;
  Expr a;
  Expr b;
  std::shared_ptr<const UniformCubicSpline> table;
  int order = 0;
};

std::string_view func_name(Func f) {
  switch (f) {
    case Func::Sqrt: return "sqrt";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    case Func::Tanh: return "tanh";
    case Func::Arcsin: return "arcsin";
    case Func::Arctan: return "arctan";
    case Func::Arcsinh: return "arcsinh";
    case Func::Arctanh: return "arctanh";
    case Func::Abs: return "abs";
  }
  return "?";
}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr::Expr() : node_(nullptr) {}

Expr::Expr(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value;
  node_ = std::move(n);
}

Expr Expr::variable() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  return Expr(std::move(n));
}

Expr Expr::parameter(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Parameter;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::sampled(std::shared_ptr<const UniformCubicSpline> table, int order) {
  if (!table) throw InvalidArgument("sampled expression needs a table");
  if (order > 3) return Expr(0.0);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sampled;
  n->table = std::move(table);
  n->order = order;
  return Expr(std::move(n));
}

Expr Expr::negate(Expr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Negate;
  n->a = std::move(arg);
  return Expr(std::move(n));
}

Expr Expr::apply(Func f, Expr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Function;
  n->func = f;
  n->a = std::move(arg);
  return Expr(std::move(n));
}

Expr Expr::binary(BinOp op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->op = op;
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_ ? node_->kind : Kind::Constant; }
double Expr::value() const { return node_ ? node_->value : 0.0; }
const std::string& Expr::name() const { return node_->name; }
Func Expr::func() const { return node_->func; }
BinOp Expr::op() const { return node_->op; }
const Expr& Expr::arg() const { return node_->a; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }
const UniformCubicSpline& Expr::table() const { return *node_->table; }
const std::shared_ptr<const UniformCubicSpline>& Expr::table_ptr() const { return node_->table; }
int Expr::order() const { return node_->order; }

// Builders apply only the trivial identities so derived trees stay small;
// simplify() does the full pass.

Expr operator-(const Expr& e) {
  if (e.is_constant()) return Expr(-e.value());
  if (e.kind() == Expr::Kind::Negate) return e.arg();
  return Expr::negate(e);
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (a.is_constant() && b.is_constant()) return Expr(a.value() + b.value());
  return Expr::binary(BinOp::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  if (a.is_constant() && b.is_constant()) return Expr(a.value() - b.value());
  return Expr::binary(BinOp::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant() && b.is_constant()) return Expr(a.value() * b.value());
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  return Expr::binary(BinOp::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr(0.0);
  if (a.is_constant() && b.is_constant() && b.value() != 0.0) return Expr(a.value() / b.value());
  return Expr::binary(BinOp::Div, a, b);
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (depends_on_x(exponent)) throw InvalidArgument("exponent must not depend on x");
  if (exponent.is_constant(1.0)) return base;
  if (exponent.is_constant(0.0)) return Expr(1.0);
  if (base.is_constant(1.0)) return Expr(1.0);
  return Expr::binary(BinOp::Pow, base, exponent);
}

Expr sqrt(const Expr& e) { return Expr::apply(Func::Sqrt, e); }
Expr exp(const Expr& e) { return Expr::apply(Func::Exp, e); }
Expr log(const Expr& e) { return Expr::apply(Func::Log, e); }
Expr sin(const Expr& e) { return Expr::apply(Func::Sin, e); }
Expr cos(const Expr& e) { return Expr::apply(Func::Cos, e); }
Expr tan(const Expr& e) { return Expr::apply(Func::Tan, e); }
Expr sinh(const Expr& e) { return Expr::apply(Func::Sinh, e); }
Expr cosh(const Expr& e) { return Expr::apply(Func::Cosh, e); }
Expr tanh(const Expr& e) { return Expr::apply(Func::Tanh, e); }
Expr arcsin(const Expr& e) { return Expr::apply(Func::Arcsin, e); }
Expr arctan(const Expr& e) { return Expr::apply(Func::Arctan, e); }
Expr arcsinh(const Expr& e) { return Expr::apply(Func::Arcsinh, e); }
Expr arctanh(const Expr& e) { return Expr::apply(Func::Arctanh, e); }
Expr abs(const Expr& e) { return Expr::apply(Func::Abs, e); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

template <typename Scalar>
Scalar checked(Scalar v, const char* what) {
  using std::isfinite;
  if (!isfinite(v)) throw DomainFault(std::string("non-finite result in ") + what);
  return v;
}

template <typename Scalar>
Scalar apply_func(Func f, Scalar u) {
  using std::abs, std::acos, std::asin, std::asinh, std::atan, std::atanh, std::cos, std::cosh,
      std::exp, std::log, std::sin, std::sinh, std::sqrt, std::tan, std::tanh;
  switch (f) {
    case Func::Sqrt:
      if (u < 0) throw DomainFault("sqrt of negative value");
      return sqrt(u);
    case Func::Exp: return checked(exp(u), "exp");
    case Func::Log:
      if (!(u > 0)) throw DomainFault("log of non-positive value");
      return log(u);
    case Func::Sin: return sin(u);
    case Func::Cos: return cos(u);
    case Func::Tan: return checked(tan(u), "tan");
    case Func::Sinh: return checked(sinh(u), "sinh");
    case Func::Cosh: return checked(cosh(u), "cosh");
    case Func::Tanh: return tanh(u);
    case Func::Arcsin:
      if (abs(u) > 1) throw DomainFault("arcsin argument outside [-1, 1]");
      return asin(u);
    case Func::Arctan: return atan(u);
    case Func::Arcsinh: return asinh(u);
    case Func::Arctanh:
      if (!(abs(u) < 1)) throw DomainFault("arctanh argument outside (-1, 1)");
      return atanh(u);
    case Func::Abs: return abs(u);
  }
  return u;
}

template <typename Scalar>
Scalar eval_node(const Expr& e, Scalar x, const Bindings& b) {
  using std::pow, std::isfinite;
  switch (e.kind()) {
    case Expr::Kind::Constant: return static_cast<Scalar>(e.value());
    case Expr::Kind::Variable: return x;
    case Expr::Kind::Parameter: {
      auto it = b.find(e.name());
      if (it == b.end()) throw UnboundParameter(e.name());
      return static_cast<Scalar>(it->second);
    }
    case Expr::Kind::Negate: return -eval_node(e.arg(), x, b);
    case Expr::Kind::Function: return apply_func(e.func(), eval_node(e.arg(), x, b));
    case Expr::Kind::Sampled:
      return static_cast<Scalar>(e.table().evaluate(static_cast<double>(x), e.order()));
    case Expr::Kind::Binary: {
      const Scalar l = eval_node(e.lhs(), x, b);
      const Scalar r = eval_node(e.rhs(), x, b);
      switch (e.op()) {
        case BinOp::Add: return checked(l + r, "+");
        case BinOp::Sub: return checked(l - r, "-");
        case BinOp::Mul: return checked(l * r, "*");
        case BinOp::Div:
          if (r == 0) throw DomainFault("division by zero");
          return checked(l / r, "/");
        case BinOp::Pow:
          if (l < 0 && r != std::floor(r)) throw DomainFault("negative base with non-integer exponent");
          if (l == 0 && r < 0) throw DomainFault("zero base with negative exponent");
          return checked(static_cast<Scalar>(pow(l, r)), "^");
      }
    }
  }
  return Scalar(0);
}

}  // namespace

template <typename Scalar>
Scalar evaluate(const Expr& e, Scalar x, const Bindings& bindings) {
  return eval_node<Scalar>(e, x, bindings);
}

template double evaluate<double>(const Expr&, double, const Bindings&);
template long double evaluate<long double>(const Expr&, long double, const Bindings&);

// ---------------------------------------------------------------------------
// Structure queries

bool depends_on_x(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
    case Expr::Kind::Parameter: return false;
    case Expr::Kind::Variable:
    case Expr::Kind::Sampled: return true;
    case Expr::Kind::Negate:
    case Expr::Kind::Function: return depends_on_x(e.arg());
    case Expr::Kind::Binary: return depends_on_x(e.lhs()) || depends_on_x(e.rhs());
  }
  return false;
}

namespace {
void collect_parameters(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case Expr::Kind::Parameter: out.insert(e.name()); break;
    case Expr::Kind::Negate:
    case Expr::Kind::Function: collect_parameters(e.arg(), out); break;
    case Expr::Kind::Binary:
      collect_parameters(e.lhs(), out);
      collect_parameters(e.rhs(), out);
      break;
    default: break;
  }
}
}  // namespace

std::set<std::string> free_parameters(const Expr& e) {
  std::set<std::string> out;
  collect_parameters(e, out);
  return out;
}

std::size_t node_count(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Negate:
    case Expr::Kind::Function: return 1 + node_count(e.arg());
    case Expr::Kind::Binary: return 1 + node_count(e.lhs()) + node_count(e.rhs());
    default: return 1;
  }
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Constant: return a.value() == b.value();
    case Expr::Kind::Variable: return true;
    case Expr::Kind::Parameter: return a.name() == b.name();
    case Expr::Kind::Negate: return structurally_equal(a.arg(), b.arg());
    case Expr::Kind::Function: return a.func() == b.func() && structurally_equal(a.arg(), b.arg());
    case Expr::Kind::Binary:
      return a.op() == b.op() && structurally_equal(a.lhs(), b.lhs()) &&
             structurally_equal(a.rhs(), b.rhs());
    case Expr::Kind::Sampled: return a.table_ptr() == b.table_ptr() && a.order() == b.order();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Differentiation

Expr diff_expr(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
    case Expr::Kind::Parameter: return Expr(0.0);
    case Expr::Kind::Variable: return Expr(1.0);
    case Expr::Kind::Sampled: return Expr::sampled(e.table_ptr(), e.order() + 1);
    case Expr::Kind::Negate: return -diff_expr(e.arg());
    case Expr::Kind::Binary: {
      const Expr& u = e.lhs();
      const Expr& v = e.rhs();
      switch (e.op()) {
        case BinOp::Add: return diff_expr(u) + diff_expr(v);
        case BinOp::Sub: return diff_expr(u) - diff_expr(v);
        case BinOp::Mul: return diff_expr(u) * v + u * diff_expr(v);
        case BinOp::Div: {
          const Expr du = diff_expr(u), dv = diff_expr(v);
          if (dv.is_constant(0.0)) return du / v;
          return (du * v - u * dv) / pow(v, 2.0);
        }
        case BinOp::Pow: {
          if (depends_on_x(v)) throw InvalidArgument("exponent must not depend on x");
          const Expr reduced = v.is_constant() ? Expr(v.value() - 1.0) : v - 1.0;
          return v * pow(u, reduced) * diff_expr(u);
        }
      }
      break;
    }
    case Expr::Kind::Function: {
      const Expr& u = e.arg();
      const Expr du = diff_expr(u);
      if (du.is_constant(0.0)) return Expr(0.0);
      switch (e.func()) {
        case Func::Sqrt: return du / (2.0 * e);
        case Func::Exp: return e * du;
        case Func::Log: return du / u;
        case Func::Sin: return cos(u) * du;
        case Func::Cos: return -(sin(u) * du);
        case Func::Tan: return du / pow(cos(u), 2.0);
        case Func::Sinh: return cosh(u) * du;
        case Func::Cosh: return sinh(u) * du;
        case Func::Tanh: return du / pow(cosh(u), 2.0);
        case Func::Arcsin: return du / sqrt(1.0 - pow(u, 2.0));
        case Func::Arctan: return du / (1.0 + pow(u, 2.0));
        case Func::Arcsinh: return du / sqrt(1.0 + pow(u, 2.0));
        case Func::Arctanh: return du / (1.0 - pow(u, 2.0));
        case Func::Abs: return (u / e) * du;  // discontinuous at u = 0
      }
      break;
    }
  }
  return Expr(0.0);
}

Expr diff_expr(const Expr& e, int n) {
  Expr out = e;
  for (int i = 0; i < n; ++i) out = simplify(diff_expr(out));
  return out;
}

// ---------------------------------------------------------------------------
// Simplification

namespace {

std::optional<double> try_fold(const Expr& e) {
  try {
    const double v = evaluate<double>(e, 0.0);
    if (std::isfinite(v)) return v;
  } catch (const Error&) {
  }
  return std::nullopt;
}

}  // namespace

Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
    case Expr::Kind::Variable:
    case Expr::Kind::Parameter:
    case Expr::Kind::Sampled: return e;
    case Expr::Kind::Negate: {
      Expr a = simplify(e.arg());
      if (a.is_constant()) return Expr(-a.value());
      if (a.kind() == Expr::Kind::Negate) return a.arg();
      return Expr::negate(a);
    }
    case Expr::Kind::Function: {
      Expr a = simplify(e.arg());
      Expr out = Expr::apply(e.func(), a);
      if (a.is_constant())
        if (auto v = try_fold(out)) return Expr(*v);
      return out;
    }
    case Expr::Kind::Binary: {
      Expr l = simplify(e.lhs());
      Expr r = simplify(e.rhs());
      Expr out;
      switch (e.op()) {
        case BinOp::Add: out = l + r; break;
        case BinOp::Sub: out = l - r; break;
        case BinOp::Mul: out = l * r; break;
        case BinOp::Div:
          if (r.is_constant(0.0)) return Expr::binary(BinOp::Div, l, r);
          out = l / r;
          break;
        case BinOp::Pow: out = pow(l, r); break;
      }
      if (out.kind() == Expr::Kind::Binary && out.lhs().is_constant() && out.rhs().is_constant())
        if (auto v = try_fold(out)) return Expr(*v);
      return out;
    }
  }
  return e;
}

Expr substitute(const Expr& e, const Bindings& bindings) {
  switch (e.kind()) {
    case Expr::Kind::Parameter: {
      auto it = bindings.find(e.name());
      return it == bindings.end() ? e : Expr(it->second);
    }
    case Expr::Kind::Negate: return simplify(Expr::negate(substitute(e.arg(), bindings)));
    case Expr::Kind::Function: return simplify(Expr::apply(e.func(), substitute(e.arg(), bindings)));
    case Expr::Kind::Binary:
      return simplify(Expr::binary(e.op(), substitute(e.lhs(), bindings), substitute(e.rhs(), bindings)));
    default: return e;
  }
}

BoundExpr::BoundExpr(const Expr& e, const Bindings& bindings) : expr_(substitute(e, bindings)) {
  for (const auto& name : free_parameters(expr_)) throw UnboundParameter(name);
}

}  // namespace pdmq

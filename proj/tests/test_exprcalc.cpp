#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "pdmq/error.hpp"
#include "pdmq/expr.hpp"
#include "pdmq/interp.hpp"
#include "pdmq/quadrature.hpp"

using namespace pdmq;

namespace {

double central_difference(const Expr& e, double x, const Bindings& b) {
  const double h = 1e-5 * std::max(1.0, std::abs(x));
  return (eval_expr(e, x + h, b) - eval_expr(e, x - h, b)) / (2.0 * h);
}

// Derivative vs central differences at n points of (lo, hi).
double fd_mismatch(const std::string& text, const Bindings& b, double lo, double hi, int n = 20) {
  const Expr e = parse_expr(text);
  const Expr d = diff_expr(e);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(lo, hi);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = u(gen);
    const double fd = central_difference(e, x, b);
    worst = std::max(worst, std::abs(eval_expr(d, x, b) - fd) / std::max(1.0, std::abs(fd)));
  }
  return worst;
}

}  // namespace

TEST_CASE("parse: node shapes and parameters") {
  CHECK(parse_expr("x").kind() == Expr::Kind::Variable);
  CHECK(parse_expr("2.5e-1").value() == doctest::Approx(0.25));
  const Expr m = parse_expr("1/(1 - k*x^2)");
  CHECK(free_parameters(m) == std::set<std::string>{"k"});
  CHECK(depends_on_x(m));
  CHECK(free_parameters(parse_expr("arcsinh(L*x)^2/(2*L^2)")) == std::set<std::string>{"L"});
  CHECK_FALSE(depends_on_x(parse_expr("2*L + 1")));
}

TEST_CASE("parse: precedence and associativity") {
  CHECK(eval_expr(parse_expr("-x^2"), 3.0) == doctest::Approx(-9.0));
  CHECK(eval_expr(parse_expr("2^3^2"), 0.0) == doctest::Approx(512.0));
  CHECK(eval_expr(parse_expr("8/4/2"), 0.0) == doctest::Approx(1.0));
  CHECK(eval_expr(parse_expr("1 - 2 - 3"), 0.0) == doctest::Approx(-4.0));
  CHECK(eval_expr(parse_expr("2*-x"), 1.5) == doctest::Approx(-3.0));
  CHECK(eval_expr(parse_expr("pi"), 0.0) == doctest::Approx(M_PI));
}

TEST_CASE("parse: errors carry offsets") {
  for (const char* bad : {"", "1 +", "(x", "x)", "foo(x)", "1 $ 2", "2^x", "sin x"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_expr(bad), ParseError);
  }
  try {
    parse_expr("1 + * 2");
    FAIL("no throw");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
}

TEST_CASE("evaluate: arithmetic and domain faults") {
  CHECK(eval_expr(parse_expr("1/(1-k*x^2)"), 0.0, {{"k", 1.0}}) == 1.0);
  CHECK(eval_expr(parse_expr("arctanh(x)"), 0.0) == 0.0);
  CHECK(eval_expr(parse_expr("1/(1+L*x)^2"), 1.0, {{"L", 1.0}}) == doctest::Approx(0.25));
  CHECK_THROWS_AS(eval_expr(parse_expr("log(x)"), -1.0), DomainFault);
  CHECK_THROWS_AS(eval_expr(parse_expr("arctanh(x)"), 1.0), DomainFault);
  CHECK_THROWS_AS(eval_expr(parse_expr("1/x"), 0.0), DomainFault);
  CHECK_THROWS_AS(eval_expr(parse_expr("sqrt(x)"), -0.1), DomainFault);
  CHECK_THROWS_AS(eval_expr(parse_expr("k*x"), 1.0), UnboundParameter);
}

TEST_CASE("diff: closed forms") {
  const Bindings k{{"k", 0.7}};
  const Expr d = diff_expr(parse_expr("1/(1 - k*x^2)"));
  const Expr oracle = parse_expr("2*k*x/(1 - k*x^2)^2");
  for (double x : {-0.9, -0.3, 0.0, 0.4, 1.1}) CHECK(eval_expr(d, x, k) == doctest::Approx(eval_expr(oracle, x, k)));

  const Bindings L{{"L", 1.3}};
  const Expr da = diff_expr(parse_expr("arcsinh(L*x)"));
  for (double x : {-2.0, 0.5, 3.0}) CHECK(eval_expr(da, x, L) == doctest::Approx(1.3 / std::sqrt(1 + 1.69 * x * x)));

  CHECK(simplify(diff_expr(parse_expr("c"))).is_constant(0.0));
  CHECK(simplify(diff_expr(parse_expr("3.5"))).is_constant(0.0));
}

TEST_CASE("diff: finite-difference oracle over the function set") {
  const Bindings b{{"k", 0.4}, {"L", 0.8}};
  struct Case {
    const char* text;
    double lo, hi;
  };
  for (const Case& c : std::vector<Case>{{"1/(1 - k*x^2)", -1.2, 1.2},
                                         {"arcsinh(L*x)^2/(2*L^2)", -3, 3},
                                         {"log(1 + L*x)^2/(2*L^2)", -1.0, 4},
                                         {"arctanh(L*x)^2/(2*L^2)", -1.1, 1.1},
                                         {"sqrt(1 + x^2)*exp(-x)", -2, 2},
                                         {"sin(x)*cos(2*x) + tan(x/3)", -1, 1},
                                         {"sinh(x)/cosh(x) - tanh(x) + x^3", -2, 2},
                                         {"arcsin(x/2) + arctan(x)", -1.5, 1.5},
                                         {"(1 - k*x^2)^-0.5", -1.2, 1.2},
                                         {"abs(x - 0.1)*x", 0.2, 2}}) {
    CAPTURE(c.text);
    CHECK(fd_mismatch(c.text, b, c.lo, c.hi) < 1e-8);
  }
}

TEST_CASE("simplify: identity, folding and annihilator rules") {
  CHECK(structurally_equal(simplify(parse_expr("(x*1) + 0")), Expr::variable()));
  CHECK(simplify(parse_expr("2*3")).is_constant(6.0));
  CHECK(simplify(parse_expr("0*arctanh(x)")).is_constant(0.0));
  CHECK(structurally_equal(simplify(parse_expr("x^1")), Expr::variable()));
  CHECK(simplify(parse_expr("x^0")).is_constant(1.0));
  CHECK(node_count(simplify(parse_expr("1*(x + 0)*1 - 0"))) == 1);
}

TEST_CASE("simplify and substitute preserve values") {
  const Bindings b{{"k", 0.3}, {"L", 2.0}};
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const char* text : {"1/(1 - k*x^2) + 0*x", "arcsinh(L*x)^2/(2*L^2)*1", "(x + 0)^2 - k*(x - x)"}) {
    const Expr e = parse_expr(text);
    const Expr s = simplify(e);
    const Expr bound = substitute(e, b);
    CHECK(free_parameters(bound).empty());
    CHECK(node_count(s) <= node_count(e));
    for (int i = 0; i < 10; ++i) {
      const double x = u(gen);
      CHECK(eval_expr(s, x, b) == doctest::Approx(eval_expr(e, x, b)).epsilon(1e-14));
      CHECK(eval_expr(bound, x) == doctest::Approx(eval_expr(e, x, b)).epsilon(1e-14));
    }
  }
}

TEST_CASE("printing round-trips through the parser") {
  for (const char* text : {"1/(1 - k*x^2)", "-x^2", "(-x)^2", "2^3^2", "(2^3)^2", "a - (b - c)", "a/(b*c)",
                           "arcsinh(L*x)^2/(2*L^2)", "-(x + 1)*3", "x^-0.5"}) {
    CAPTURE(text);
    const Expr e = parse_expr(text);
    const std::string once = to_string(e);
    CHECK(to_string(parse_expr(once)) == once);
    CHECK(structurally_equal(parse_expr(once), e));
  }
}

TEST_CASE("evaluation in extended precision") {
  const Expr e = parse_expr("sqrt(1 + x^2)");
  CHECK(evaluate<double>(e, 0.75) == doctest::Approx(1.25));
  CHECK(evaluate<long double>(e, 0.75L) == doctest::Approx(1.25));
}

TEST_CASE("bound expressions ignore later changes to bindings") {
  Bindings b{{"k", 0.5}};
  const BoundExpr f(parse_expr("k*x"), b);
  b["k"] = 9.0;
  CHECK(f(2.0) == doctest::Approx(1.0));
}

TEST_CASE("sampled nodes differentiate through the spline") {
  Eigen::VectorXd v(201);
  for (int i = 0; i < 201; ++i) v[i] = std::sin(-1.0 + 0.01 * i);
  const auto table = std::make_shared<const UniformCubicSpline>(-1.0, 0.01, v);
  const Expr s = Expr::sampled(table);
  CHECK(eval_expr(s, 0.3) == doctest::Approx(std::sin(0.3)).epsilon(1e-8));
  CHECK(eval_expr(diff_expr(s), 0.3) == doctest::Approx(std::cos(0.3)).epsilon(1e-5));
}

TEST_CASE("quadrature: smooth and endpoint-singular integrands") {
  const auto r = integrate_gk([](double x) { return std::exp(x); }, 0.0, 1.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  const auto lim = integrate_to_endpoint([](double x) { return 1.0 / std::sqrt(1.0 - x * x); }, 0.0, 1.0);
  CHECK(lim.finite);
  CHECK(lim.value == doctest::Approx(M_PI / 2).epsilon(1e-9));
  const auto inf = integrate_to_endpoint([](double x) { return 1.0 / (1.0 + x); }, 0.0, INFINITY);
  CHECK_FALSE(inf.finite);
}

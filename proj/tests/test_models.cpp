#include <doctest.h>

#include <cmath>
#include <json.hpp>

#include "pdmq/error.hpp"
#include "pdmq/models.hpp"
#include "pdmq/spectral.hpp"

using namespace pdmq;

namespace {

// sup over [-2, 2] of |m - 1| + |V - x^2/2|
double distance_from_oscillator(const ProblemDef& p) {
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = -2.0 + 0.01 * i;
    worst = std::max({worst, std::abs(p.m(x) - 1.0), std::abs(p.V(x) - 0.5 * x * x)});
  }
  return worst;
}

}  // namespace

TEST_CASE("registry contents") {
  const auto& reg = model_registry();
  REQUIRE(reg.size() == 4);
  CHECK(reg[0].name == "quasi-harmonic-k");
  CHECK(find_model("log-osc").parameters.at(0).name == "L");
  CHECK_THROWS_AS(find_model("morse"), InvalidArgument);
  const auto j = nlohmann::json::parse(models_json());
  CHECK(j.size() == 4);
  CHECK(j[1]["name"] == "arcsinh-osc");
}

TEST_CASE("model definitions") {
  const ProblemDef a = builtin("arcsinh-osc", {{"L", 1.0}});
  CHECK(a.m(1.0) == doctest::Approx(0.5));
  CHECK(a.V(1.0) == doctest::Approx(0.5 * std::pow(std::asinh(1.0), 2)));

  const ProblemDef flat = builtin("quasi-harmonic-k", {{"k", 0.0}});
  for (double x : {-3.0, 0.5, 7.0}) {
    CHECK(flat.m(x) == 1.0);
    CHECK(flat.V(x) == 0.5 * x * x);
  }
  CHECK(flat.domain.lower_kind == EndpointKind::Infinite);

  const ProblemDef l = builtin("log-osc", {{"L", 2.0}});
  CHECK(l.domain.lower == -0.5);
  CHECK(l.domain.lower_kind == EndpointKind::SingularMassBlowup);
  CHECK(std::isinf(l.domain.upper));

  const ProblemDef k = builtin("quasi-harmonic-k", {{"k", 0.25}});
  CHECK(k.domain.upper == doctest::Approx(2.0));
  const ProblemDef t = builtin("arctanh-osc", {{"L", 0.5}});
  CHECK(t.domain.lower == doctest::Approx(-2.0));
}

TEST_CASE("parameter handling") {
  CHECK(builtin("arcsinh-osc").bindings.at("L") == 1.0);
  CHECK(builtin("quasi-harmonic-k", {{"l", 0.3}}).bindings.at("k") == doctest::Approx(-0.3));
  CHECK_THROWS_AS(builtin("arcsinh-osc", {{"L", 0.0}}), InvalidArgument);
  CHECK_THROWS_AS(builtin("log-osc", {{"L", -1.0}}), InvalidArgument);
  CHECK_THROWS_AS(builtin("log-osc", {{"q", 1.0}}), InvalidArgument);
  CHECK_THROWS_AS(builtin("quasi-harmonic-k", {{"k", 0.1}, {"l", 0.1}}), InvalidArgument);
}

TEST_CASE("instantiations are valid problems") {
  for (double p : {0.25, 0.5, 1.0}) {
    for (const char* name : {"arcsinh-osc", "log-osc", "arctanh-osc"}) CHECK_NOTHROW(builtin(name, {{"L", p}}).validate());
  }
  for (double k : {-1.0, -0.5, 0.5, 1.0}) CHECK_NOTHROW(builtin("quasi-harmonic-k", {{"k", k}}).validate());
}

TEST_CASE("small-parameter limits approach the harmonic oscillator") {
  // m and V deviate at O(p) for quasi-harmonic-k and log-osc, O(p^2) for the even Lambda models
  struct Case {
    const char* name;
    const char* param;
    double rate;
  };
  for (const Case& c : {Case{"quasi-harmonic-k", "k", 10.0}, Case{"arcsinh-osc", "L", 100.0},
                        Case{"log-osc", "L", 10.0}, Case{"arctanh-osc", "L", 100.0}}) {
    CAPTURE(c.name);
    const double d2 = distance_from_oscillator(builtin(c.name, {{c.param, 1e-2}}));
    const double d3 = distance_from_oscillator(builtin(c.name, {{c.param, 1e-3}}));
    CHECK(d3 < d2);
    CHECK(d2 / d3 == doctest::Approx(c.rate).epsilon(0.05));
  }
}

TEST_CASE("unit scaling") {
  CHECK(to_dimensionless({1.0, 1.0, 1.0}, 0.5, CouplingKind::Lambda).value == doctest::Approx(0.5));
  CHECK(to_dimensionless({2.0, 1.0, 2.0}, 1.0, CouplingKind::Lambda).value == doctest::Approx(1.0));
  const ScalingMap map({2.0, 1.0, 3.0});
  CHECK(map.energy_from(0.5) == doctest::Approx(3.0));
  CHECK(map.e_from(map.energy_from(1.7)) == doctest::Approx(1.7));
  CHECK(map.x_from(map.x_tilde_from(0.3)) == doctest::Approx(0.3));
  for (CouplingKind kind : {CouplingKind::Lambda, CouplingKind::Kappa}) {
    const Dimensionless d = to_dimensionless({0.7, 2.5, 1.3}, 0.9, kind);
    CHECK(from_dimensionless(d.map, d.value, kind) == doctest::Approx(0.9));
  }
  CHECK_THROWS_AS(ScalingMap({0.0, 1.0, 1.0}), InvalidArgument);
}

TEST_CASE("dimensional problem matches the scaled spectrum") {
  // m = m0/(1 + l^2 x^2), V = m0 a^2 arcsinh(l x)^2/(2 l^2); E_n = hbar a (n + 1/2)
  const Units u{2.0, 1.5, 3.0};
  const double lambda = 0.8;
  ProblemDef p;
  p.mass = parse_expr("m0/(1 + l^2*x^2)");
  p.potential = parse_expr("m0*a^2*arcsinh(l*x)^2/(2*l^2)");
  p.bindings = {{"m0", u.m0}, {"a", u.alpha}, {"l", lambda}};
  p.domain = Domain::real_line();
  const Dimensionless d = to_dimensionless(u, lambda, CouplingKind::Lambda);
  SolveRequest rs;
  rs.k = 3;
  rs.N_list = {1000, 2000};
  const SolveOutcome scaled_run = solve_problem(builtin("arcsinh-osc", {{"L", d.value}}), rs);
  const Spectrum& scaled = scaled_run.spectrum;

  // same box: y = sqrt(m0) * length * y~
  SolveRequest r = rs;
  r.hbar = u.hbar;
  r.y_cut = std::sqrt(u.m0) * d.map.length() * scaled_run.box.yR;
  const Spectrum dim = solve_problem(p, r).spectrum;
  for (int n = 0; n < 3; ++n) {
    CHECK(dim.eigenvalues[n] == doctest::Approx(d.map.energy_from(scaled.eigenvalues[n])).epsilon(1e-9));
    CHECK(dim.eigenvalues[n] == doctest::Approx(6.0 * (n + 0.5)).epsilon(1e-6));
  }
}

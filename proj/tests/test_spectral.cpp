#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <sstream>

#include "pdmq/error.hpp"
#include "pdmq/models.hpp"
#include "pdmq/spectral.hpp"
#include "pdmq/tridiagonal.hpp"

using namespace pdmq;

namespace {

ProblemDef box_problem() {
  ProblemDef p;
  p.name = "box";
  p.mass = Expr(1.0);
  p.potential = Expr(0.0);
  p.domain = classify_domain(0.0, M_PI, p.mass, {});
  return p;
}

Spectrum solve(const ProblemDef& p, int k, int N = 2000, std::vector<int> N_list = {}, bool transformed = false) {
  SolveRequest r;
  r.k = k;
  r.N = N;
  r.N_list = std::move(N_list);
  r.transformed = transformed;
  return solve_problem(p, r).spectrum;
}

}  // namespace

TEST_CASE("tridiagonal eigenpairs against a dense reference") {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> dist;
  for (int n : {1, 2, 7, 60, 300}) {
    CAPTURE(n);
    Eigen::VectorXd d(n), e(std::max(n - 1, 0));
    for (int i = 0; i < n; ++i) d[i] = dist(gen);
    for (int i = 0; i + 1 < n; ++i) e[i] = dist(gen);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref;
    ref.computeFromTridiagonal(d, e);
    const SymmetricTridiagonal<double> T(d, e);
    const int k = std::min(n, 6);
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    T.lowest(k, values, vectors);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
    dense.diagonal() = d;
    for (int i = 0; i + 1 < n; ++i) dense(i, i + 1) = dense(i + 1, i) = e[i];
    for (int j = 0; j < k; ++j) {
      CHECK(std::abs(values[j] - ref.eigenvalues()[j]) <= 1e-12 * std::max(1.0, std::abs(ref.eigenvalues()[j])));
      CHECK((dense * vectors.col(j) - values[j] * vectors.col(j)).norm() <= 1e-10);
    }
    CHECK((vectors.transpose() * vectors - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("Sturm count brackets every eigenvalue") {
  Eigen::VectorXd d = Eigen::VectorXd::Constant(50, 2.0), e = Eigen::VectorXd::Constant(49, -1.0);
  const SymmetricTridiagonal<double> T(d, e);
  for (int k = 1; k <= 50; ++k) {
    const double exact = 2.0 - 2.0 * std::cos(k * M_PI / 51);
    CHECK(T.count_below(exact - 1e-9) == k - 1);
    CHECK(T.count_below(exact + 1e-9) == k);
  }
  CHECK(T.gershgorin_lower() <= 0.0);
  CHECK(T.gershgorin_upper() >= 4.0);
}

TEST_CASE("constant mass assembles the second-difference matrix") {
  const ProblemDef p = box_problem();
  const Grid g = Grid::uniform(0.0, M_PI, 999);
  CHECK(g.h == doctest::Approx(M_PI / 1000));
  const DiscreteOperator d = discretize(build_noether(p, 1.0), g);
  const double h2 = g.h * g.h;
  CHECK((d.sym_diag.array() - 1.0 / h2).abs().maxCoeff() <= 1e-9 / h2);
  CHECK((d.sym_off.array() + 0.5 / h2).abs().maxCoeff() <= 1e-9 / h2);
  CHECK(hermiticity_residual(d, 8) <= 1e-14);
}

TEST_CASE("particle in a box") {
  const Spectrum s = solve(box_problem(), 3);
  for (int n = 1; n <= 3; ++n) CHECK(std::abs(s.eigenvalues[n - 1] - n * n / 2.0) <= 1e-4);
  const Spectrum r = solve(box_problem(), 1, 0, {500, 1000, 2000});
  CHECK(r.extrapolated);
  CHECK(std::abs(r.eigenvalues[0] - 0.5) <= 1e-7);
}

TEST_CASE("weighted assembly is symmetric in its measure") {
  SUBCASE("quasi-harmonic mass near the walls") {
    const ProblemDef p = builtin("quasi-harmonic-k", {{"k", 1.0}});
    const double d = 1e-6;
    const DiscreteOperator op = discretize(build_noether(p, 1.0), Grid::uniform(-1 + d, 1 - d, 500));
    CHECK(op.symmetrized);
    CHECK(hermiticity_residual(op, 8) <= 1e-12);
    CHECK(op.asymmetry() <= 1e-14);
  }
  SUBCASE("log mass: rho_i = 1/(1 + L x_i)") {
    const ProblemDef p = builtin("log-osc", {{"L", 1.0}});
    const Grid g = Grid::uniform(-0.99, 40.0, 4000);
    const DiscreteOperator op = discretize(build_noether(p, 1.0), g);
    for (int i = 0; i < g.N; i += 97) CHECK(op.rho[i] == doctest::Approx(1 / (1 + g.x[i])));
    CHECK(hermiticity_residual(op, 8) <= 1e-12);
  }
  SUBCASE("naive assembly is not symmetric") {
    const ProblemDef p = builtin("quasi-harmonic-k", {{"k", 1.0}});
    const DiscreteOperator op = discretize_naive(build_noether(p, 1.0), Grid::uniform(-1 + 2e-6, 1 - 2e-6, 500));
    CHECK(hermiticity_residual(op, 8) > 1e-6);
    CHECK_THROWS_AS(solve_spectrum(op, 3), InvalidArgument);
  }
}

TEST_CASE("assembly touching a mass singularity fails") {
  const ProblemDef p = builtin("quasi-harmonic-k", {{"k", 1.0}});
  CHECK_THROWS_AS(discretize(build_noether(p, 1.0), Grid::uniform(-1.5, 0.5, 100)), Error);
}

TEST_CASE("eigenvectors are rho-normalized with the right sign convention") {
  const Spectrum s = solve(builtin("log-osc", {{"L", 0.5}}), 4);
  const double h = s.grid.h;
  for (int k = 0; k < 4; ++k) {
    const Eigen::VectorXd psi = s.eigenvectors.col(k);
    CHECK((psi.array().square() * s.rho.array()).sum() * h == doctest::Approx(1.0).epsilon(1e-10));
    for (int j = 0; j < k; ++j)
      CHECK(std::abs((psi.array() * s.eigenvectors.col(j).array() * s.rho.array()).sum() * h) <= 1e-8);
  }
}

TEST_CASE("node counts and parity") {
  for (const ProblemDef& p : {builtin("quasi-harmonic-k", {{"k", 0.5}}), builtin("arcsinh-osc", {{"L", 1.0}}),
                              builtin("arctanh-osc", {{"L", 0.5}})}) {
    CAPTURE(p.name);
    const Spectrum s = solve(p, 7);
    for (int k = 0; k < 7; ++k) {
      const Eigen::VectorXd psi = s.eigenvectors.col(k);
      CHECK(node_count(psi) == k);
      const double sign = k % 2 == 0 ? 1.0 : -1.0;
      CHECK((psi - sign * psi.reverse()).cwiseAbs().maxCoeff() <= 1e-6 * psi.cwiseAbs().maxCoeff());
    }
  }
  const Spectrum s = solve(builtin("log-osc", {{"L", 0.5}}), 7);
  for (int k = 0; k < 7; ++k) CHECK(node_count(s.eigenvectors.col(k)) == k);
}

TEST_CASE("enlarging the box at fixed spacing lowers every eigenvalue") {
  const ProblemDef p = builtin("arcsinh-osc", {{"L", 0.5}});
  const OperatorCoefficients op = build_noether(p, 1.0);
  const Grid small = Grid::uniform(-3.0, 3.0, 599);
  const Grid big = Grid::uniform(-3.0 - small.h, 3.0 + small.h, 601);
  CHECK(big.h == doctest::Approx(small.h));
  const Spectrum a = solve_spectrum(discretize(op, small), 5), b = solve_spectrum(discretize(op, big), 5);
  for (int k = 0; k < 5; ++k) CHECK(b.eigenvalues[k] <= a.eigenvalues[k]);
}

TEST_CASE("discretization error is second order") {
  const ProblemDef p = builtin("quasi-harmonic-k", {{"k", 0.5}});
  const TruncationBox box = truncation_box(p, {2.5});
  const OperatorCoefficients op = build_noether(p, 1.0);
  auto e = [&](int N) { return solve_spectrum(discretize(op, Grid::uniform(box.xL, box.xR, N)), 3).eigenvalues; };
  const Eigen::VectorXd e1 = e(499), e2 = e(999), e3 = e(1999);
  for (int k = 0; k < 3; ++k) {
    const double order = std::log2((e1[k] - e2[k]) / (e2[k] - e3[k]));
    CHECK(order == doctest::Approx(2.0).epsilon(0.05));
  }
  const Spectrum coarse = solve(p, 3, 0, {500, 1000}), fine = solve(p, 3, 0, {1000, 2000});
  for (int k = 0; k < 3; ++k) CHECK(fine.errors[k] <= coarse.errors[k] / 3.5);
}

TEST_CASE("truncation boxes") {
  SUBCASE("even problems are symmetric") {
    const TruncationBox b = truncation_box(builtin("arcsinh-osc", {{"L", 1.0}}), {4.5});
    CHECK(b.xL == doctest::Approx(-b.xR));
    CHECK(b.yL == doctest::Approx(-b.yR));
  }
  SUBCASE("singular endpoints are never included") {
    const TruncationBox b = truncation_box(builtin("arctanh-osc", {{"L", 1.0}}), {60.0});
    CHECK(b.xL > -1.0);
    CHECK(b.xR < 1.0);
  }
  SUBCASE("regular endpoints are kept") {
    const TruncationBox b = truncation_box(box_problem());
    CHECK(b.xL == 0.0);
    CHECK(b.xR == doctest::Approx(M_PI));
  }
  SUBCASE("explicit arclength cut") {
    BoxOptions o;
    o.y_cut = 3.0;
    const TruncationBox b = truncation_box(builtin("log-osc", {{"L", 1.0}}), o);
    CHECK(b.xL == doctest::Approx(std::exp(-3.0) - 1).epsilon(1e-8));
    CHECK(b.xR == doctest::Approx(std::exp(3.0) - 1).epsilon(1e-8));
  }
}

TEST_CASE("arclength transform") {
  SUBCASE("arcsinh and log models become the unit oscillator") {
    for (const char* name : {"arcsinh-osc", "log-osc"}) {
      CAPTURE(name);
      const ProblemDef t = transform_to_arclength(builtin(name, {{"L", 0.7}}), -5.0, 5.0);
      for (double y : {-4.5, -1.0, 0.0, 2.0, 4.0}) {
        CHECK(t.m(y) == 1.0);
        CHECK(t.V(y) == doctest::Approx(0.5 * y * y).epsilon(1e-8));
      }
    }
  }
  SUBCASE("quasi-harmonic model becomes tan^2") {
    const double k = 0.5;
    const ProblemDef t = transform_to_arclength(builtin("quasi-harmonic-k", {{"k", k}}), -2.0, 2.0);
    for (double y : {-1.8, 0.3, 1.5}) CHECK(t.V(y) == doctest::Approx(std::pow(std::tan(std::sqrt(k) * y), 2) / (2 * k)).epsilon(1e-8));
  }
  SUBCASE("constant mass is a translation by the anchor") {
    ProblemDef p = box_problem();
    p.potential = parse_expr("x^2");
    const double c = p.domain.default_anchor();
    const ProblemDef t = transform_to_arclength(p, -c, M_PI - c);
    CHECK(t.domain.lower == doctest::Approx(-M_PI / 2));
    for (double y : {-1.5, 0.0, 1.2}) CHECK(t.V(y) == doctest::Approx((y + c) * (y + c)).epsilon(1e-10));
  }
}

TEST_CASE("direct and transformed routes agree") {
  const ProblemDef p = builtin("quasi-harmonic-k", {{"k", 0.1}});
  const Spectrum d = solve(p, 3, 0, {1000, 2000, 4000}), t = solve(p, 3, 0, {1000, 2000, 4000}, true);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(d.eigenvalues[k] - t.eigenvalues[k]) <= 1e-6 * t.eigenvalues[k]);
}

TEST_CASE("isospectral models") {
  const Spectrum a = solve(builtin("arcsinh-osc", {{"L", 0.5}}), 5, 0, {1000, 2000, 4000});
  for (int n = 0; n < 5; ++n) CHECK(std::abs(a.eigenvalues[n] - (n + 0.5)) <= 1e-4);
  const Spectrum t = solve(builtin("arctanh-osc", {{"L", 1.0}}), 1, 0, {1000, 2000, 4000}, true);
  CHECK(std::abs(t.eigenvalues[0] - 0.5) <= 1e-5);
}

TEST_CASE("export formats") {
  const Spectrum s = solve(box_problem(), 2, 200);
  const std::string j = spectrum_json(s, "box", "noether", {});
  CHECK(j.find("\"eigenvalues\"") != std::string::npos);
  CHECK(j.find("null") != std::string::npos);  // unrefined error bars
  std::ostringstream csv;
  write_eigenfunctions_csv(s, csv);
  std::istringstream in(csv.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,psi_0,psi_1");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 200);
}

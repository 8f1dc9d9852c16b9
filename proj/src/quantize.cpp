#include "pdmq/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "pdmq/error.hpp"

namespace pdmq {

OrderingScheme OrderingScheme::von_roos(double a1, double a2, double a3) {
  if (!(std::abs(a1 + a2 + a3 + 1.0) <= 1e-12))
    throw InvalidArgument("von Roos exponents must satisfy a1 + a2 + a3 = -1");
  OrderingScheme s;
  s.kind = Kind::VonRoos;
  s.a1 = a1;
  s.a2 = a2;
  s.a3 = a3;
  return s;
}

OrderingScheme OrderingScheme::parse(const std::string& text) {
  if (text == "noether") return noether();
  if (text == "lb" || text == "laplace-beltrami") return laplace_beltrami();
  if (text == "bdd") return ben_daniel_duke();
  if (text == "zk") return zhu_kroemer();
  const std::string prefix = "vonroos:";
  if (text.rfind(prefix, 0) == 0) {
    std::vector<double> v;
    std::stringstream in(text.substr(prefix.size()));
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw InvalidArgument("bad von Roos exponent '" + item + "'");
      }
    }
    if (v.size() != 3) throw InvalidArgument("von Roos scheme needs three exponents");
    return von_roos(v[0], v[1], v[2]);
  }
  throw InvalidArgument("unknown scheme '" + text + "' (noether | lb | vonroos:a1,a2,a3)");
}

std::string OrderingScheme::name() const {
  switch (kind) {
    case Kind::Noether: return "noether";
    case Kind::LaplaceBeltrami: return "laplace-beltrami";
    case Kind::VonRoos: {
      char buf[96];
      std::snprintf(buf, sizeof buf, "von-roos(%g,%g,%g)", a1, a2, a3);
      return buf;
    }
  }
  return "?";
}

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

// (A B) psi = sum_i A_i D^i sum_j B_j D^j psi, expanded by Leibniz.
DiffOp operator*(const DiffOp& lhs, const DiffOp& rhs) {
  const int na = lhs.order(), nb = rhs.order();
  if (na < 0 || nb < 0) return DiffOp();
  std::vector<Expr> out(static_cast<std::size_t>(na + nb + 1), Expr(0.0));
  for (int j = 0; j <= nb; ++j) {
    Expr bj = rhs.coeffs_[j];
    std::vector<Expr> derivs{bj};
    for (int r = 1; r <= na; ++r) derivs.push_back(simplify(diff_expr(derivs.back())));
    for (int i = 0; i <= na; ++i) {
      const Expr& ai = lhs.coeffs_[i];
      if (ai.is_constant(0.0)) continue;
      for (int r = 0; r <= i; ++r) {
        const Expr& d = derivs[r];
        if (d.is_constant(0.0)) continue;
        out[j + i - r] = out[j + i - r] + binomial(i, r) * ai * d;
      }
    }
  }
  return DiffOp(std::move(out)).simplified();
}

DiffOp operator+(const DiffOp& lhs, const DiffOp& rhs) {
  std::vector<Expr> out(static_cast<std::size_t>(std::max(lhs.order(), rhs.order()) + 1), Expr(0.0));
  for (int k = 0; k < static_cast<int>(out.size()); ++k) out[k] = lhs.coeff(k) + rhs.coeff(k);
  return DiffOp(std::move(out));
}

DiffOp operator*(const Expr& s, const DiffOp& op) {
  std::vector<Expr> out = op.coeffs_;
  for (Expr& e : out) e = s * e;
  return DiffOp(std::move(out));
}

DiffOp DiffOp::simplified() const {
  std::vector<Expr> out;
  out.reserve(coeffs_.size());
  for (const Expr& e : coeffs_) out.push_back(simplify(e));
  return DiffOp(std::move(out));
}

namespace {

OperatorCoefficients finish(const ProblemDef& p, double hbar, const DiffOp& kinetic, Expr weight,
                            std::string scheme) {
  if (kinetic.order() > 2) throw InvalidArgument("kinetic operator is not second order");
  OperatorCoefficients op;
  op.scheme = std::move(scheme);
  op.hbar = hbar;
  op.a = simplify(kinetic.coeff(2));
  op.b = simplify(kinetic.coeff(1));
  op.c = simplify(kinetic.coeff(0) + p.potential);
  op.weight = std::move(weight);
  op.bindings = p.bindings;
  op.domain = p.domain;
  return op;
}

DiffOp von_roos_kinetic(const Expr& m, double hbar, const OrderingScheme& s) {
  const DiffOp D = DiffOp::derivative();
  auto M = [&](double e) { return DiffOp::multiply(pow(m, e)); };
  // p X p = -hbar^2 D X D
  const DiffOp forward = M(s.a1) * D * M(s.a2) * D * M(s.a3);
  const DiffOp backward = M(s.a3) * D * M(s.a2) * D * M(s.a1);
  return (-0.25 * hbar * hbar) * (forward + backward);
}

}  // namespace

OperatorCoefficients build_noether(const ProblemDef& p, double hbar) {
  // P = -i hbar f D with f = m^{-1/2}; H = P^2/2 + V
  const Expr f = pow(p.mass, -0.5);
  const DiffOp P = DiffOp::multiply(f) * DiffOp::derivative();
  return finish(p, hbar, (-0.5 * hbar * hbar) * (P * P), sqrt(p.mass), "noether");
}

OperatorCoefficients build_laplace_beltrami(const ProblemDef& p, double hbar) {
  // div grad = (1/sqrt g) D (sqrt g g^{-1} D) with g = m
  const Expr rho = sqrt(p.mass);
  const DiffOp D = DiffOp::derivative();
  const DiffOp lap = DiffOp::multiply(1.0 / rho) * D * DiffOp::multiply(rho / p.mass) * D;
  return finish(p, hbar, (-0.5 * hbar * hbar) * lap, rho, "laplace-beltrami");
}

OperatorCoefficients build_von_roos(const ProblemDef& p, double hbar, const OrderingScheme& s) {
  if (s.kind != OrderingScheme::Kind::VonRoos) throw InvalidArgument("scheme is not a von Roos ordering");
  const OrderingScheme checked = OrderingScheme::von_roos(s.a1, s.a2, s.a3);
  return finish(p, hbar, von_roos_kinetic(p.mass, hbar, checked), Expr(1.0), checked.name());
}

OperatorCoefficients build_operator(const ProblemDef& p, double hbar, const OrderingScheme& s) {
  switch (s.kind) {
    case OrderingScheme::Kind::Noether: return build_noether(p, hbar);
    case OrderingScheme::Kind::LaplaceBeltrami: return build_laplace_beltrami(p, hbar);
    case OrderingScheme::Kind::VonRoos: return build_von_roos(p, hbar, s);
  }
  throw InvalidArgument("unknown scheme");
}

Expr ordering_potential(const ProblemDef& p, double hbar, const OrderingScheme& s) {
  if (s.kind != OrderingScheme::Kind::VonRoos) throw InvalidArgument("scheme is not a von Roos ordering");
  const OrderingScheme checked = OrderingScheme::von_roos(s.a1, s.a2, s.a3);
  const Expr own = von_roos_kinetic(p.mass, hbar, checked).coeff(0);
  const Expr ref = von_roos_kinetic(p.mass, hbar, OrderingScheme::ben_daniel_duke()).coeff(0);
  return simplify(own - ref);
}

OperatorCoefficients conjugate_to_lebesgue(const OperatorCoefficients& op) {
  const Expr W = sqrt(op.weight);
  const DiffOp H({op.c, op.b, op.a});
  const DiffOp G = DiffOp::multiply(W) * H * DiffOp::multiply(1.0 / W);
  OperatorCoefficients out = op;
  out.scheme = op.scheme + "/lebesgue";
  out.a = simplify(G.coeff(2));
  out.b = simplify(G.coeff(1));
  out.c = simplify(G.coeff(0));
  out.weight = Expr(1.0);
  return out;
}

double coefficient_distance(const OperatorCoefficients& lhs, const OperatorCoefficients& rhs,
                            const std::vector<double>& xs) {
  double worst = 0.0;
  const auto pairs = {std::pair{&lhs.a, &rhs.a}, std::pair{&lhs.b, &rhs.b}, std::pair{&lhs.c, &rhs.c},
                      std::pair{&lhs.weight, &rhs.weight}};
  for (double x : xs) {
    for (const auto& [l, r] : pairs) {
      const double u = eval_expr(*l, x, lhs.bindings);
      const double w = eval_expr(*r, x, rhs.bindings);
      worst = std::max(worst, std::abs(u - w) / std::max(1.0, std::abs(w)));
    }
  }
  return worst;
}

std::string operator_json(const OperatorCoefficients& op) {
  nlohmann::json j;
  j["scheme"] = op.scheme;
  j["hbar"] = op.hbar;
  j["a"] = to_string(op.a);
  j["b"] = to_string(op.b);
  j["c"] = to_string(op.c);
  j["weight"] = to_string(op.weight);
  return j.dump(2);
}

}  // namespace pdmq

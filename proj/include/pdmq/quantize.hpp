#pragma once

// Quantum Hamiltonians a(x) D^2 + b(x) D + c(x) with their measure weight,
// built by composing first-order operators symbolically.

#include <string>
#include <vector>

#include "pdmq/expr.hpp"
#include "pdmq/geometry.hpp"

namespace pdmq {

struct OrderingScheme {
  enum class Kind { Noether, LaplaceBeltrami, VonRoos };
  Kind kind = Kind::Noether;
  double a1 = 0.0, a2 = -1.0, a3 = 0.0;

  static OrderingScheme noether() { return {Kind::Noether}; }
  static OrderingScheme laplace_beltrami() { return {Kind::LaplaceBeltrami}; }
  /// Throws InvalidArgument unless a1 + a2 + a3 = -1 to 1e-12.
  static OrderingScheme von_roos(double a1, double a2, double a3);
  static OrderingScheme ben_daniel_duke() { return von_roos(0.0, -1.0, 0.0); }
  static OrderingScheme zhu_kroemer() { return von_roos(-0.5, 0.0, -0.5); }

  /// "noether", "lb", "laplace-beltrami", or "vonroos:a1,a2,a3".
  static OrderingScheme parse(const std::string& text);
  std::string name() const;
};

/// a D^2 + b D + c, self-adjoint in L^2(weight dx).
struct OperatorCoefficients {
  std::string scheme;
  double hbar = 1.0;
  Expr a, b, c, weight;
  Bindings bindings;
  Domain domain;
};

/// Differential operator sum_k coeffs[k] D^k with expression coefficients.
class DiffOp {
 public:
  DiffOp() = default;
  explicit DiffOp(std::vector<Expr> coeffs) : coeffs_(std::move(coeffs)) {}

  static DiffOp multiply(const Expr& g) { return DiffOp({g}); }
  static DiffOp derivative() { return DiffOp({Expr(0.0), Expr(1.0)}); }

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  Expr coeff(int k) const { return k < static_cast<int>(coeffs_.size()) ? coeffs_[k] : Expr(0.0); }

  friend DiffOp operator*(const DiffOp& lhs, const DiffOp& rhs);  // composition
  friend DiffOp operator+(const DiffOp& lhs, const DiffOp& rhs);
  friend DiffOp operator*(const Expr& s, const DiffOp& op);

  DiffOp simplified() const;

 private:
  std::vector<Expr> coeffs_;
};

OperatorCoefficients build_noether(const ProblemDef& p, double hbar);
OperatorCoefficients build_laplace_beltrami(const ProblemDef& p, double hbar);
OperatorCoefficients build_von_roos(const ProblemDef& p, double hbar, const OrderingScheme& s);
OperatorCoefficients build_operator(const ProblemDef& p, double hbar, const OrderingScheme& s);

/// c(s) - c(BenDaniel-Duke).
Expr ordering_potential(const ProblemDef& p, double hbar, const OrderingScheme& s);

/// W op W^{-1} with W = sqrt(weight); the result has weight 1.
OperatorCoefficients conjugate_to_lebesgue(const OperatorCoefficients& op);

/// Largest |lhs - rhs| / max(1, |rhs|) over a, b, c and the weight at xs.
double coefficient_distance(const OperatorCoefficients& lhs, const OperatorCoefficients& rhs,
                            const std::vector<double>& xs);

/// {scheme, hbar, a, b, c, weight} with expressions in the text grammar.
std::string operator_json(const OperatorCoefficients& op);

}  // namespace pdmq

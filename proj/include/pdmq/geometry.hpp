#pragma once

// Geometry of the position-dependent-mass metric ds^2 = m(x) dx^2: Killing
// field, invariant measure, Noether momentum and the arclength coordinate.

#include <Eigen/Core>
#include <cmath>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pdmq/expr.hpp"
#include "pdmq/interp.hpp"

namespace pdmq {

enum class EndpointKind { OpenRegular, SingularMassBlowup, Infinite };

std::string_view to_string(EndpointKind kind);

struct Domain {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  EndpointKind lower_kind = EndpointKind::Infinite;
  EndpointKind upper_kind = EndpointKind::Infinite;

  static Domain real_line() { return {}; }
  static Domain interval(double a, double b, EndpointKind lower_kind, EndpointKind upper_kind);

  bool contains(double x) const { return x > lower && x < upper; }
  bool finite() const { return std::isfinite(lower) && std::isfinite(upper); }
  /// 0 when interior, else the domain midpoint (or a point 1 inside a
  /// half-infinite domain).
  double default_anchor() const;
};

/// A position-dependent-mass system: L = m(x) v^2 / 2 - V(x).
struct ProblemDef {
  std::string name;
  Expr mass;
  Expr potential;
  Domain domain;
  Bindings bindings;

  double m(double x) const { return eval_expr(mass, x, bindings); }
  double V(double x) const { return eval_expr(potential, x, bindings); }

  /// Throws InvalidArgument when m is not strictly positive and finite, or V
  /// not finite, at the probe points.
  void validate(int probes = 64) const;
};

/// Builds the endpoint kinds of (a, b) by probing m at finite endpoints.
Domain classify_domain(double a, double b, const Expr& mass, const Bindings& bindings);

/// Deterministic interior sample points. Finite sides are inset by 1% of the
/// width; infinite sides are cut at `infinite_reach` from the anchor.
std::vector<double> interior_samples(const Domain& d, int count, unsigned seed = 7,
                                     double infinite_reach = 10.0);

struct KillingData {
  Expr killing_component;  // f = m^{-1/2}
  Expr density;            // rho = sqrt(m)
  Expr killing_residual;   // f m' + 2 m f'
  Expr measure_residual;   // f rho' + rho f'
};

KillingData derive_killing(const ProblemDef& p);

/// P = velocity_coeff * v = momentum_coeff * p.
struct NoetherMomentum {
  Expr velocity_coeff;  // sqrt(m)
  Expr momentum_coeff;  // 1/sqrt(m)
};

NoetherMomentum noether_momentum(const ProblemDef& p);

struct ArclengthOptions {
  /// Arclength reach of the table on a side whose y-limit is infinite.
  double y_span = 40.0;
  /// Explicit table extent in x; defaults to the domain (clipped by y_span).
  std::optional<double> x_lo;
  std::optional<double> x_hi;
};

/// y(x) = integral of sqrt(m) from the anchor, tabulated with a monotone
/// inverse. Read-only after construction.
class ArclengthMap {
 public:
  double anchor() const { return anchor_; }
  double forward(double x) const;
  double inverse(double y) const;

  /// Limits of y at the domain endpoints (possibly infinite).
  double y_lower() const { return y_lower_; }
  double y_upper() const { return y_upper_; }

  const Eigen::VectorXd& x_table() const { return x_; }
  const Eigen::VectorXd& y_table() const { return y_; }

  void write_csv(std::ostream& out) const;

 private:
  friend ArclengthMap arclength_map(const ProblemDef&, double, int, const ArclengthOptions&);
  ArclengthMap() = default;

  BoundExpr sqrt_m_;
  Domain domain_;
  double anchor_ = 0.0;
  double y_lower_ = 0.0;
  double y_upper_ = 0.0;
  Eigen::VectorXd x_;
  Eigen::VectorXd y_;
  MonotoneCubic x_of_y_;
};

ArclengthMap arclength_map(const ProblemDef& p, double x0, int resolution,
                           const ArclengthOptions& options = {});

}  // namespace pdmq

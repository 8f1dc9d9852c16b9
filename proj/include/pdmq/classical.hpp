#pragma once

// Euler-Lagrange dynamics of L = m(x) v^2 / 2 - V(x) with fixed-step RK4.

#include <iosfwd>
#include <optional>
#include <vector>

#include "pdmq/expr.hpp"
#include "pdmq/geometry.hpp"

namespace pdmq {

struct ClassicalState {
  double x = 0.0;
  double v = 0.0;
  double t = 0.0;
};

struct Trajectory {
  std::vector<double> t, x, v;
  double dt = 0.0;
  bool exited = false;  // stopped before leaving the domain

  std::size_t size() const { return t.size(); }
  ClassicalState back() const { return {x.back(), v.back(), t.back()}; }
};

/// x'' = -(m'/2m) v^2 - V'/m, with the velocity as the parameter `v`.
Expr acceleration(const ProblemDef& p);

Trajectory integrate(const ProblemDef& p, const ClassicalState& s0, double dt, double T);

struct ConservationReport {
  double energy_drift = 0.0;
  std::optional<double> noether_drift;  // only for force-free (geodesic) motion
};

ConservationReport conservation_report(const ProblemDef& p, const Trajectory& tr);

/// Mean spacing of same-direction zero crossings of v.
double measure_period(const Trajectory& tr);

/// Columns t,x,v,E and P for geodesic motion.
void write_trajectory_csv(const ProblemDef& p, const Trajectory& tr, std::ostream& out);

}  // namespace pdmq

#pragma once

#include <functional>

namespace pdmq {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

/// Globally adaptive 7/15-point Gauss-Kronrod on [a, b] (a > b allowed, sign
/// follows). Stops at abs_tol, at rounding level, or after max_panels panels.
QuadratureResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                              double abs_tol = 1e-12, int max_panels = 400);

struct LimitResult {
  double value = 0.0;  // integral from `from` to the endpoint, or +-inf
  bool finite = true;
  int chunks = 0;
};

/// Integral of a positive integrand from `from` toward `endpoint` (which may
/// be +-inf or a finite singular point), using chunks whose length shrinks
/// (finite endpoint) or grows (infinite endpoint) geometrically. A geometric
/// tail correction is added when the chunk contributions decay; stalled decay
/// is reported as a divergent (infinite) limit.
LimitResult integrate_to_endpoint(const std::function<double(double)>& f, double from, double endpoint,
                                  double abs_tol = 1e-12);

}  // namespace pdmq

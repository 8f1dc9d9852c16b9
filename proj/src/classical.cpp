#include "pdmq/classical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "pdmq/error.hpp"

namespace pdmq {

namespace {

// x'' = g1(x) v^2 + g2(x)
struct Force {
  BoundExpr g1, g2;

  Force(const ProblemDef& p)
      : g1(simplify(-diff_expr(p.mass) / (2.0 * p.mass)), p.bindings),
        g2(simplify(-diff_expr(p.potential) / p.mass), p.bindings) {}

  double operator()(double x, double v) const { return g1(x) * v * v + g2(x); }
};

bool geodesic(const ProblemDef& p) {
  return !depends_on_x(simplify(substitute(p.potential, p.bindings)));
}

double energy(const ProblemDef& p, double x, double v) { return 0.5 * p.m(x) * v * v + p.V(x); }

}  // namespace

Expr acceleration(const ProblemDef& p) {
  const Expr v = Expr::parameter("v");
  return simplify(-(diff_expr(p.mass) / (2.0 * p.mass)) * pow(v, 2.0) - diff_expr(p.potential) / p.mass);
}

Trajectory integrate(const ProblemDef& p, const ClassicalState& s0, double dt, double T) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(T > 0.0)) throw InvalidArgument("T must be positive");
  if (!p.domain.contains(s0.x)) throw InvalidArgument("initial position outside the domain");
  if (s0.t + dt == s0.t) throw InvalidArgument("step underflow: dt vanishes against t");

  const Force a(p);
  Trajectory tr;
  tr.dt = dt;
  const auto steps = static_cast<long>(std::ceil(T / dt - 1e-9));
  tr.t.reserve(steps + 1);
  tr.x.reserve(steps + 1);
  tr.v.reserve(steps + 1);
  tr.t.push_back(s0.t);
  tr.x.push_back(s0.x);
  tr.v.push_back(s0.v);

  double x = s0.x, v = s0.v;
  for (long n = 0; n < steps; ++n) {
    const double h = n + 1 == steps ? T - n * dt : dt;
    double xn = 0.0, vn = 0.0;
    try {
      const double k1x = v, k1v = a(x, v);
      const double k2x = v + 0.5 * h * k1v, k2v = a(x + 0.5 * h * k1x, k2x);
      const double k3x = v + 0.5 * h * k2v, k3v = a(x + 0.5 * h * k2x, k3x);
      const double k4x = v + h * k3v, k4v = a(x + h * k3x, k4x);
      xn = x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      vn = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    } catch (const DomainFault&) {
      tr.exited = true;
      break;
    }
    if (!p.domain.contains(xn) || !std::isfinite(vn)) {
      tr.exited = true;
      break;
    }
    x = xn;
    v = vn;
    tr.t.push_back(s0.t + n * dt + h);
    tr.x.push_back(x);
    tr.v.push_back(v);
  }
  return tr;
}

ConservationReport conservation_report(const ProblemDef& p, const Trajectory& tr) {
  if (tr.size() == 0) throw InvalidArgument("empty trajectory");
  ConservationReport r;
  const double e0 = energy(p, tr.x[0], tr.v[0]);
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i)
    worst = std::max(worst, std::abs(energy(p, tr.x[i], tr.v[i]) - e0));
  r.energy_drift = worst / std::max(1.0, std::abs(e0));

  if (geodesic(p)) {
    const double p0 = std::sqrt(p.m(tr.x[0])) * tr.v[0];
    double pw = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i)
      pw = std::max(pw, std::abs(std::sqrt(p.m(tr.x[i])) * tr.v[i] - p0));
    r.noether_drift = pw / std::max(1.0, std::abs(p0));
  }
  return r;
}

namespace {

// Root in [t1, t2] of the parabola through three samples.
double quadratic_root(double t0, double v0, double t1, double v1, double t2, double v2) {
  const double d01 = (v1 - v0) / (t1 - t0);
  const double d12 = (v2 - v1) / (t2 - t1);
  const double c2 = (d12 - d01) / (t2 - t0);
  auto q = [&](double t) { return v1 + (t - t1) * (d12 + c2 * (t - t2)); };
  auto dq = [&](double t) { return d12 + c2 * (2.0 * t - t1 - t2); };
  double t = t1 - v1 * (t2 - t1) / (v2 - v1);
  for (int i = 0; i < 20; ++i) {
    const double step = q(t) / dq(t);
    t -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(t))) break;
  }
  return std::clamp(t, t1, t2);
}

}  // namespace

double measure_period(const Trajectory& tr) {
  std::vector<double> up, down;
  int changes = 0;
  for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
    const double a = tr.v[i], b = tr.v[i + 1];
    if ((a < 0 && b >= 0) || (a > 0 && b <= 0)) {
      if (b == 0.0 && i + 2 < tr.size() && (tr.v[i + 2] < 0) == (a < 0)) continue;  // touch, no crossing
      ++changes;
      double tc = 0.0;
      if (i == 0) {
        tc = tr.t[0] - a * (tr.t[1] - tr.t[0]) / (b - a);
      } else {
        tc = quadratic_root(tr.t[i - 1], tr.v[i - 1], tr.t[i], a, tr.t[i + 1], b);
      }
      (a < 0 ? up : down).push_back(tc);
    }
  }
  if (changes < 3) throw Error("non-oscillatory trajectory: fewer than 3 velocity sign changes");
  const std::vector<double>& use = up.size() >= down.size() ? up : down;
  return (use.back() - use.front()) / static_cast<double>(use.size() - 1);
}

void write_trajectory_csv(const ProblemDef& p, const Trajectory& tr, std::ostream& out) {
  const bool with_p = geodesic(p);
  out << (with_p ? "t,x,v,E,P\n" : "t,x,v,E\n");
  char buf[160];
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double E = energy(p, tr.x[i], tr.v[i]);
    if (with_p) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", tr.t[i], tr.x[i], tr.v[i], E,
                    std::sqrt(p.m(tr.x[i])) * tr.v[i]);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", tr.t[i], tr.x[i], tr.v[i], E);
    }
    out << buf;
  }
}

}  // namespace pdmq

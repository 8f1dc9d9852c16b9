#include "pdmq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "pdmq/error.hpp"
#include "pdmq/quadrature.hpp"

namespace pdmq {

std::string_view to_string(EndpointKind kind) {
  switch (kind) {
    case EndpointKind::OpenRegular: return "open-regular";
    case EndpointKind::SingularMassBlowup: return "singular-mass-blowup";
    case EndpointKind::Infinite: return "infinite";
  }
  return "?";
}

Domain Domain::interval(double a, double b, EndpointKind lower_kind, EndpointKind upper_kind) {
  if (!(a < b)) throw InvalidArgument("domain requires lower < upper");
  if (std::isinf(a)) lower_kind = EndpointKind::Infinite;
  if (std::isinf(b)) upper_kind = EndpointKind::Infinite;
  return {a, b, lower_kind, upper_kind};
}

double Domain::default_anchor() const {
  if (contains(0.0)) return 0.0;
  if (finite()) return 0.5 * (lower + upper);
  if (std::isfinite(lower)) return lower + 1.0;
  return upper - 1.0;
}

namespace {

EndpointKind probe_endpoint(double x, const Expr& mass, const Bindings& b) {
  if (std::isinf(x)) return EndpointKind::Infinite;
  try {
    const double m = eval_expr(mass, x, b);
    if (m > 0.0 && m < 1e12) return EndpointKind::OpenRegular;
  } catch (const DomainFault&) {
  }
  return EndpointKind::SingularMassBlowup;
}

}  // namespace

Domain classify_domain(double a, double b, const Expr& mass, const Bindings& bindings) {
  return Domain::interval(a, b, probe_endpoint(a, mass, bindings), probe_endpoint(b, mass, bindings));
}

std::vector<double> interior_samples(const Domain& d, int count, unsigned seed, double infinite_reach) {
  const double anchor = d.default_anchor();
  double lo = std::isfinite(d.lower) ? d.lower : anchor - infinite_reach;
  double hi = std::isfinite(d.upper) ? d.upper : anchor + infinite_reach;
  const double inset = 0.01 * (hi - lo);
  if (std::isfinite(d.lower)) lo += inset;
  if (std::isfinite(d.upper)) hi -= inset;

  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> xs(static_cast<std::size_t>(count));
  for (double& x : xs) x = dist(gen);
  return xs;
}

void ProblemDef::validate(int probes) const {
  for (double x : interior_samples(domain, probes)) {
    double mv = 0.0, vv = 0.0;
    try {
      mv = m(x);
      vv = V(x);
    } catch (const DomainFault& e) {
      throw InvalidArgument("problem not defined at x = " + std::to_string(x) + ": " + e.what());
    }
    if (!(mv > 0.0) || !std::isfinite(mv))
      throw InvalidArgument("mass not strictly positive at x = " + std::to_string(x));
    if (!std::isfinite(vv)) throw InvalidArgument("potential not finite at x = " + std::to_string(x));
  }
}

KillingData derive_killing(const ProblemDef& p) {
  p.validate();
  KillingData k;
  const Expr& m = p.mass;
  k.killing_component = pow(m, -0.5);
  k.density = sqrt(m);
  const Expr& f = k.killing_component;
  k.killing_residual = f * diff_expr(m) + 2.0 * m * diff_expr(f);
  k.measure_residual = f * diff_expr(k.density) + k.density * diff_expr(f);
  return k;
}

NoetherMomentum noether_momentum(const ProblemDef& p) {
  return {sqrt(p.mass), 1.0 / sqrt(p.mass)};
}

double ArclengthMap::forward(double x) const {
  if (!(x >= domain_.lower && x <= domain_.upper))
    throw InvalidArgument("x = " + std::to_string(x) + " outside the domain");
  const auto n = x_.size();
  auto it = std::upper_bound(x_.data(), x_.data() + n, x);
  Eigen::Index j = std::max<Eigen::Index>(0, (it - x_.data()) - 1);
  // integrate from the nearer knot
  if (j + 1 < n && std::abs(x_[j + 1] - x) < std::abs(x - x_[j])) ++j;
  return y_[j] + integrate_gk(sqrt_m_, x_[j], x, 1e-14).value;
}

double ArclengthMap::inverse(double y) const {
  // regular endpoints absorb quadrature rounding in their y-limit
  const double tol = 1e-12 * std::max(1.0, std::abs(y));
  if (domain_.lower_kind == EndpointKind::OpenRegular && std::abs(y - y_lower_) <= tol) return domain_.lower;
  if (domain_.upper_kind == EndpointKind::OpenRegular && std::abs(y - y_upper_) <= tol) return domain_.upper;
  if (!(y > y_lower_ && y < y_upper_) && y != y_.minCoeff() && y != y_.maxCoeff())
    throw InvalidArgument("y = " + std::to_string(y) + " outside the arclength range");

  double lo = 0.0, hi = 0.0, x = 0.0;
  if (y < y_[0] || y > y_[y_.size() - 1]) {
    // beyond the table: grow a bracket outward
    const bool up = y > y_[y_.size() - 1];
    const double start = up ? x_[x_.size() - 1] : x_[0];
    const double edge = up ? domain_.upper : domain_.lower;
    double step = std::max(1.0, std::abs(start));
    double far = start;
    for (int i = 0; i < 200; ++i) {
      double trial = up ? start + step : start - step;
      if (std::isfinite(edge) && (up ? trial >= edge : trial <= edge)) trial = 0.5 * (far + edge);
      far = trial;
      if (up ? forward(far) >= y : forward(far) <= y) break;
      step *= 2.0;
    }
    lo = up ? start : far;
    hi = up ? far : start;
    x = 0.5 * (lo + hi);
  } else {
    const Eigen::Index j = x_of_y_.interval(y);
    lo = x_[j];
    hi = x_[j + 1];
    x = std::clamp(x_of_y_(y), lo, hi);
  }

  for (int iter = 0; iter < 100; ++iter) {
    const double F = forward(x) - y;
    if (std::abs(F) <= 4e-16 * std::max(1.0, std::abs(y))) break;
    if (F > 0) hi = x; else lo = x;
    double next = x - F / sqrt_m_(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

void ArclengthMap::write_csv(std::ostream& out) const {
  out << "x,y\n";
  char line[64];
  for (Eigen::Index i = 0; i < x_.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", x_[i], y_[i]);
    out << line;
  }
}

namespace {

struct SidePlan {
  double dir;
  double edge;            // domain endpoint on this side
  bool stop_at_x;         // march to an exact x
  double x_end;
  double span;            // |y| reached at the end of the side
  bool toward_singular;   // finite y-limit at a singular endpoint
};

std::vector<std::pair<double, double>> march(const BoundExpr& f, double x0, const SidePlan& s, int nodes) {
  std::vector<std::pair<double, double>> out;
  if (s.span <= 0.0) return out;
  const double dy = s.span / nodes;
  const double edge_floor = 1e-12 * std::max(1.0, std::abs(s.edge));
  double x = x0, y = 0.0;
  const int cap = 40 * nodes + 400;
  for (int i = 0; i < cap; ++i) {
    double dx = dy / f(x);
    if (s.stop_at_x) {
      dx = std::min(dx, std::abs(s.x_end - x));
    } else if (std::isfinite(s.edge)) {
      dx = std::min(dx, 0.5 * std::abs(s.edge - x));
    }
    const double next = s.stop_at_x && dx == std::abs(s.x_end - x) ? s.x_end : x + s.dir * dx;
    if (next == x) break;
    y += std::abs(integrate_gk(f, x, next, 1e-14).value);
    x = next;
    if (!out.empty() && s.dir * y == out.back().second) break;
    out.emplace_back(x, s.dir * y);
    if (s.stop_at_x && x == s.x_end) break;
    if (!s.stop_at_x && !s.toward_singular && y >= s.span) break;
    if (s.toward_singular && (std::abs(s.edge - x) < edge_floor || y >= s.span * (1.0 - 1e-13))) break;
  }
  return out;
}

}  // namespace

ArclengthMap arclength_map(const ProblemDef& p, double x0, int resolution, const ArclengthOptions& options) {
  if (!p.domain.contains(x0)) throw InvalidArgument("anchor must lie in the domain interior");
  if (resolution < 4) throw InvalidArgument("resolution must be at least 4");

  ArclengthMap map;
  map.sqrt_m_ = BoundExpr(sqrt(p.mass), p.bindings);
  map.domain_ = p.domain;
  map.anchor_ = x0;
  const BoundExpr& f = map.sqrt_m_;

  auto limit = [&](double edge, EndpointKind kind) {
    try {
      if (kind == EndpointKind::OpenRegular) {
        const QuadratureResult r = integrate_gk(f, x0, edge);
        if (!r.converged) throw QuadratureError("arclength quadrature did not converge", edge);
        return r.value;
      }
      return integrate_to_endpoint(f, x0, edge).value;
    } catch (const DomainFault& e) {
      throw QuadratureError(std::string("arclength quadrature failed: ") + e.what(), edge);
    }
  };
  map.y_lower_ = limit(p.domain.lower, p.domain.lower_kind);
  map.y_upper_ = limit(p.domain.upper, p.domain.upper_kind);

  auto plan = [&](double dir) {
    SidePlan s{};
    s.dir = dir;
    s.edge = dir > 0 ? p.domain.upper : p.domain.lower;
    const EndpointKind kind = dir > 0 ? p.domain.upper_kind : p.domain.lower_kind;
    const double ylim = std::abs(dir > 0 ? map.y_upper_ : map.y_lower_);
    const std::optional<double>& explicit_end = dir > 0 ? options.x_hi : options.x_lo;
    if (explicit_end) {
      if (!(*explicit_end >= p.domain.lower && *explicit_end <= p.domain.upper))
        throw InvalidArgument("table extent outside the domain");
      s.stop_at_x = true;
      s.x_end = *explicit_end;
      s.span = std::abs(integrate_gk(f, x0, s.x_end).value);
    } else if (kind == EndpointKind::OpenRegular) {
      s.stop_at_x = true;
      s.x_end = s.edge;
      s.span = ylim;
    } else if (std::isfinite(ylim) && ylim <= options.y_span) {
      s.toward_singular = true;
      s.span = ylim;
    } else {
      s.span = options.y_span;
    }
    return s;
  };
  const SidePlan lower = plan(-1.0), upper = plan(1.0);
  const double total = lower.span + upper.span;
  if (!(total > 0.0)) throw InvalidArgument("empty arclength table");
  auto share = [&](double span) {
    return std::max(8, static_cast<int>(std::lround(resolution * span / total)));
  };

  try {
    const auto left = march(f, x0, lower, share(lower.span));
    const auto right = march(f, x0, upper, share(upper.span));
    const auto n = static_cast<Eigen::Index>(left.size() + right.size() + 1);
    map.x_.resize(n);
    map.y_.resize(n);
    Eigen::Index i = 0;
    for (auto it = left.rbegin(); it != left.rend(); ++it, ++i) {
      map.x_[i] = it->first;
      map.y_[i] = it->second;
    }
    map.x_[i] = x0;
    map.y_[i] = 0.0;
    ++i;
    for (const auto& [x, y] : right) {
      map.x_[i] = x;
      map.y_[i] = y;
      ++i;
    }
  } catch (const DomainFault& e) {
    throw QuadratureError(std::string("arclength tabulation failed: ") + e.what(), x0);
  }
  map.x_of_y_ = MonotoneCubic(map.y_, map.x_);
  return map;
}

}  // namespace pdmq

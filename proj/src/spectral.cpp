#include "pdmq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>
#include <memory>
#include <ostream>
#include <random>

#include "pdmq/error.hpp"
#include "pdmq/tridiagonal.hpp"

namespace pdmq {

Grid Grid::uniform(double xL, double xR, int N) {
  if (N < 1) throw InvalidArgument("grid needs at least one interior point");
  if (!(xL < xR) || !std::isfinite(xL) || !std::isfinite(xR)) throw InvalidArgument("grid bounds must be finite, xL < xR");
  Grid g;
  g.N = N;
  g.xL = xL;
  g.xR = xR;
  g.h = (xR - xL) / (N + 1);
  g.x = Eigen::VectorXd::LinSpaced(N, xL + g.h, xL + N * g.h);
  return g;
}

Eigen::VectorXd DiscreteOperator::apply(const Eigen::VectorXd& psi) const {
  const Eigen::Index n = diag.size();
  Eigen::VectorXd out = diag.cwiseProduct(psi);
  out.head(n - 1) += upper.cwiseProduct(psi.tail(n - 1));
  out.tail(n - 1) += lower.cwiseProduct(psi.head(n - 1));
  return out;
}

double DiscreteOperator::norm_estimate() const {
  const Eigen::Index n = diag.size();
  Eigen::VectorXd rows;
  if (symmetrized) {
    rows = sym_diag.cwiseAbs();
    rows.head(n - 1) += sym_off.cwiseAbs();
    rows.tail(n - 1) += sym_off.cwiseAbs();
  } else {
    rows = diag.cwiseAbs();
    rows.head(n - 1) += upper.cwiseAbs();
    rows.tail(n - 1) += lower.cwiseAbs();
  }
  return rows.maxCoeff();
}

double DiscreteOperator::asymmetry() const {
  const Eigen::Index n = diag.size();
  if (n < 2) return 0.0;
  const Eigen::ArrayXd sr = rho.array().sqrt();
  // S(i,i+1) = sqrt(rho_i) H(i,i+1) / sqrt(rho_{i+1}) and its transpose partner
  const Eigen::ArrayXd s_up = sr.head(n - 1) * upper.array() / sr.tail(n - 1);
  const Eigen::ArrayXd s_lo = sr.tail(n - 1) * lower.array() / sr.head(n - 1);
  const double scale = std::max(diag.cwiseAbs().maxCoeff(), s_up.abs().maxCoeff());
  return (s_up - s_lo).abs().maxCoeff() / scale;
}

namespace {

Eigen::VectorXd sample(const BoundExpr& f, const Eigen::VectorXd& xs, const char* what) {
  Eigen::VectorXd out(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    try {
      out[i] = f(xs[i]);
    } catch (const DomainFault& e) {
      throw DomainFault(std::string(what) + " not defined at x = " + std::to_string(xs[i]) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

DiscreteOperator discretize(const OperatorCoefficients& op, const Grid& g) {
  const BoundExpr a(op.a, op.bindings), b(op.b, op.bindings), c(op.c, op.bindings), w(op.weight, op.bindings);
  const BoundExpr flux_slope(simplify(diff_expr(op.weight * op.a) / op.weight), op.bindings);
  const int N = g.N;
  const double h2 = g.h * g.h;

  const Eigen::VectorXd mid = Eigen::VectorXd::LinSpaced(N + 1, g.xL + 0.5 * g.h, g.xL + (N + 0.5) * g.h);
  const Eigen::VectorXd rho = sample(w, g.x, "weight");
  const Eigen::VectorXd P = sample(w, mid, "weight").cwiseProduct(sample(a, mid, "kinetic coefficient"));
  const Eigen::VectorXd cv = sample(c, g.x, "potential term");

  if ((rho.array() <= 0.0).any()) throw InvalidArgument("weight must be positive on the grid");
  if ((P.array() >= 0.0).any()) throw InvalidArgument("kinetic coefficient must be negative on the grid");

  // b has to be the flux-form first-order term (rho a)'/rho
  const int probes = std::min(N, 16);
  for (int j = 0; j < probes; ++j) {
    const double x = g.x[(static_cast<Eigen::Index>(j) * (N - 1)) / std::max(1, probes - 1)];
    const double have = b(x), want = flux_slope(x);
    if (std::abs(have - want) > 1e-8 * (1.0 + std::abs(want) + std::abs(a(x))))
      throw InvalidArgument("operator '" + op.scheme + "' is not symmetric in its declared weight");
  }

  DiscreteOperator d;
  d.grid = g;
  d.rho = rho;
  d.op = op;
  d.diag.resize(N);
  d.upper.resize(N - 1);
  d.lower.resize(N - 1);
  for (int i = 0; i < N; ++i) {
    d.diag[i] = -(P[i] + P[i + 1]) / (rho[i] * h2) + cv[i];
    if (i + 1 < N) {
      d.upper[i] = P[i + 1] / (rho[i] * h2);
      d.lower[i] = P[i + 1] / (rho[i + 1] * h2);
    }
  }
  d.sym_diag = d.diag;
  d.sym_off.resize(N - 1);
  for (int i = 0; i + 1 < N; ++i) d.sym_off[i] = P[i + 1] / (h2 * std::sqrt(rho[i] * rho[i + 1]));
  d.symmetrized = true;
  return d;
}

DiscreteOperator discretize_naive(const OperatorCoefficients& op, const Grid& g) {
  const BoundExpr a(op.a, op.bindings), b(op.b, op.bindings), c(op.c, op.bindings), w(op.weight, op.bindings);
  const int N = g.N;
  const double h = g.h, h2 = h * h;
  const Eigen::VectorXd av = sample(a, g.x, "kinetic coefficient");
  const Eigen::VectorXd bv = sample(b, g.x, "first-order coefficient");
  const Eigen::VectorXd cv = sample(c, g.x, "potential term");

  DiscreteOperator d;
  d.grid = g;
  d.rho = sample(w, g.x, "weight");
  d.op = op;
  d.diag = -2.0 * av / h2 + cv;
  d.upper.resize(N - 1);
  d.lower.resize(N - 1);
  for (int i = 0; i + 1 < N; ++i) {
    d.upper[i] = av[i] / h2 + bv[i] / (2.0 * h);
    d.lower[i] = av[i + 1] / h2 - bv[i + 1] / (2.0 * h);
  }
  return d;
}

double hermiticity_residual(const DiscreteOperator& dop, int trials, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  const Eigen::Index n = dop.diag.size();
  const double h = dop.grid.h;
  const Eigen::VectorXd wgt = dop.rho * h;
  auto inner = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) { return (u.array() * v.array() * wgt.array()).sum(); };
  const double norm = dop.norm_estimate();

  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd u(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) u[i] = dist(gen);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = dist(gen);
    const double lhs = inner(u, dop.apply(w));
    const double rhs = inner(dop.apply(u), w);
    const double scale = std::sqrt(inner(u, u) * inner(w, w)) * norm;
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

Spectrum solve_spectrum(const DiscreteOperator& dop, int k) {
  if (!dop.symmetrized) throw InvalidArgument("operator has no symmetric form; use discretize()");
  if (k < 1 || k > dop.grid.N) throw InvalidArgument("k must lie in 1..N");
  const SymmetricTridiagonal<double> T(dop.sym_diag, dop.sym_off);
  Spectrum s;
  T.lowest(k, s.eigenvalues, s.eigenvectors);
  for (Eigen::Index j = 1; j < k; ++j) {
    if (!(s.eigenvalues[j] > s.eigenvalues[j - 1]))
      throw ConvergenceError("eigenvalues not separated", static_cast<int>(j));
  }
  const Eigen::ArrayXd scale = (dop.rho.array() * dop.grid.h).rsqrt();
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::VectorXd psi = (s.eigenvectors.col(j).array() * scale).matrix();
    const double big = psi.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      if (std::abs(psi[i]) > 1e-3 * big) {
        if (psi[i] < 0) psi = -psi;
        break;
      }
    }
    s.eigenvectors.col(j) = psi;
  }
  s.grid = dop.grid;
  s.rho = dop.rho;
  s.errors = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::quiet_NaN());
  s.N_list = {dop.grid.N};
  return s;
}

int node_count(const Eigen::VectorXd& psi, double floor) {
  const double cut = floor * psi.cwiseAbs().maxCoeff();
  int changes = 0, last = 0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if (std::abs(psi[i]) <= cut) continue;
    const int sign = psi[i] > 0 ? 1 : -1;
    if (last != 0 && sign != last) ++changes;
    last = sign;
  }
  return changes;
}

namespace {

bool is_even(const ProblemDef& p, double x0) {
  if (x0 != 0.0) return false;
  if (!(p.domain.lower == -p.domain.upper)) return false;
  try {
    for (double x : interior_samples(p.domain, 32, 3)) {
      const double m1 = p.m(x), m2 = p.m(-x), v1 = p.V(x), v2 = p.V(-x);
      if (std::abs(m1 - m2) > 1e-13 * std::abs(m1) || std::abs(v1 - v2) > 1e-13 * (1.0 + std::abs(v1)))
        return false;
    }
  } catch (const DomainFault&) {
    return false;
  }
  return true;
}

}  // namespace

TruncationBox truncation_box(const ProblemDef& p, const BoxOptions& options) {
  const double x0 = options.x0.value_or(p.domain.default_anchor());
  const double reach = std::max(options.y_cap, options.y_cut.value_or(0.0)) + 1.0;
  ArclengthOptions map_options;
  map_options.y_span = reach;
  const ArclengthMap map = arclength_map(p, x0, 2000, map_options);

  TruncationBox box;
  box.threshold = 2.0 * options.target + 10.0;
  const Domain& d = p.domain;
  const double width = d.finite() ? d.upper - d.lower : 0.0;

  auto exceeds = [&](double y) {
    try {
      return p.V(map.inverse(y)) >= box.threshold;
    } catch (const DomainFault&) {
      return true;
    }
  };

  auto side = [&](double dir) {
    const double edge = dir > 0 ? d.upper : d.lower;
    const EndpointKind kind = dir > 0 ? d.upper_kind : d.lower_kind;
    if (kind == EndpointKind::OpenRegular) return edge;
    const double ylim = std::abs(dir > 0 ? map.y_upper() : map.y_lower());
    const double inset = 1e-6 * (width > 0 ? width : std::max(1.0, std::abs(edge - x0)));
    auto at_edge = [&] { return edge - dir * inset; };

    if (options.y_cut) {
      if (*options.y_cut < ylim) return map.inverse(dir * *options.y_cut);
      return at_edge();
    }
    const double stop = std::min(options.y_cap, ylim * (1.0 - 1e-9));
    const double dy = std::min(0.01, stop / 64);
    double prev = 0.0;
    for (double y = dy; y <= stop; y += dy) {
      if (exceeds(dir * y)) {
        double lo = prev, hi = y;
        for (int i = 0; i < 80 && hi - lo > 1e-13 * std::max(1.0, hi); ++i) {
          const double mid = 0.5 * (lo + hi);
          if (exceeds(dir * mid)) hi = mid; else lo = mid;
        }
        return map.inverse(dir * hi);
      }
      prev = y;
    }
    if (options.y_cap < ylim) return map.inverse(dir * options.y_cap);
    return at_edge();
  };

  box.xL = side(-1.0);
  box.xR = side(1.0);
  if (is_even(p, x0)) {
    const double r = std::max(-box.xL, box.xR);
    box.xL = -r;
    box.xR = r;
  }
  if (!(box.xL < box.xR) || !std::isfinite(box.xL) || !std::isfinite(box.xR))
    throw Error("truncation infeasible: no admissible box inside the domain");
  box.yL = map.forward(box.xL);
  box.yR = map.forward(box.xR);
  return box;
}

ProblemDef transform_to_arclength(const ProblemDef& p, double y_lo, double y_hi, int table_points,
                                  std::optional<double> x0) {
  if (!(y_lo < y_hi)) throw InvalidArgument("arclength range must satisfy y_lo < y_hi");
  if (table_points < 4) throw InvalidArgument("too few table points");
  ArclengthOptions map_options;
  map_options.y_span = std::max(std::abs(y_lo), std::abs(y_hi)) + 1.0;
  const ArclengthMap map = arclength_map(p, x0.value_or(p.domain.default_anchor()), 4000, map_options);

  const double hy = (y_hi - y_lo) / (table_points - 1);
  Eigen::VectorXd values(table_points);
  for (int j = 0; j < table_points; ++j) {
    const double y = j + 1 == table_points ? y_hi : y_lo + j * hy;
    values[j] = p.V(map.inverse(y));
  }
  ProblemDef q;
  q.name = p.name.empty() ? "arclength" : p.name + "/arclength";
  q.mass = Expr(1.0);
  q.potential = Expr::sampled(std::make_shared<const UniformCubicSpline>(y_lo, hy, std::move(values)));
  q.domain = Domain::interval(y_lo, y_hi, EndpointKind::OpenRegular, EndpointKind::OpenRegular);
  return q;
}

ProblemDef transform_to_arclength(const ProblemDef& p) {
  const TruncationBox box = truncation_box(p);
  return transform_to_arclength(p, box.yL, box.yR);
}

namespace {

struct Route {
  OperatorCoefficients op;
  double lo, hi;
};

Route make_route(const ProblemDef& p, const OrderingScheme& scheme, const RefineOptions& o) {
  if (!o.transformed) return {build_operator(p, o.hbar, scheme), o.box.xL, o.box.xR};
  if (scheme.kind == OrderingScheme::Kind::VonRoos)
    throw InvalidArgument("the arclength route applies to the noether / laplace-beltrami operator");
  const ProblemDef q = transform_to_arclength(p, o.box.yL, o.box.yR, o.table_points);
  return {build_noether(q, o.hbar), o.box.yL, o.box.yR};
}

}  // namespace

Spectrum refine_spectrum(const ProblemDef& p, const OrderingScheme& scheme, int k, const std::vector<int>& N_list,
                         const RefineOptions& options) {
  if (N_list.size() < 2) throw InvalidArgument("refinement needs at least two grid sizes");
  for (std::size_t i = 1; i < N_list.size(); ++i)
    if (!(N_list[i] > N_list[i - 1])) throw InvalidArgument("grid sizes must increase");

  const Route route = make_route(p, scheme, options);
  std::vector<Eigen::VectorXd> runs;
  std::vector<double> steps;
  Spectrum finest;
  for (int N : N_list) {
    finest = solve_spectrum(discretize(route.op, Grid::uniform(route.lo, route.hi, N)), k);
    runs.push_back(finest.eigenvalues);
    steps.push_back(finest.grid.h);
  }

  const std::size_t n = runs.size();
  bool monotone = true;
  for (std::size_t i = 2; i < n && monotone; ++i) {
    for (int j = 0; j < k; ++j) {
      const double d1 = runs[i - 1][j] - runs[i - 2][j];
      const double d2 = runs[i][j] - runs[i - 1][j];
      const double noise = 1e-13 * std::max(1.0, std::abs(runs[i][j]));
      if (std::abs(d1) <= noise && std::abs(d2) <= noise) continue;
      if (d1 * d2 < 0 || std::abs(d2) >= std::abs(d1)) {
        monotone = false;
        break;
      }
    }
  }

  const Eigen::VectorXd& fine = runs[n - 1];
  const Eigen::VectorXd& coarse = runs[n - 2];
  finest.N_list = N_list;
  finest.monotone = monotone;
  if (monotone) {
    const double r = steps[n - 2] / steps[n - 1];
    const Eigen::VectorXd extrapolated = fine + (fine - coarse) / (r * r - 1.0);
    finest.errors = (extrapolated - fine).cwiseAbs();
    finest.eigenvalues = extrapolated;
    finest.extrapolated = true;
  } else {
    finest.errors = (fine - coarse).cwiseAbs();
    finest.eigenvalues = fine;
  }
  return finest;
}

SolveOutcome solve_problem(const ProblemDef& p, const SolveRequest& request) {
  if (request.k < 1) throw InvalidArgument("k must be positive");
  BoxOptions box_options;
  box_options.target = request.k - 0.5;
  box_options.y_cut = request.y_cut;

  auto run = [&](const TruncationBox& box) {
    RefineOptions o;
    o.hbar = request.hbar;
    o.box = box;
    o.transformed = request.transformed;
    if (request.N_list.size() >= 2) return refine_spectrum(p, request.scheme, request.k, request.N_list, o);
    const Route route = make_route(p, request.scheme, o);
    const int N = request.N_list.empty() ? request.N : request.N_list.front();
    return solve_spectrum(discretize(route.op, Grid::uniform(route.lo, route.hi, N)), request.k);
  };

  SolveOutcome out;
  out.box = truncation_box(p, box_options);
  out.spectrum = run(out.box);
  if (!request.y_cut) {
    const double top = out.spectrum.eigenvalues[request.k - 1];
    if (top > box_options.target) {
      box_options.target = top;
      const TruncationBox wider = truncation_box(p, box_options);
      if (wider.xL != out.box.xL || wider.xR != out.box.xR) {
        out.box = wider;
        out.spectrum = run(out.box);
      }
    }
  }

  RefineOptions o;
  o.hbar = request.hbar;
  o.box = out.box;
  o.transformed = request.transformed;
  const Route route = make_route(p, request.scheme, o);
  out.hermiticity = hermiticity_residual(discretize(route.op, out.spectrum.grid), 8);
  return out;
}

std::string spectrum_json(const Spectrum& s, const std::string& model, const std::string& scheme,
                          const Bindings& params) {
  nlohmann::json j;
  j["model"] = model;
  j["scheme"] = scheme;
  j["params"] = nlohmann::json::object();
  for (const auto& [name, value] : params) j["params"][name] = value;
  j["N"] = s.grid.N;
  j["N_list"] = s.N_list;
  j["eigenvalues"] = std::vector<double>(s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size());
  nlohmann::json errs = nlohmann::json::array();
  for (Eigen::Index i = 0; i < s.errors.size(); ++i) {
    if (std::isfinite(s.errors[i])) errs.push_back(s.errors[i]); else errs.push_back(nullptr);
  }
  j["errors"] = errs;
  j["extrapolated"] = s.extrapolated;
  j["monotone"] = s.monotone;
  return j.dump(2);
}

void write_eigenfunctions_csv(const Spectrum& s, std::ostream& out) {
  out << 'x';
  for (Eigen::Index j = 0; j < s.eigenvectors.cols(); ++j) out << ",psi_" << j;
  out << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < s.grid.x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", s.grid.x[i]);
    out << buf;
    for (Eigen::Index j = 0; j < s.eigenvectors.cols(); ++j) {
      std::snprintf(buf, sizeof buf, ",%.17g", s.eigenvectors(i, j));
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace pdmq

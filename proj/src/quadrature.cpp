#include "pdmq/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "pdmq/error.hpp"

namespace pdmq {

namespace {

// Kronrod 15-point abscissae and weights with the embedded 7-point Gauss rule.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

void gk15(const std::function<double(double)>& f, double a, double b, double& result, double& err) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  result = kronrod * half;
  err = std::abs((kronrod - gauss) * half);
}

}  // namespace

QuadratureResult integrate_gk(const std::function<double(double)>& f, double a, double b, double abs_tol,
                              int max_panels) {
  QuadratureResult acc;
  if (a == b) return acc;
  if (a > b) {
    QuadratureResult r = integrate_gk(f, b, a, abs_tol, max_panels);
    r.value = -r.value;
    return r;
  }

  // global adaptive: keep splitting the panel with the largest error estimate
  struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  std::priority_queue<Panel> heap;
  Panel first{a, b, 0.0, 0.0};
  gk15(f, a, b, first.value, first.err);
  heap.push(first);
  double total = first.value, err = first.err;
  const double eps = std::numeric_limits<double>::epsilon();
  int panels = 1;
  while (err > std::max(abs_tol, 50.0 * eps * std::abs(total))) {
    if (panels >= max_panels) {
      acc.converged = false;
      break;
    }
    const Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid == worst.a || mid == worst.b) {
      acc.converged = false;
      break;
    }
    heap.pop();
    Panel left{worst.a, mid, 0.0, 0.0}, right{mid, worst.b, 0.0, 0.0};
    gk15(f, left.a, left.b, left.value, left.err);
    gk15(f, right.a, right.b, right.value, right.err);
    total += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // re-sum to shed the running-update rounding
  acc.value = 0.0;
  acc.error = 0.0;
  while (!heap.empty()) {
    acc.value += heap.top().value;
    acc.error += heap.top().err;
    heap.pop();
  }
  return acc;
}

LimitResult integrate_to_endpoint(const std::function<double(double)>& f, double from, double endpoint,
                                  double abs_tol) {
  LimitResult out;
  const double dir = endpoint > from ? 1.0 : -1.0;
  const bool infinite = std::isinf(endpoint);
  const auto diverged = [&] {
    out.finite = false;
    out.value = dir * std::numeric_limits<double>::infinity();
    return out;
  };

  // finite endpoint: the remaining distance halves per chunk; infinite: the
  // chunk length doubles
  const double floor_dist = infinite ? 0.0 : 1e-15 * std::max(1.0, std::abs(endpoint));
  double x = from;
  double width = infinite ? std::max(1.0, std::abs(from)) : 0.5 * std::abs(endpoint - from);
  double sum = 0.0, prev = 0.0, ratio = 0.0;
  int stalled = 0;

  for (int chunk = 0; chunk < 4000; ++chunk) {
    const double next = x + dir * width;
    if (!std::isfinite(next) || next == x) break;
    if (!infinite && std::abs(endpoint - next) < floor_dist) break;

    const double c = std::abs(integrate_gk(f, x, next, abs_tol * 1e-2).value);
    sum += c;
    ++out.chunks;
    if (chunk > 0) {
      ratio = prev > 0 ? c / prev : 0.0;
      stalled = ratio > 0.95 ? stalled + 1 : 0;
    }
    prev = c;
    if (stalled >= 12) return diverged();
    if (chunk > 0 && ratio < 0.95 && c * ratio / (1.0 - ratio) < abs_tol) break;
    x = next;
    width = infinite ? 2.0 * width : 0.5 * std::abs(endpoint - x);
  }
  if (stalled > 0) return diverged();
  if (ratio > 0.0 && ratio < 0.95) sum += prev * ratio / (1.0 - ratio);
  out.value = dir * sum;
  return out;
}

}  // namespace pdmq

#include "pdmq/interp.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "pdmq/error.hpp"

namespace pdmq {

UniformCubicSpline::UniformCubicSpline(double x0, double h, Eigen::VectorXd values)
    : x0_(x0), h_(h), values_(std::move(values)) {
  const Eigen::Index n = values_.size();
  if (n < 4 || !(h_ > 0.0)) throw InvalidArgument("cubic spline needs >= 4 samples and h > 0");
  second_ = Eigen::VectorXd::Zero(n);

  // Tridiagonal system for the interior second derivatives (natural ends).
  const Eigen::Index m = n - 2;
  Eigen::VectorXd rhs(m), cprime(m);
  for (Eigen::Index i = 0; i < m; ++i)
    rhs[i] = 6.0 * (values_[i + 2] - 2.0 * values_[i + 1] + values_[i]) / (h_ * h_);
  // Thomas algorithm on diag 4, off-diagonals 1.
  cprime[0] = 1.0 / 4.0;
  rhs[0] /= 4.0;
  for (Eigen::Index i = 1; i < m; ++i) {
    const double denom = 4.0 - cprime[i - 1];
    cprime[i] = 1.0 / denom;
    rhs[i] = (rhs[i] - rhs[i - 1]) / denom;
  }
  for (Eigen::Index i = m - 2; i >= 0; --i) rhs[i] -= cprime[i] * rhs[i + 1];
  second_.segment(1, m) = rhs;
}

double UniformCubicSpline::evaluate(double x, int order) const {
  const Eigen::Index n = values_.size();
  double s = (x - x0_) / h_;
  auto i = static_cast<Eigen::Index>(std::floor(s));
  i = std::clamp<Eigen::Index>(i, 0, n - 2);
  const double t = s - static_cast<double>(i);
  const double a = 1.0 - t;
  const double y0 = values_[i], y1 = values_[i + 1];
  const double m0 = second_[i], m1 = second_[i + 1];
  const double h2 = h_ * h_;
  switch (order) {
    case 0:
      return a * y0 + t * y1 + ((a * a * a - a) * m0 + (t * t * t - t) * m1) * h2 / 6.0;
    case 1:
      return (y1 - y0) / h_ + ((1.0 - 3.0 * a * a) * m0 + (3.0 * t * t - 1.0) * m1) * h_ / 6.0;
    case 2:
      return a * m0 + t * m1;
    case 3:
      return (m1 - m0) / h_;
    default:
      return 0.0;
  }
}

MonotoneCubic::MonotoneCubic(Eigen::VectorXd knots, Eigen::VectorXd values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  const Eigen::Index n = knots_.size();
  if (n < 2 || values_.size() != n) throw InvalidArgument("monotone cubic needs >= 2 matching samples");
  Eigen::VectorXd delta(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double dk = knots_[i + 1] - knots_[i];
    if (!(dk > 0.0)) throw InvalidArgument("monotone cubic knots must be strictly increasing");
    delta[i] = (values_[i + 1] - values_[i]) / dk;
  }
  slopes_.resize(n);
  slopes_[0] = delta[0];
  slopes_[n - 1] = delta[n - 2];
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      slopes_[i] = 0.0;
    } else {
      // weighted harmonic mean keeps the interpolant monotone on uneven knots
      const double h0 = knots_[i] - knots_[i - 1];
      const double h1 = knots_[i + 1] - knots_[i];
      const double w0 = 2.0 * h1 + h0, w1 = h1 + 2.0 * h0;
      slopes_[i] = (w0 + w1) / (w0 / delta[i - 1] + w1 / delta[i]);
    }
  }
}

Eigen::Index MonotoneCubic::interval(double t) const {
  const double* begin = knots_.data();
  const double* end = begin + knots_.size();
  auto it = std::upper_bound(begin, end, t);
  auto i = static_cast<Eigen::Index>(it - begin) - 1;
  return std::clamp<Eigen::Index>(i, 0, knots_.size() - 2);
}

double MonotoneCubic::operator()(double t) const {
  const Eigen::Index i = interval(t);
  const double h = knots_[i + 1] - knots_[i];
  const double s = (t - knots_[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * values_[i] + h10 * h * slopes_[i] + h01 * values_[i + 1] + h11 * h * slopes_[i + 1];
}

}  // namespace pdmq

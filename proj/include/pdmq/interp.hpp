#pragma once

#include <Eigen/Core>

namespace pdmq {

/// Natural cubic spline through samples on a uniform grid.
///
/// Queries outside [front, back] are clamped to the end intervals and
/// extrapolate the end cubic.
class UniformCubicSpline {
 public:
  UniformCubicSpline(double x0, double h, Eigen::VectorXd values);

  double operator()(double x) const { return evaluate(x, 0); }

  /// Value (order 0) or derivative of order 1..3 of the interpolant.
  double evaluate(double x, int order) const;

  double front() const { return x0_; }
  double back() const { return x0_ + h_ * static_cast<double>(values_.size() - 1); }
  Eigen::Index size() const { return values_.size(); }

 private:
  double x0_;
  double h_;
  Eigen::VectorXd values_;
  Eigen::VectorXd second_;  // second derivatives at the knots
};

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson limiter).
/// Knots must be strictly increasing; monotone data stays monotone.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(Eigen::VectorXd knots, Eigen::VectorXd values);

  double operator()(double t) const;

  /// Index i with knots[i] <= t < knots[i+1], clamped to the valid range.
  Eigen::Index interval(double t) const;

  const Eigen::VectorXd& knots() const { return knots_; }
  const Eigen::VectorXd& values() const { return values_; }

 private:
  Eigen::VectorXd knots_;
  Eigen::VectorXd values_;
  Eigen::VectorXd slopes_;
};

}  // namespace pdmq

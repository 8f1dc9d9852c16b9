#pragma once

// Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for selected
// eigenvalues, inverse iteration for their eigenvectors.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pdmq/error.hpp"

namespace pdmq {

template <typename Scalar>
class SymmetricTridiagonal {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  SymmetricTridiagonal(Vector diag, Vector off) : d_(std::move(diag)), e_(std::move(off)) {
    if (d_.size() == 0 || e_.size() != d_.size() - 1)
      throw InvalidArgument("tridiagonal: off-diagonal must have n - 1 entries");
    e2_ = e_.array().square();
    lo_ = hi_ = d_[0];
    for (Eigen::Index i = 0; i < size(); ++i) {
      Scalar r = 0;
      if (i > 0) r += std::abs(e_[i - 1]);
      if (i + 1 < size()) r += std::abs(e_[i]);
      lo_ = std::min(lo_, d_[i] - r);
      hi_ = std::max(hi_, d_[i] + r);
    }
    pivmin_ = std::numeric_limits<Scalar>::min() * std::max<Scalar>(Scalar(1), e2_.size() ? e2_.maxCoeff() : 0);
  }

  Eigen::Index size() const { return d_.size(); }
  const Vector& diagonal() const { return d_; }
  const Vector& off_diagonal() const { return e_; }
  Scalar gershgorin_lower() const { return lo_; }
  Scalar gershgorin_upper() const { return hi_; }

  /// Number of eigenvalues strictly below x.
  Eigen::Index count_below(Scalar x) const {
    Eigen::Index count = 0;
    Scalar q = d_[0] - x;
    for (Eigen::Index i = 0;; ++i) {
      if (std::abs(q) < pivmin_) q = -pivmin_;
      if (q < 0) ++count;
      if (i + 1 == size()) break;
      q = d_[i + 1] - x - e2_[i] / q;
    }
    return count;
  }

  /// k-th smallest eigenvalue (0-based) by bisection to working precision.
  Scalar eigenvalue(Eigen::Index k) const {
    if (k < 0 || k >= size()) throw InvalidArgument("eigenvalue index out of range");
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    const Scalar scale = std::max(std::abs(lo_), std::abs(hi_));
    Scalar a = lo_ - eps * scale - pivmin_, b = hi_ + eps * scale + pivmin_;
    for (int iter = 0; iter < 400; ++iter) {
      const Scalar mid = a + (b - a) / 2;
      if (b - a <= 2 * eps * std::max(std::abs(a), std::abs(b)) + pivmin_ || mid == a || mid == b)
        return mid;
      if (count_below(mid) > k) b = mid; else a = mid;
    }
    throw ConvergenceError("bisection did not converge", static_cast<int>(k));
  }

  /// Unit eigenvector for an eigenvalue estimate. `against` holds earlier
  /// vectors to orthogonalize against (columns).
  Vector eigenvector(Scalar lambda, const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>* against = nullptr,
                     Eigen::Index count = 0) const {
    const Eigen::Index n = size();
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    const Scalar norm = std::max(std::abs(lo_), std::abs(hi_));

    // LU with partial pivoting of T - lambda I; U has two superdiagonals
    Vector u0(n), u1(n), u2(n), mult(n);
    std::vector<char> swapped(static_cast<std::size_t>(n), 0);
    u1.setZero();
    u2.setZero();
    mult.setZero();
    Scalar w0 = d_[0] - lambda, w1 = n > 1 ? e_[0] : Scalar(0), w2 = 0;  // working row
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const Scalar s0 = e_[i], s1 = d_[i + 1] - lambda, s2 = i + 2 < n ? e_[i + 1] : Scalar(0);
      if (std::abs(s0) > std::abs(w0)) {
        swapped[i] = 1;
        const Scalar m = w0 / s0;
        u0[i] = s0;
        u1[i] = s1;
        u2[i] = s2;
        mult[i] = m;
        w0 = w1 - m * s1;
        w1 = w2 - m * s2;
      } else {
        if (w0 == 0) w0 = eps * norm;
        const Scalar m = s0 / w0;
        u0[i] = w0;
        u1[i] = w1;
        u2[i] = w2;
        mult[i] = m;
        w0 = s1 - m * w1;
        w1 = s2 - m * w2;
      }
      w2 = 0;
    }
    u0[n - 1] = w0 == 0 ? eps * norm : w0;

    auto solve = [&](Vector& x) {
      for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (swapped[i]) std::swap(x[i], x[i + 1]);
        x[i + 1] -= mult[i] * x[i];
      }
      for (Eigen::Index i = n - 1; i >= 0; --i) {
        Scalar s = x[i];
        if (i + 1 < n) s -= u1[i] * x[i + 1];
        if (i + 2 < n) s -= u2[i] * x[i + 2];
        Scalar p = u0[i];
        if (p == 0) p = eps * norm;
        x[i] = s / p;
      }
    };

    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = Scalar(1) + Scalar(i % 7) / Scalar(13);
    x.normalize();
    for (int iter = 0; iter < 4; ++iter) {
      solve(x);
      if (against) {
        for (Eigen::Index j = 0; j < count; ++j) x -= against->col(j).dot(x) * against->col(j);
      }
      const Scalar nrm = x.norm();
      if (!(nrm > 0) || !std::isfinite(static_cast<double>(nrm)))
        throw ConvergenceError("inverse iteration broke down", 0);
      x /= nrm;
    }
    return x;
  }

  /// Lowest k eigenvalues and unit eigenvectors (columns).
  void lowest(Eigen::Index k, Vector& values, Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& vectors) const {
    if (k < 1 || k > size()) throw InvalidArgument("requested eigenpair count out of range");
    values.resize(k);
    vectors.resize(size(), k);
    for (Eigen::Index j = 0; j < k; ++j) {
      values[j] = eigenvalue(j);
      vectors.col(j) = eigenvector(values[j], &vectors, j);
    }
  }

 private:
  Vector d_, e_, e2_;
  Scalar lo_ = 0, hi_ = 0, pivmin_ = 0;
};

}  // namespace pdmq

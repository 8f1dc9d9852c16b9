#pragma once

// Discretization of weighted Sturm-Liouville operators on uniform grids and
// the low-lying spectrum, directly or through the arclength coordinate.

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pdmq/geometry.hpp"
#include "pdmq/quantize.hpp"

namespace pdmq {

/// N interior points of [xL, xR], Dirichlet at both ends.
struct Grid {
  int N = 0;
  double h = 0.0;
  double xL = 0.0, xR = 0.0;
  Eigen::VectorXd x;

  static Grid uniform(double xL, double xR, int N);
};

struct DiscreteOperator {
  Grid grid;
  Eigen::VectorXd rho;
  // H as three bands: lower(i) = H(i+1, i), upper(i) = H(i, i+1)
  Eigen::VectorXd lower, diag, upper;
  // S = R^{1/2} H R^{-1/2}
  Eigen::VectorXd sym_diag, sym_off;
  bool symmetrized = false;
  OperatorCoefficients op;

  Eigen::VectorXd apply(const Eigen::VectorXd& psi) const;
  /// Largest absolute row sum of S (of H when not symmetrized).
  double norm_estimate() const;
  /// max |S(i,i+1) - S(i+1,i)| / max |S|.
  double asymmetry() const;
};

/// Conservative flux form (1/rho) D(rho a D) + c. Throws InvalidArgument when
/// b differs from (rho a)'/rho, i.e. the operator is not symmetric in its weight.
DiscreteOperator discretize(const OperatorCoefficients& op, const Grid& g);

/// a D^2 + b D + c by plain central differences; diagnostics only.
DiscreteOperator discretize_naive(const OperatorCoefficients& op, const Grid& g);

double hermiticity_residual(const DiscreteOperator& dop, int trials, unsigned seed = 11);

struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // columns, rho-normalized
  Grid grid;
  Eigen::VectorXd rho;
  Eigen::VectorXd errors;        // refinement error bars; NaN when not refined
  std::vector<int> N_list;
  bool extrapolated = false;
  bool monotone = true;
};

Spectrum solve_spectrum(const DiscreteOperator& dop, int k);

/// Interior sign changes, ignoring entries below `floor` times the largest.
int node_count(const Eigen::VectorXd& psi, double floor = 1e-10);

struct TruncationBox {
  double xL = 0.0, xR = 0.0;
  double yL = 0.0, yR = 0.0;
  double threshold = 0.0;
};

struct BoxOptions {
  double target = 0.5;                 // expected highest eigenvalue of interest
  std::optional<double> y_cut;         // explicit arclength half-width
  double y_cap = 12.0;
  std::optional<double> x0;
};

/// Bounds where the arclength-coordinate potential reaches 2*target + 10,
/// capped at |y| = y_cap; regular endpoints are kept, singular ones inset.
TruncationBox truncation_box(const ProblemDef& p, const BoxOptions& options = {});

/// Constant-mass problem in y on [y_lo, y_hi] with the tabulated potential
/// V(x(y)).
ProblemDef transform_to_arclength(const ProblemDef& p, double y_lo, double y_hi, int table_points = 20001,
                                  std::optional<double> x0 = std::nullopt);
/// Same on the default truncation box.
ProblemDef transform_to_arclength(const ProblemDef& p);

struct RefineOptions {
  double hbar = 1.0;
  TruncationBox box;
  bool transformed = false;  // solve the arclength problem instead
  int table_points = 20001;
};

/// Solve at each N (increasing) and Richardson-extrapolate the last two
/// assuming O(h^2). Non-monotone convergence is reported without extrapolation.
Spectrum refine_spectrum(const ProblemDef& p, const OrderingScheme& scheme, int k, const std::vector<int>& N_list,
                         const RefineOptions& options);

struct SolveRequest {
  OrderingScheme scheme = OrderingScheme::noether();
  double hbar = 1.0;
  int k = 5;
  int N = 2000;
  std::vector<int> N_list;
  std::optional<double> y_cut;
  bool transformed = false;
};

struct SolveOutcome {
  Spectrum spectrum;
  TruncationBox box;
  double hermiticity = 0.0;
};

/// Truncation, assembly, solve (and refinement when N_list is given), with one
/// box re-check against the computed highest eigenvalue.
SolveOutcome solve_problem(const ProblemDef& p, const SolveRequest& request);

/// {model, scheme, params, N, eigenvalues[], errors[]}.
std::string spectrum_json(const Spectrum& s, const std::string& model, const std::string& scheme,
                          const Bindings& params);
/// Columns x, psi_0 .. psi_{k-1}.
void write_eigenfunctions_csv(const Spectrum& s, std::ostream& out);

}  // namespace pdmq

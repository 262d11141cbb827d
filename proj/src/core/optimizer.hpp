#pragma once

#include <functional>

#include <Eigen/Dense>

namespace evcop {

/// Objective for maximization: returns the value and fills `grad` when it is
/// non-null. A non-finite value marks an infeasible point.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

struct LbfgsOptions {
  int max_iter = 500;
  /// Stop when the gradient infinity-norm falls below this.
  double grad_tol = 1e-3;
  /// Or when the relative gain of an iteration falls below this.
  double rel_tol = 1e-10;
  int history = 8;
  int max_backtracks = 50;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd grad;
  int iterations = 0;
  bool converged = false;
};

/// Limited-memory BFGS ascent with a backtracking Armijo line search. Only
/// improving steps are accepted, so the value is non-decreasing. Throws
/// NumericalError when the start point is infeasible.
LbfgsResult lbfgs_maximize(const Objective& f, Eigen::VectorXd x0, const LbfgsOptions& opts = {});

}  // namespace evcop

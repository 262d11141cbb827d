#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "splinebasis.hpp"

namespace evcop {

using RealFn = std::function<double(double)>;

/// 512 equispaced nodes on [0,1] merged with the given breakpoints, plus 128
/// graded nodes inside the first knot interval.
std::vector<double> default_density_grid(std::span<const double> breakpoints = {});

/// x -> exp p(x) / int exp p, the integral taken by the trapezoidal rule on
/// `grid`. Throws NumericalError if |p| exceeds 700 on the grid.
RealFn clr_inverse(RealFn p, std::span<const double> grid);

/// log f minus its trapezoidal mean over `grid`.
RealFn clr(RealFn f, std::span<const double> grid);

/// Normalized product f g and normalized power f^alpha.
RealFn perturb(RealFn f, RealFn g, std::span<const double> grid);
RealFn power(double alpha, RealFn f, std::span<const double> grid);

/// Half the L1 distance by the trapezoidal rule; `grid` needs >= 1024 nodes.
double tvd(const RealFn& f, const RealFn& g, std::span<const double> grid);
/// Same on 4097 equispaced nodes.
double tvd(const RealFn& f, const RealFn& g);

/// A density exp(p_theta)/I over a zero-integral spline basis. With the
/// center enabled, the spline coefficients are theta + theta_0 where
/// theta_0 = project_center(basis).
class ClrDensity {
 public:
  ClrDensity(ZBasis basis, Eigen::VectorXd theta, bool center_enabled,
             std::vector<double> eval_grid = {});

  const ZBasis& basis() const { return basis_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  /// Coefficients actually applied to the basis.
  const Eigen::VectorXd& coefficients() const { return coef_; }
  bool center_enabled() const { return center_; }
  const std::vector<double>& grid() const { return grid_; }
  /// Trapezoidal estimate of int exp p over the grid.
  double normalizer() const { return norm_; }

  /// The clr function p(x), with derivatives for order 1, 2.
  double clr_value(double x, int deriv_order = 0) const;
  double pdf(double x) const;
  RealFn as_function() const;

 private:
  ZBasis basis_;
  Eigen::VectorXd theta_, coef_;
  bool center_;
  std::vector<double> grid_;
  double norm_ = 1.0;
};

}  // namespace evcop

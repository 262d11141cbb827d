#pragma once

#include <span>
#include <vector>

#include "bayes.hpp"
#include "numerics.hpp"

namespace evcop {

/// Tabulated 2-monotone function on [0,1] with first and second derivatives
/// at each node, plus a C^2 interpolator that skips non-finite entries.
struct WilliamsonGrid {
  std::vector<double> x, W, Wp, Wpp;
  /// Accumulated tail probability sum_{k >= j} P_k at each node.
  std::vector<double> tail;
  /// Reconstructed W(0+) = total mass seen by the recurrences.
  double w0_estimate = 1.0;
  bool normalized = false;
  HermiteSpline interp;

  void build_interpolator();
  double operator()(double xv, int order = 0) const { return interp(xv, order); }
  Curve as_curve() const;
  std::size_t size() const { return x.size(); }
};

/// Backward recurrences on the nodes (0 = x_0 < ... < x_{m+1} = 1) for a
/// normalized density f. f(0) may be infinite. Throws NumericalError when the
/// computed W_1 exceeds 1.2. Segment integrals use the trapezoid rule, or an
/// n-point Gauss-Legendre rule when `gauss_points` > 0; the latter keeps the
/// tabulated W, W', W'' consistent to rounding, which a smooth A'' needs.
WilliamsonGrid williamson_from_density(const RealFn& f, std::span<const double> x_nodes,
                                       int gauss_points = 0);

/// Divides W, W', W'' by the W(0+) estimate and resets W_0 = 1. Throws
/// NumericalError when the estimate lies outside (0.5, 2).
WilliamsonGrid normalize_w(WilliamsonGrid g);

/// Tabulates an analytic W (value and derivatives) on the given nodes.
WilliamsonGrid w_grid_from_curve(const Curve& w, std::span<const double> x_nodes);

/// W(x) = (1 - x)^theta, theta >= 0.
Curve w_power_complement(double theta);
/// Williamson transform of the density of U^theta, theta > 0.
Curve w_uniform_power(double theta);

/// x* with W(x*) = x*, by bisection to |W(x*) - x*| <= 1e-10.
double fixed_point(const Curve& w);

/// Node set used for final models: 2001 uniform nodes plus the `extra` nodes
/// that lie above the uniform spacing.
std::vector<double> pipeline_w_nodes(std::span<const double> extra = {});

}  // namespace evcop

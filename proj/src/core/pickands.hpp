#pragma once

#include <span>
#include <vector>

#include "bayes.hpp"
#include "numerics.hpp"
#include "williamson.hpp"

namespace evcop {

/// Tabulated Pickands function with first and second derivatives at each
/// node and a C^2 interpolator (non-finite entries skipped).
/// Convex C^1 interpolant of one interval from end values and slopes: two
/// quadratic pieces joined at an inserted breakpoint. Degenerates to the
/// secant line when the slopes do not bracket it.
struct ConvexPatch {
  double t0 = 0.0, t1 = 0.0, y0 = 0.0, m0 = 0.0;
  double xi = 0.0, mid = 0.0, m1 = 0.0;
  bool active = false;

  static ConvexPatch fit(double t0, double t1, double y0, double y1, double m0, double m1);
  double operator()(double tv, int order) const;
};

struct PickandsModel {
  std::vector<double> t, A, Ap, App;
  HermiteSpline interp;
  // End intervals whose outer A'' is non-finite use a convex patch instead
  // of the Hermite interpolant.
  ConvexPatch head, tail;

  void build_interpolator();
  double operator()(double tv, int order = 0) const;
  Curve as_curve() const;
};

/// Rotation W -> A using the grid's own nodes: t_j = (1 + x_j - W_j)/2.
PickandsModel rotate(const WilliamsonGrid& w);
/// Rotation onto prescribed t-nodes (0 = t_0 < ... < t_{m+1} = 1), solving
/// (1 + x - W(x))/2 = t_i on the interpolated W.
PickandsModel rotate(const WilliamsonGrid& w, std::span<const double> t_nodes);
/// Rotation of an analytic W onto prescribed t-nodes.
PickandsModel rotate(const Curve& w, std::span<const double> t_nodes);

/// W from A: x(t) = t + A(t) - 1, W(x(t)) = A(t) - t. Throws NumericalError
/// where x(t) cannot be inverted.
Curve rotate_inverse(Curve a);

/// Density of Z = log U / log UV under the EVC with Pickands function A.
double h_density(const Curve& a, double z);

struct SpectralMeasure {
  std::vector<double> z, eta;
  double H0 = 0.0, H1 = 0.0;
  /// int z eta(z) dz + H1 (equals 1 for a valid measure).
  double first_moment() const;
};
SpectralMeasure spectral_from_w(const WilliamsonGrid& w);

/// Gini coefficient 4 (1 - int A).
double gini_from_pickands(const Curve& a);
/// Gini coefficient 1 - E[X] for the density f, trapezoid on `grid`.
double gini_from_density(const RealFn& f, std::span<const double> grid);

double blomqvist_beta(const Curve& a);
double upper_tail(const Curve& a);

/// Khoudraji transform with alpha, beta in (0, 1].
Curve khoudraji(Curve a, double alpha, double beta);
Curve symmetrize(Curve a);
Curve mirror(Curve a);
/// Tabulated mirror A(1 - t) on the reflected nodes.
PickandsModel mirror(const PickandsModel& a);

struct PickandsDiagnostics {
  double lower_bound_violation = 0.0;  // max of max{t,1-t} - A
  double upper_bound_violation = 0.0;  // max of A - 1
  double convexity_violation = 0.0;    // max of A(t) - (A(t-h) + A(t+h))/2
  double a0 = 1.0, a1 = 1.0;
  bool ok(double tol = 1e-6) const {
    return lower_bound_violation <= tol && upper_bound_violation <= tol &&
           convexity_violation <= tol && std::abs(a0 - 1.0) <= tol && std::abs(a1 - 1.0) <= tol;
  }
};
/// Checks bounds and convexity at 1000 equispaced probe points.
PickandsDiagnostics validate_pickands(const Curve& a);

/// Standard t-grid of `n` equispaced points, for tables and comparisons.
std::vector<double> probe_grid(std::size_t n = 1000);

}  // namespace evcop

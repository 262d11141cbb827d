#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace evcop {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A scalar function on [0,1] that can also report its first and second
/// derivatives: `f(x, 0)`, `f(x, 1)`, `f(x, 2)`.
using Curve = std::function<double(double, int)>;

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `n` nodes (Newton iteration on P_n).
const GaussRule& gauss_legendre(int n);

/// Integrate `f` over [a, b] with an `n`-point Gauss-Legendre rule.
double gauss_integrate(const std::function<double(double)>& f, double a, double b, int n);

/// Composite Gauss-Legendre over the breakpoints `edges`.
double gauss_composite(const std::function<double(double)>& f, std::span<const double> edges,
                       int n);

/// Trapezoidal weights for the (strictly increasing) nodes `x`.
std::vector<double> trapezoid_weights(std::span<const double> x);

double trapezoid(std::span<const double> x, std::span<const double> y);

/// Running trapezoid integral, out[0] = 0.
std::vector<double> cumulative_trapezoid(std::span<const double> x, std::span<const double> y);

std::vector<double> linspace(double a, double b, std::size_t n);

/// Type-7 sample quantile (linear interpolation between order statistics).
double empirical_quantile(std::vector<double> values, double p);

/// Nodes (j/(n-1))^power on [0,1]; power > 1 clusters them near 0.
std::vector<double> graded_nodes(std::size_t n, double power);

/// Sorted union of node sets with near-duplicates (closer than `min_gap`) merged.
std::vector<double> merge_nodes(std::vector<double> nodes, double min_gap = 1e-12);

struct RootOptions {
  double x_tol = 1e-14;
  int max_iter = 200;
};

/// Brent's method on [a, b] given the end values fa, fb of opposite sign
/// (either may be zero). Throws NumericalError when the root is not bracketed.
double brent_root(const std::function<double(double)>& f, double a, double b, double fa,
                  double fb, const RootOptions& opts = {});

/// Plain bisection on [a, b]; stops when |f| <= f_tol or the bracket is exhausted.
double bisect_root(const std::function<double(double)>& f, double a, double b, double f_tol,
                   int max_iter = 400);

/// Piecewise polynomial that honors value, first and second derivative data
/// at each node. Non-finite derivative entries are dropped from the local
/// system, lowering the local degree; with full data each piece is the
/// quintic Hermite interpolant, so the result is C^2 across nodes.
class HermiteSpline {
 public:
  HermiteSpline() = default;
  HermiteSpline(std::vector<double> x, std::vector<double> y, std::vector<double> dy,
                std::vector<double> d2y);

  double operator()(double x, int order = 0) const;

  std::span<const double> nodes() const { return x_; }
  std::span<const double> values() const { return y_; }
  std::span<const double> d1() const { return dy_; }
  std::span<const double> d2() const { return d2y_; }
  bool empty() const { return x_.empty(); }

 private:
  std::vector<double> x_, y_, dy_, d2y_;
  std::vector<std::array<double, 6>> coef_;  // in the local variable s in [0,1]
};

}  // namespace evcop

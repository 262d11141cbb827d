#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace evcop {

/// Interior knots and degree of a spline space on [0, 1]. The endpoints
/// carry degree + 1 coincident knots each.
struct KnotConfig {
  std::vector<double> interior;
  int degree = 3;

  void validate() const;
  int dim() const { return int(interior.size()) + degree; }
};

/// Orthonormal basis of the zero-integral splines on a knot configuration.
///
/// The basis is obtained from the B-spline basis in two steps: a Householder
/// complement of the integral functional gives a zero-integral sub-basis, and
/// the eigendecomposition of its Gram matrix (descending eigenvalues)
/// orthonormalizes it. `transform()` maps the raw B-spline values to the
/// orthonormal basis, Z = T B.
class ZBasis {
 public:
  explicit ZBasis(KnotConfig cfg);

  int dim() const { return dim_; }
  int degree() const { return cfg_.degree; }
  const KnotConfig& config() const { return cfg_; }
  /// 0, interior knots, 1.
  const std::vector<double>& breakpoints() const { return breaks_; }
  const Eigen::MatrixXd& transform() const { return transform_; }

  /// (Z_1^(k)(x), ..., Z_dim^(k)(x)) for k = deriv_order in {0, 1, 2}.
  Eigen::VectorXd eval(double x, int deriv_order = 0) const;
  /// Rows are eval(xs[i], deriv_order).
  Eigen::MatrixXd design(std::span<const double> xs, int deriv_order = 0) const;
  /// p_theta^(k)(x) = sum_i theta_i Z_i^(k)(x).
  double spline(const Eigen::VectorXd& theta, double x, int deriv_order = 0) const;

  /// Raw B-spline values (n + d + 1 of them) at x.
  Eigen::VectorXd eval_bspline(double x, int deriv_order = 0) const;
  int n_bsplines() const { return int(knots_.size()) - cfg_.degree - 1; }

  /// Gauss-Legendre nodes per knot interval used for inner products.
  int quadrature_order() const { return 2 * cfg_.degree + 2; }

  /// Coefficients <g, Z_i>. With `log_singular_at_zero` the first knot
  /// interval is split into geometrically shrinking pieces.
  Eigen::VectorXd project(const std::function<double(double)>& g,
                          bool log_singular_at_zero = false) const;

  /// Integral of Z_i over [0, 1] by the basis quadrature.
  Eigen::VectorXd integrals() const;
  /// Gram matrix <Z_i, Z_j> by the basis quadrature.
  Eigen::MatrixXd gram() const;

 private:
  int find_span(double x) const;
  // Nonzero B-splines of degree d and their derivatives up to `n` at x;
  // ders[k][j] is the k-th derivative of B_{span-d+j}.
  void basis_derivatives(double x, int span, int n, std::vector<std::vector<double>>& ders) const;
  Eigen::MatrixXd raw_gram(int deriv_order) const;

  KnotConfig cfg_;
  std::vector<double> knots_;
  std::vector<double> breaks_;
  int dim_ = 0;
  Eigen::MatrixXd transform_;
};

/// Omega_ij = int Z_i'' Z_j'' (exact Gauss quadrature).
Eigen::MatrixXd curvature_matrix(const ZBasis& basis);

/// Coordinates of the projection of -(1 + log x)/2 onto the basis; used as
/// the affine center of the spline model.
Eigen::VectorXd project_center(const ZBasis& basis);

/// The log-density -(1 + log x)/2 of U^2, centered.
double clr_uniform_square(double x);

/// Interior knots at the equally spaced sample quantiles i/(n+1).
KnotConfig quantile_knots(std::span<const double> sample, int n_interior, int degree = 3);

/// Uniformly spaced interior knots i/(n+1).
KnotConfig uniform_knots(int n_interior, int degree = 3);

}  // namespace evcop

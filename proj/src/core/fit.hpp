#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bayes.hpp"
#include "pickands.hpp"
#include "splinebasis.hpp"
#include "williamson.hpp"

namespace evcop {

struct FitConfig {
  int basis_dim = 13;
  int degree = 3;
  double lambda = 1e-4;
  /// Interior nodes of the likelihood grid (k + 2 = 80 with the ends).
  int grid_k = 78;
  int max_iter = 500;
  double grad_tol = 1e-3;
  bool normalize_w = true;
  bool ordering_heuristic = true;
  /// Overrides the heuristic when set.
  std::optional<bool> force_flip;
  std::uint64_t seed = 0;

  /// Throws InputError on out-of-range settings.
  void validate() const;
};

/// x_i = q_i + A(q_i) - 1 with A clamped to the Pickands bounds, plus the
/// ends 0 and 1; sorted and thinned to a minimum gap of 1e-6.
std::vector<double> x_grid_from_quantiles(std::span<const double> q,
                                          const std::function<double(double)>& a_tilde);

/// Interpolation grid in W space from k uniform quantiles of the z-sample and
/// the CFG estimate of A. Throws NumericalError when fewer than two interior
/// nodes survive.
std::vector<double> empirical_w_grid(std::span<const double> z_sample, int k);

/// Piecewise linear density on the knots t_i, normalized by its trapezoid
/// integral.
struct HHat {
  std::vector<double> t, h;
  double integral = 1.0;
  /// Smallest h_i before normalization; below -1e-6 the model is unusable.
  double min_h = 0.0;

  double operator()(double z) const;
};

/// Linear-time pieces shared by the likelihood and h construction, for one
/// basis, one x-grid and one sample. W is computed by the trapezoid
/// recurrences on the x-grid refined four times, with a graded first interval.
class PenalizedLikelihood {
 public:
  PenalizedLikelihood(ZBasis basis, std::vector<double> x_grid, std::vector<double> z_sample,
                      double lambda, bool center = true);

  /// sum log max(h(z_i), 1e-12) - lambda theta' Omega theta; -inf when any h_i
  /// drops below -1e-6. Fills the gradient when requested.
  double operator()(const Eigen::VectorXd& theta, Eigen::VectorXd* grad = nullptr) const;

  HHat h_hat(const Eigen::VectorXd& theta) const;
  double penalty(const Eigen::VectorXd& theta) const { return theta.dot(omega_ * theta); }
  double loglik(const Eigen::VectorXd& theta) const;

  const ZBasis& basis() const { return basis_; }
  const Eigen::MatrixXd& omega() const { return omega_; }
  const std::vector<double>& x_grid() const { return x_grid_; }
  const std::vector<double>& nodes() const { return nodes_; }
  std::size_t sample_size() const { return z_.size(); }

 private:
  struct Forward;
  bool forward(const Eigen::VectorXd& theta, Forward& fw) const;

  ZBasis basis_;
  std::vector<double> x_grid_, z_, nodes_;
  std::vector<std::size_t> grid_index_;  // x_grid_[i] == nodes_[grid_index_[i]]
  Eigen::MatrixXd design_, omega_;
  Eigen::VectorXd center_;
  std::vector<double> weights_;
  double lambda_;
};

HHat build_h_hat(const Eigen::VectorXd& theta, const ZBasis& basis, std::span<const double> x_grid,
                 bool center = true);

double penalized_loglik(const Eigen::VectorXd& theta, const ZBasis& basis, const Eigen::MatrixXd& omega,
                        std::span<const double> x_grid, std::span<const double> z_sample, double lambda);

/// Mode of a 32-bin histogram of z; true when every modal bin centre lies
/// below 1/2.
bool ordering_heuristic(std::span<const double> z_sample);

/// W from the spline density on the final node set, normalized on request.
WilliamsonGrid w_from_theta(const ZBasis& basis, const Eigen::VectorXd& theta, bool center, bool normalize);

/// W from the spline density on the final node set, normalized on request,
/// rotated, and mirrored when `flipped`.
PickandsModel pickands_from_theta(const ZBasis& basis, const Eigen::VectorXd& theta, bool center,
                                  bool normalize, bool flipped);

struct FittedModel {
  ZBasis basis;
  Eigen::VectorXd theta;
  bool center_applied = true;
  bool flipped = false;
  double lambda = 0.0;
  double loglik = 0.0;
  double penalty = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> x_grid;
  PickandsModel pickands;
};

/// The full estimation pipeline on a z-sample (at least 30 values).
FittedModel optimize(std::span<const double> z_sample, const FitConfig& config);

struct UnivariateConfig {
  int basis_dim = 17;
  int degree = 3;
  double lambda = 10.0;
  int max_iter = 500;
  double grad_tol = 1e-6;
};

/// Penalized spline density on [a, b] with a tabulated CDF and its inverse.
class UnivariateFit {
 public:
  UnivariateFit(ZBasis basis, Eigen::VectorXd theta, double a, double b);

  double pdf(double x) const;
  double cdf(double x) const;
  double quantile(double p) const;

  const ZBasis& basis() const { return basis_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  double lower() const { return a_; }
  double upper() const { return b_; }

 private:
  ZBasis basis_;
  Eigen::VectorXd theta_;
  double a_, b_;
  std::vector<double> grid_, f_, cdf_;  // on the unit interval
};

UnivariateFit fit_univariate_density(std::span<const double> sample, double a, double b,
                                     const UnivariateConfig& config = {});

struct Chain {
  std::vector<Eigen::VectorXd> states;
  double acceptance = 0.0;
  double step_scale = 0.0;
};

/// Random-walk Metropolis with spherical Gaussian proposals. The first
/// quarter of `n_samples` extra steps (20% of the run) is burn-in, during
/// which the step is tuned towards an acceptance rate in [0.2, 0.4].
Chain mcmc_sample(const std::function<double(const Eigen::VectorXd&)>& log_target,
                  Eigen::VectorXd x0, std::size_t n_samples, std::uint64_t seed,
                  double step_scale = 0.5);

struct RandomEvc {
  Eigen::VectorXd theta;
  bool mirrored = false;
  PickandsModel pickands;
};

/// Random Pickands functions from the truncated curvature prior
/// exp(-lambda (theta + theta_0)' Omega (theta + theta_0)) on |theta| <= R.
/// Every second element is mirrored.
std::vector<RandomEvc> random_pickands(double lambda, double radius, std::size_t n,
                                       std::uint64_t seed, const ZBasis& basis);

}  // namespace evcop

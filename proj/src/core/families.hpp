#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "numerics.hpp"

namespace evcop {

/// Pairs (u, v) on the copula scale.
using PairSample = std::vector<std::array<double, 2>>;

enum class Family { Gumbel, Galambos, HuslerReiss };

std::string family_name(Family f);
/// Case-insensitive lookup; throws InputError for unknown names.
Family family_from_name(const std::string& name);

struct ParametricPickands {
  Family family = Family::Gumbel;
  double theta = 1.0;
  /// (alpha, beta) of the Khoudraji extension, both in (0, 1].
  std::optional<std::pair<double, double>> khoudraji;

  /// Throws InputError when theta or (alpha, beta) is out of range.
  void validate() const;
};

/// A(t) and its first two derivatives, closed form.
double family_pickands(const ParametricPickands& p, double t, int order = 0);
Curve family_curve(const ParametricPickands& p);

/// Standard normal CDF through erfc.
double normal_cdf(double x);

/// z_i = log u_i / log(u_i v_i). Throws InputError on values outside (0,1).
std::vector<double> z_transform(const PairSample& sample);

/// Pickands' estimator on unit-exponential margins X = -log U, Y = -log V.
double pickands_estimator(const PairSample& sample, double t);
/// The estimator on a grid, optionally replaced by its greatest convex minorant.
std::vector<double> pickands_estimator(const PairSample& sample, std::span<const double> t_grid,
                                       bool convex_minorant = true);

/// Lower convex hull of the points (x_i, y_i) evaluated back at the x_i.
std::vector<double> greatest_convex_minorant(std::span<const double> x, std::span<const double> y);

/// CFG estimator: exp of the running integral of (H(z) - z)/(z(1-z)) for the
/// empirical CDF H of the z-sample, trapezoid on 1024 nodes.
class CfgEstimator {
 public:
  explicit CfgEstimator(std::span<const double> z_sample);
  static CfgEstimator from_pairs(const PairSample& sample);

  double operator()(double t) const;
  std::vector<double> operator()(std::span<const double> t_grid) const;

 private:
  double integrand(double z) const;

  std::vector<double> z_;      // sorted sample
  std::vector<double> nodes_;  // 1024 nodes on [0,1]
  std::vector<double> cum_;    // running integral at the nodes
};

std::vector<double> cfg_estimator(const PairSample& sample, std::span<const double> t_grid);

}  // namespace evcop

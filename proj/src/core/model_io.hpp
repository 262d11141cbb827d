#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "copula.hpp"
#include "families.hpp"
#include "fit.hpp"

namespace evcop {

/// Serializable form of a fitted copula: enough to rebuild the Pickands
/// function deterministically from the spline coefficients.
struct StoredModel {
  int version = 1;
  int degree = 3;
  /// Interior knots of the spline space on [0, 1].
  std::vector<double> knots;
  Eigen::VectorXd theta;
  bool center_applied = true;
  bool flipped = false;
  bool normalize_w = true;
  double lambda = 0.0;
  double loglik = 0.0;
  double penalty = 0.0;
  int iterations = 0;
  bool converged = false;
  /// The copula of (1 - U, 1 - V) was fitted.
  bool survival = false;
  /// A is replaced by (A(t) + A(1 - t))/2.
  bool symmetrize = false;

  static StoredModel from_fit(const FittedModel& m, bool normalize_w = true);

  ZBasis basis() const;
  PickandsModel pickands() const;
  /// Pickands curve after the optional symmetrization.
  Curve curve() const;
  /// Copula in the data orientation (survival applied).
  EvCopula copula() const;
};

std::string model_to_json(const StoredModel& m);
/// Throws InputError on malformed or inconsistent documents.
StoredModel model_from_json(const std::string& text);
void save_model(const StoredModel& m, const std::string& path);
StoredModel load_model(const std::string& path);

/// Two numeric columns, comma or whitespace separated; a non-numeric first
/// line is taken as a header. Throws InputError on anything else.
PairSample read_pairs(std::istream& in);
PairSample read_pairs_file(const std::string& path);
/// Rows "a,b" with 17 significant digits after an optional header line.
void write_pairs(std::ostream& out, const PairSample& rows, const std::string& header = "u,v");
void write_pairs_file(const std::string& path, const PairSample& rows, const std::string& header = "u,v");

/// Column-wise ranks r_i / (n + 1); ties get their average rank.
PairSample pseudo_observations(const PairSample& rows);
/// (1 - u, 1 - v) row by row.
PairSample survival_transform(const PairSample& rows);

}  // namespace evcop

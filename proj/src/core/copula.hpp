#pragma once

#include <cstdint>

#include "families.hpp"
#include "numerics.hpp"
#include "pickands.hpp"

namespace evcop {

/// Extreme-value copula C(u,v) = exp{log(uv) A(log u / log uv)}, optionally
/// evaluated through its survival copula u + v - 1 + C(1-u, 1-v).
class EvCopula {
 public:
  explicit EvCopula(Curve pickands, bool survival = false, bool independence = false);
  explicit EvCopula(const PickandsModel& a, bool survival = false);
  explicit EvCopula(const ParametricPickands& p, bool survival = false);
  static EvCopula independence();

  double cdf(double u, double v) const;
  double partial_u(double u, double v) const;
  double partial_v(double u, double v) const;
  double pdf(double u, double v) const;

  /// Conditional inversion: for U, P uniform solve dC/du(U, v) = P.
  PairSample simulate(std::size_t n, std::uint64_t seed) const;

  EvCopula survival_copula() const { return EvCopula(a_, !survival_, independent_); }
  const Curve& pickands() const { return a_; }
  bool is_survival() const { return survival_; }

 private:
  // Plain EVC pieces, without the survival switch.
  double base_cdf(double u, double v) const;
  double base_partial(double u, double v, bool wrt_u) const;
  double base_pdf(double u, double v) const;

  Curve a_;
  bool survival_ = false;
  bool independent_ = false;
};

struct TvdResult {
  double tvd = 0.0;
  /// Bound on the contribution of the strip outside [eps, 1-eps]^2.
  double boundary_bound = 0.0;
};

/// 1/2 int |c1 - c2| by 96x96 Gauss-Legendre on [1e-4, 1-1e-4]^2. Throws
/// NumericalError when a density value is not finite.
TvdResult tvd_copulas(const EvCopula& c1, const EvCopula& c2);

struct SupnormCheck {
  double gamma = 0.0, bound = 0.0, measured = 0.0;
  bool holds() const { return measured <= bound + 1e-9; }
};

/// gamma = sup|A1 - A2| over 1000 probes, measured = sup|C1 - C2| over a
/// 100x100 grid, bound = 2 gamma / (1 + 2 gamma)^(1 + 1/(2 gamma)).
SupnormCheck supnorm_bound_check(const Curve& a1, const Curve& a2);

/// Gini coefficient 4(1 - int log C / log uv) by 64x64 Gauss on [1e-6, 1-1e-6]^2.
double gini_copula(const EvCopula& c);

/// Empirical Blomqvist beta: 4 * P(U <= 1/2, V <= 1/2) - 1 on the sample.
double empirical_blomqvist(const PairSample& sample);

}  // namespace evcop

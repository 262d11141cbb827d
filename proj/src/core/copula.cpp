#include "copula.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "errors.hpp"

namespace evcop {

EvCopula::EvCopula(Curve pickands, bool survival, bool independence)
    : a_(std::move(pickands)), survival_(survival), independent_(independence) {}

EvCopula::EvCopula(const PickandsModel& a, bool survival) : EvCopula(a.as_curve(), survival) {}

EvCopula::EvCopula(const ParametricPickands& p, bool survival)
    : EvCopula(family_curve(p), survival,
               p.family == Family::Gumbel && p.theta == 1.0 && !p.khoudraji) {}

EvCopula EvCopula::independence() {
  return EvCopula([](double, int order) { return order == 0 ? 1.0 : 0.0; }, false, true);
}

double EvCopula::base_cdf(double u, double v) const {
  if (u <= 0.0 || v <= 0.0) return 0.0;
  if (u >= 1.0) return std::min(v, 1.0);
  if (v >= 1.0) return u;
  const double lu = std::log(u), luv = lu + std::log(v);
  return std::exp(luv * a_(lu / luv, 0));
}

double EvCopula::base_partial(double u, double v, bool wrt_u) const {
  const double x = wrt_u ? u : v, y = wrt_u ? v : u;
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  // Limits at the edges x = 0 and x = 1 through the end slopes of A.
  if (x >= 1.0) return wrt_u ? y * (1.0 + a_(0.0, 1)) : y * (1.0 - a_(1.0, 1));
  if (x <= 0.0) return wrt_u ? std::pow(y, 1.0 - a_(1.0, 1)) : std::pow(y, 1.0 + a_(0.0, 1));
  const double lu = std::log(u), luv = lu + std::log(v), t = lu / luv;
  const double av = a_(t, 0), ap = a_(t, 1);
  const double c = std::exp(luv * av);
  return wrt_u ? c / u * (av + (1.0 - t) * ap) : c / v * (av - t * ap);
}

double EvCopula::base_pdf(double u, double v) const {
  if (independent_) return 1.0;
  const double lu = std::log(u), luv = lu + std::log(v), t = lu / luv;
  const double av = a_(t, 0), ap = a_(t, 1), app = a_(t, 2);
  const double c = std::exp(luv * av);
  const double lx = av + (1.0 - t) * ap, ly = av - t * ap;
  // Mixed partial of exp{-(x+y) A(x/(x+y))} in x = -log u, y = -log v.
  return c / (u * v) * (lx * ly + t * (1.0 - t) * app / (-luv));
}

double EvCopula::cdf(double u, double v) const {
  u = std::clamp(u, 0.0, 1.0);
  v = std::clamp(v, 0.0, 1.0);
  if (!survival_) return base_cdf(u, v);
  return u + v - 1.0 + base_cdf(1.0 - u, 1.0 - v);
}

double EvCopula::partial_u(double u, double v) const {
  if (independent_) return std::clamp(v, 0.0, 1.0);
  if (!survival_) return base_partial(u, v, true);
  return 1.0 - base_partial(1.0 - u, 1.0 - v, true);
}

double EvCopula::partial_v(double u, double v) const {
  if (independent_) return std::clamp(u, 0.0, 1.0);
  if (!survival_) return base_partial(u, v, false);
  return 1.0 - base_partial(1.0 - u, 1.0 - v, false);
}

double EvCopula::pdf(double u, double v) const {
  return survival_ ? base_pdf(1.0 - u, 1.0 - v) : base_pdf(u, v);
}

PairSample EvCopula::simulate(std::size_t n, std::uint64_t seed) const {
  if (n < 1) throw InputError("simulate: n must be at least 1");
  std::mt19937_64 rng(seed);
  // Open interval (0,1): u = (k + 0.5) / 2^53.
  const auto draw = [&rng]() { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  PairSample out(n);
  for (auto& row : out) {
    const double u = draw(), p = draw();
    row[0] = u;
    if (independent_) {
      row[1] = p;
      continue;
    }
    const auto g = [&](double v) { return partial_u(u, v) - p; };
    const double g0 = partial_u(u, 0.0) - p, g1 = partial_u(u, 1.0) - p;
    if (!(g0 <= 0.0 && g1 >= 0.0)) throw NumericalError("simulate: conditional root not bracketed");
    row[1] = std::clamp(brent_root(g, 0.0, 1.0, g0, g1, RootOptions{1e-14, 200}), 1e-300,
                        std::nextafter(1.0, 0.0));
  }
  return out;
}

TvdResult tvd_copulas(const EvCopula& c1, const EvCopula& c2) {
  constexpr double eps = 1e-4;
  const GaussRule& g = gauss_legendre(96);
  const double half = 0.5 * (1.0 - 2.0 * eps), mid = 0.5;
  std::vector<double> x(g.nodes.size()), w(g.nodes.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = mid + half * g.nodes[i];
    w[i] = half * g.weights[i];
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d1 = c1.pdf(x[i], x[j]), d2 = c2.pdf(x[i], x[j]);
      if (!std::isfinite(d1) || !std::isfinite(d2))
        throw NumericalError("tvd_copulas: non-finite density value");
      acc += w[i] * w[j] * std::abs(d1 - d2);
    }
  }
  // The strip carries 1 - mu([eps, 1-eps]^2) mass under each copula.
  const auto strip = [&](const EvCopula& c) {
    const double a = eps, b = 1.0 - eps;
    return 1.0 - (c.cdf(b, b) - c.cdf(a, b) - c.cdf(b, a) + c.cdf(a, a));
  };
  return {0.5 * acc, 0.5 * (strip(c1) + strip(c2))};
}

SupnormCheck supnorm_bound_check(const Curve& a1, const Curve& a2) {
  SupnormCheck r;
  for (double t : probe_grid(1000)) r.gamma = std::max(r.gamma, std::abs(a1(t, 0) - a2(t, 0)));
  if (r.gamma > 0.0) {
    const double g2 = 2.0 * r.gamma;
    r.bound = g2 / std::pow(1.0 + g2, 1.0 + 1.0 / g2);
  }
  const EvCopula c1(a1), c2(a2);
  for (int i = 0; i < 100; ++i) {
    const double u = (i + 0.5) / 100.0;
    for (int j = 0; j < 100; ++j) {
      const double v = (j + 0.5) / 100.0;
      r.measured = std::max(r.measured, std::abs(c1.cdf(u, v) - c2.cdf(u, v)));
    }
  }
  return r;
}

double gini_copula(const EvCopula& c) {
  constexpr double eps = 1e-6;
  const GaussRule& g = gauss_legendre(64);
  const double half = 0.5 * (1.0 - 2.0 * eps);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double u = 0.5 + half * g.nodes[i];
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      const double v = 0.5 + half * g.nodes[j];
      // 1 - log C / log uv is bounded by 1/2, so the skipped strip costs < 1e-5.
      acc += g.weights[i] * g.weights[j] * half * half * (1.0 - std::log(c.cdf(u, v)) / std::log(u * v));
    }
  }
  return 4.0 * acc;
}

double empirical_blomqvist(const PairSample& sample) {
  if (sample.empty()) throw InputError("empirical_blomqvist: empty sample");
  std::size_t hits = 0;
  for (const auto& [u, v] : sample) hits += (u <= 0.5 && v <= 0.5) ? 1 : 0;
  return 4.0 * static_cast<double>(hits) / static_cast<double>(sample.size()) - 1.0;
}

}  // namespace evcop

#include "families.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "pickands.hpp"

namespace evcop {

namespace {

double gumbel(double th, double t, int order) {
  if (th == 1.0) return order == 0 ? 1.0 : 0.0;
  const double s = 1.0 - t;
  const double n = std::pow(t, th) + std::pow(s, th);
  switch (order) {
    case 0: return std::pow(n, 1.0 / th);
    case 1: return std::pow(n, 1.0 / th - 1.0) * (std::pow(t, th - 1.0) - std::pow(s, th - 1.0));
    default: return (th - 1.0) * std::pow(t * s, th - 2.0) * std::pow(n, 1.0 / th - 2.0);
  }
}

// Written through N = t^th + s^th so that nothing overflows near the ends.
double galambos(double th, double t, int order) {
  const double s = 1.0 - t;
  const double n = std::pow(t, th) + std::pow(s, th);
  switch (order) {
    case 0: return 1.0 - t * s / std::pow(n, 1.0 / th);
    case 1: return -(std::pow(s, th + 1.0) - std::pow(t, th + 1.0)) / std::pow(n, 1.0 + 1.0 / th);
    default: return (1.0 + th) * std::pow(t * s, th - 1.0) / std::pow(n, 2.0 + 1.0 / th);
  }
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double husler_reiss(double th, double t, int order) {
  const double s = 1.0 - t;
  if (t <= 0.0 || s <= 0.0) {
    if (order == 0) return 1.0;
    if (order == 1) return t <= 0.0 ? -1.0 : 1.0;
    return 0.0;
  }
  const double l = std::log(t / s) / (2.0 * th);
  const double w1 = th + l, w2 = th - l;
  switch (order) {
    case 0: return t * normal_cdf(w1) + s * normal_cdf(w2);
    // The density terms cancel since phi(w1)/s = phi(w2)/t.
    case 1: return normal_cdf(w1) - normal_cdf(w2);
    default: return normal_pdf(w1) / (2.0 * th * t * s * s);
  }
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::Gumbel: return "gumbel";
    case Family::Galambos: return "galambos";
    case Family::HuslerReiss: return "husler-reiss";
  }
  return "";
}

Family family_from_name(const std::string& name) {
  std::string k = name;
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return std::tolower(c); });
  if (k == "gumbel") return Family::Gumbel;
  if (k == "galambos") return Family::Galambos;
  if (k == "husler-reiss" || k == "huslerreiss" || k == "hr") return Family::HuslerReiss;
  throw InputError("unknown family '" + name + "'");
}

void ParametricPickands::validate() const {
  const bool ok = family == Family::Gumbel ? theta >= 1.0 : theta > 0.0;
  if (!ok || !std::isfinite(theta))
    throw InputError(family_name(family) + ": theta " + std::to_string(theta) + " out of range");
  if (khoudraji) {
    const auto [a, b] = *khoudraji;
    if (!(a > 0.0 && a <= 1.0) || !(b > 0.0 && b <= 1.0))
      throw InputError("khoudraji: alpha and beta must lie in (0, 1]");
  }
}

double family_pickands(const ParametricPickands& p, double t, int order) {
  return family_curve(p)(t, order);
}

Curve family_curve(const ParametricPickands& p) {
  p.validate();
  const double th = p.theta;
  Curve base;
  switch (p.family) {
    case Family::Gumbel: base = [th](double t, int o) { return gumbel(th, std::clamp(t, 0.0, 1.0), o); }; break;
    case Family::Galambos: base = [th](double t, int o) { return galambos(th, std::clamp(t, 0.0, 1.0), o); }; break;
    case Family::HuslerReiss: base = [th](double t, int o) { return husler_reiss(th, std::clamp(t, 0.0, 1.0), o); }; break;
  }
  if (p.khoudraji) return khoudraji(std::move(base), p.khoudraji->first, p.khoudraji->second);
  return base;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

std::vector<double> z_transform(const PairSample& sample) {
  std::vector<double> z;
  z.reserve(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto [u, v] = sample[i];
    if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0))
      throw InputError("z_transform: row " + std::to_string(i) + " has a value outside (0,1)");
    const double lu = std::log(u), lv = std::log(v);
    z.push_back(lu / (lu + lv));
  }
  return z;
}

double pickands_estimator(const PairSample& sample, double t) {
  if (sample.empty()) throw InputError("pickands_estimator: empty sample");
  double acc = 0.0;
  for (const auto& [u, v] : sample) {
    const double x = -std::log(u), y = -std::log(v);
    if (t <= 0.0) acc += x;
    else if (t >= 1.0) acc += y;
    else acc += std::min(x / (1.0 - t), y / t);
  }
  return static_cast<double>(sample.size()) / acc;
}

std::vector<double> pickands_estimator(const PairSample& sample, std::span<const double> t_grid,
                                       bool convex_minorant) {
  std::vector<double> a(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) a[i] = pickands_estimator(sample, t_grid[i]);
  return convex_minorant ? greatest_convex_minorant(t_grid, a) : a;
}

std::vector<double> greatest_convex_minorant(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 3) return {y.begin(), y.end()};
  // Andrew's monotone chain, lower hull only; points already sorted by x.
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < n; ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      const double cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(i);
  }
  std::vector<double> out(n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k + 1 < hull.size() - 1 && x[hull[k + 1]] <= x[i]) ++k;
    const std::size_t a = hull[k], b = hull[std::min(k + 1, hull.size() - 1)];
    if (a == b || x[i] == x[a]) out[i] = y[a];
    else out[i] = y[a] + (y[b] - y[a]) * (x[i] - x[a]) / (x[b] - x[a]);
  }
  return out;
}

CfgEstimator::CfgEstimator(std::span<const double> z_sample) : z_(z_sample.begin(), z_sample.end()) {
  if (z_.empty()) throw InputError("cfg_estimator: empty sample");
  std::sort(z_.begin(), z_.end());
  nodes_ = linspace(0.0, 1.0, 1024);
  std::vector<double> g(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) g[i] = integrand(nodes_[i]);
  cum_ = cumulative_trapezoid(nodes_, g);
}

CfgEstimator CfgEstimator::from_pairs(const PairSample& sample) {
  if (sample.empty()) throw InputError("cfg_estimator: empty sample");
  const auto z = z_transform(sample);
  return CfgEstimator(z);
}

double CfgEstimator::integrand(double z) const {
  if (z <= 0.0 || z >= 1.0) return 0.0;
  const auto it = std::upper_bound(z_.begin(), z_.end(), z);
  const double h = static_cast<double>(it - z_.begin()) / static_cast<double>(z_.size());
  return (h - z) / (z * (1.0 - z));
}

double CfgEstimator::operator()(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw InputError("cfg_estimator: t outside [0,1]");
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  const std::size_t j = std::min<std::size_t>(it - nodes_.begin(), nodes_.size()) - 1;
  const double partial = 0.5 * (t - nodes_[j]) * (integrand(nodes_[j]) + integrand(t));
  return std::exp(cum_[j] + partial);
}

std::vector<double> CfgEstimator::operator()(std::span<const double> t_grid) const {
  std::vector<double> out(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) out[i] = (*this)(t_grid[i]);
  return out;
}

std::vector<double> cfg_estimator(const PairSample& sample, std::span<const double> t_grid) {
  return CfgEstimator::from_pairs(sample)(t_grid);
}

}  // namespace evcop

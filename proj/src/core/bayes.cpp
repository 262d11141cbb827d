#include "bayes.hpp"

#include <cmath>
#include <memory>

#include "errors.hpp"
#include "numerics.hpp"

namespace evcop {

namespace {

constexpr double kMaxExponent = 700.0;

double log_normalizer(const RealFn& p, std::span<const double> grid) {
  if (grid.size() < 2) throw InputError("density grid needs at least two nodes");
  std::vector<double> vals(grid.size());
  double peak = -kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    vals[i] = p(grid[i]);
    if (!std::isfinite(vals[i]) || std::abs(vals[i]) > kMaxExponent)
      throw NumericalError("clr_inverse: log-density out of range (|p| > 700 or non-finite)");
    peak = std::max(peak, vals[i]);
  }
  for (auto& v : vals) v = std::exp(v - peak);
  const double integral = trapezoid(grid, vals);
  if (!(integral > 0.0) || !std::isfinite(integral))
    throw NumericalError("clr_inverse: normalization integral is not finite");
  return peak + std::log(integral);
}

}  // namespace

std::vector<double> default_density_grid(std::span<const double> breakpoints) {
  auto nodes = linspace(0.0, 1.0, 512);
  nodes.insert(nodes.end(), breakpoints.begin(), breakpoints.end());
  // Centered densities rise steeply towards 0; grade the first knot interval.
  if (breakpoints.size() > 1) {
    for (double s : graded_nodes(129, 3.0)) nodes.push_back(s * breakpoints[1]);
  }
  return merge_nodes(std::move(nodes));
}

RealFn clr_inverse(RealFn p, std::span<const double> grid) {
  const double log_i = log_normalizer(p, grid);
  return [p = std::move(p), log_i](double x) { return std::exp(p(x) - log_i); };
}

RealFn clr(RealFn f, std::span<const double> grid) {
  std::vector<double> logs(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError("clr: density must be positive and finite");
    logs[i] = std::log(v);
  }
  const double mean = trapezoid(grid, logs) / (grid.back() - grid.front());
  return [f = std::move(f), mean](double x) { return std::log(f(x)) - mean; };
}

RealFn perturb(RealFn f, RealFn g, std::span<const double> grid) {
  return clr_inverse([f = std::move(f), g = std::move(g)](double x) {
    return std::log(f(x)) + std::log(g(x));
  }, grid);
}

RealFn power(double alpha, RealFn f, std::span<const double> grid) {
  return clr_inverse([f = std::move(f), alpha](double x) { return alpha * std::log(f(x)); }, grid);
}

double tvd(const RealFn& f, const RealFn& g, std::span<const double> grid) {
  if (grid.size() < 1024) throw InputError("tvd: grid needs at least 1024 nodes");
  std::vector<double> diff(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) diff[i] = std::abs(f(grid[i]) - g(grid[i]));
  return std::clamp(0.5 * trapezoid(grid, diff), 0.0, 1.0);
}

double tvd(const RealFn& f, const RealFn& g) {
  static const std::vector<double> grid = linspace(0.0, 1.0, 4097);
  return tvd(f, g, grid);
}

ClrDensity::ClrDensity(ZBasis basis, Eigen::VectorXd theta, bool center_enabled,
                       std::vector<double> eval_grid)
    : basis_(std::move(basis)), theta_(std::move(theta)), center_(center_enabled) {
  if (theta_.size() != basis_.dim()) throw InputError("ClrDensity: theta size does not match basis");
  coef_ = center_ ? Eigen::VectorXd(theta_ + project_center(basis_)) : theta_;
  grid_ = eval_grid.empty() ? default_density_grid(basis_.breakpoints()) : std::move(eval_grid);
  norm_ = std::exp(log_normalizer([this](double x) { return clr_value(x); }, grid_));
}

double ClrDensity::clr_value(double x, int deriv_order) const {
  return basis_.spline(coef_, x, deriv_order);
}

double ClrDensity::pdf(double x) const { return std::exp(clr_value(x)) / norm_; }

RealFn ClrDensity::as_function() const {
  auto self = std::make_shared<ClrDensity>(*this);
  return [self](double x) { return self->pdf(x); };
}

}  // namespace evcop

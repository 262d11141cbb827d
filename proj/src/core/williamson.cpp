#include "williamson.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "errors.hpp"
#include "numerics.hpp"

namespace evcop {

namespace {

void check_nodes(std::span<const double> x) {
  if (x.size() < 3) throw InputError("Williamson grid needs at least three nodes");
  if (x.front() != 0.0 || x.back() != 1.0) throw InputError("Williamson nodes must run from 0 to 1");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw InputError("Williamson nodes must be strictly increasing");
}

}  // namespace

void WilliamsonGrid::build_interpolator() { interp = HermiteSpline(x, W, Wp, Wpp); }

Curve WilliamsonGrid::as_curve() const {
  auto self = std::make_shared<WilliamsonGrid>(*this);
  return [self](double xv, int order) { return (*self)(xv, order); };
}

WilliamsonGrid williamson_from_density(const RealFn& f, std::span<const double> x_nodes,
                                       int gauss_points) {
  check_nodes(x_nodes);
  const std::size_t n = x_nodes.size();
  const std::size_t m1 = n - 1;  // index of x = 1
  WilliamsonGrid g;
  g.x.assign(x_nodes.begin(), x_nodes.end());
  std::vector<double> fv(n);
  for (std::size_t j = 0; j < n; ++j) fv[j] = f(g.x[j]);
  for (std::size_t j = 1; j < n; ++j)
    if (!(fv[j] >= 0.0) || !std::isfinite(fv[j]))
      throw NumericalError("williamson_from_density: density must be finite and non-negative");

  g.W.assign(n, 0.0);
  g.Wp.assign(n, 0.0);
  g.Wpp.assign(n, 0.0);
  g.tail.assign(n, 0.0);
  g.Wpp[0] = kInf;
  for (std::size_t j = 1; j < n; ++j) g.Wpp[j] = fv[j] / g.x[j];

  const GaussRule* rule = gauss_points > 0 ? &gauss_legendre(gauss_points) : nullptr;
  for (std::size_t j = m1; j-- > 1;) {
    const double dx = g.x[j + 1] - g.x[j];
    double p = 0.5 * dx * (fv[j] + fv[j + 1]);
    double s = 0.5 * dx * (fv[j] / g.x[j] + fv[j + 1] / g.x[j + 1]);
    if (rule) {
      p = s = 0.0;
      for (std::size_t q = 0; q < rule->nodes.size(); ++q) {
        const double xq = g.x[j] + 0.5 * dx * (rule->nodes[q] + 1.0);
        const double fq = f(xq);
        p += rule->weights[q] * fq;
        s += rule->weights[q] * fq / xq;
      }
      p *= 0.5 * dx;
      s *= 0.5 * dx;
    }
    g.Wp[j] = g.Wp[j + 1] - s;
    g.W[j] = g.W[j + 1] + g.x[j] * g.Wp[j] - g.x[j + 1] * g.Wp[j + 1] + p;
    g.tail[j] = g.tail[j + 1] + p;
  }
  g.Wp[0] = -kInf;
  g.W[0] = 1.0;

  // Mass on [0, x_1]; a singular f(0) gets the crude x_1 f(x_1) estimate.
  const double p0 = std::isfinite(fv[0]) ? 0.5 * g.x[1] * (fv[0] + fv[1]) : g.x[1] * fv[1];
  g.tail[0] = g.tail[1] + p0;
  g.w0_estimate = g.W[1] - g.x[1] * g.Wp[1] + p0;
  if (g.W[1] > 1.2)
    throw NumericalError("williamson_from_density: W(x_1) = " + std::to_string(g.W[1]) +
                         " exceeds 1.2; refine the nodes or normalize");
  g.build_interpolator();
  return g;
}

WilliamsonGrid normalize_w(WilliamsonGrid g) {
  const double c = g.w0_estimate;
  if (!(c > 0.5 && c < 2.0))
    throw NumericalError("normalize_w: W(0+) estimate " + std::to_string(c) + " outside (0.5, 2)");
  for (std::size_t j = 1; j < g.x.size(); ++j) {
    g.W[j] /= c;
    g.Wp[j] /= c;
    g.Wpp[j] /= c;
    g.tail[j] /= c;
  }
  g.tail[0] /= c;
  g.W[0] = 1.0;
  g.w0_estimate = 1.0;
  g.normalized = true;
  g.build_interpolator();
  return g;
}

WilliamsonGrid w_grid_from_curve(const Curve& w, std::span<const double> x_nodes) {
  check_nodes(x_nodes);
  WilliamsonGrid g;
  g.x.assign(x_nodes.begin(), x_nodes.end());
  const std::size_t n = g.x.size();
  g.W.resize(n);
  g.Wp.resize(n);
  g.Wpp.resize(n);
  g.tail.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    g.W[j] = w(g.x[j], 0);
    g.Wp[j] = w(g.x[j], 1);
    g.Wpp[j] = w(g.x[j], 2);
    // W = x W' + tail, the survival identity.
    g.tail[j] = j == 0 ? g.W[0] : g.W[j] - g.x[j] * g.Wp[j];
  }
  g.w0_estimate = g.W[0];
  g.build_interpolator();
  return g;
}

Curve w_power_complement(double theta) {
  if (!(theta >= 0.0)) throw InputError("w_power_complement: theta must be >= 0");
  return [theta](double x, int order) {
    const double y = 1.0 - x;
    switch (order) {
      case 0: return std::pow(y, theta);
      case 1: return theta == 0.0 ? 0.0 : -theta * std::pow(y, theta - 1.0);
      default: return theta == 0.0 ? 0.0 : theta * (theta - 1.0) * std::pow(y, theta - 2.0);
    }
  };
}

Curve w_uniform_power(double theta) {
  if (!(theta > 0.0)) throw InputError("w_uniform_power: theta must be > 0");
  if (theta == 1.0) {
    return [](double x, int order) {
      switch (order) {
        case 0: return x == 0.0 ? 1.0 : 1.0 - x + x * std::log(x);
        case 1: return x == 0.0 ? -kInf : std::log(x);
        default: return x == 0.0 ? kInf : 1.0 / x;
      }
    };
  }
  return [theta](double x, int order) {
    const double r = 1.0 / theta;
    switch (order) {
      case 0: return 1.0 + x / (theta - 1.0) - theta * std::pow(x, r) / (theta - 1.0);
      case 1: return (1.0 - std::pow(x, r - 1.0)) / (theta - 1.0);
      default: return r * std::pow(x, r - 2.0);
    }
  };
}

double fixed_point(const Curve& w) {
  const auto g = [&](double x) { return w(x, 0) - x; };
  if (!(g(0.0) > 0.0) || !(g(1.0) < 0.0)) throw NumericalError("fixed_point: no sign change on [0,1]");
  return bisect_root(g, 0.0, 1.0, 1e-10, 200);
}

std::vector<double> pipeline_w_nodes(std::span<const double> extra) {
  constexpr std::size_t kUniform = 2001;
  auto nodes = linspace(0.0, 1.0, kUniform);
  // Nodes below the uniform spacing would resolve the logarithmic approach
  // of A' to -1 and spoil the boundary slope of the interpolant.
  const double first = nodes[1];
  for (double e : extra)
    if (e >= first && e < 1.0) nodes.push_back(e);
  return merge_nodes(std::move(nodes), 1e-9);
}

}  // namespace evcop

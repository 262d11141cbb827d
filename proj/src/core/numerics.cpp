#include "numerics.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include <Eigen/Dense>

#include "errors.hpp"

namespace evcop {

namespace {

GaussRule compute_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (x * p0 - p1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  if (n < 1) throw InputError("gauss_legendre: need at least one node");
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(compute_gauss_legendre(n));
  return *slot;
}

double gauss_integrate(const std::function<double(double)>& f, double a, double b, int n) {
  const auto& rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

double gauss_composite(const std::function<double(double)>& f, std::span<const double> edges,
                       int n) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] > edges[i]) sum += gauss_integrate(f, edges[i], edges[i + 1], n);
  }
  return sum;
}

std::vector<double> trapezoid_weights(std::span<const double> x) {
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = 0.5 * (x[i + 1] - x[i]);
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) sum += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return sum;
}

std::vector<double> cumulative_trapezoid(std::span<const double> x, std::span<const double> y) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    out[i + 1] = out[i] + 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return out;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * double(i) / double(n - 1);
  out.back() = b;
  return out;
}

std::vector<double> graded_nodes(std::size_t n, double power) {
  auto s = linspace(0.0, 1.0, n);
  for (auto& v : s) v = std::pow(v, power);
  return s;
}

std::vector<double> merge_nodes(std::vector<double> nodes, double min_gap) {
  std::sort(nodes.begin(), nodes.end());
  std::vector<double> out;
  out.reserve(nodes.size());
  for (double v : nodes) {
    if (!std::isfinite(v)) continue;
    if (out.empty() || v - out.back() > min_gap) out.push_back(v);
  }
  return out;
}

double brent_root(const std::function<double(double)>& f, double a, double b, double fa,
                  double fb, const RootOptions& opts) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw NumericalError("brent_root: root not bracketed");
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * opts.x_tol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = d;
      }
    } else {
      d = m;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
  }
  return b;
}

double bisect_root(const std::function<double(double)>& f, double a, double b, double f_tol,
                   int max_iter) {
  double fa = f(a), fb = f(b);
  if (std::abs(fa) <= f_tol) return a;
  if (std::abs(fb) <= f_tol) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw NumericalError("bisect_root: no sign change");
  double mid = 0.5 * (a + b);
  for (int i = 0; i < max_iter; ++i) {
    mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (std::abs(fm) <= f_tol || mid == a || mid == b) return mid;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return mid;
}

HermiteSpline::HermiteSpline(std::vector<double> x, std::vector<double> y,
                             std::vector<double> dy, std::vector<double> d2y)
    : x_(std::move(x)), y_(std::move(y)), dy_(std::move(dy)), d2y_(std::move(d2y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n || dy_.size() != n || d2y_.size() != n)
    throw InputError("HermiteSpline: need at least two nodes with matching data");
  coef_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = x_[i + 1] - x_[i];
    if (!(h > 0.0)) throw InputError("HermiteSpline: nodes must be strictly increasing");
    // Constraints (s, derivative order, target) in the local variable s.
    struct Row {
      double s;
      int order;
      double target;
    };
    std::array<Row, 6> rows{};
    int m = 0;
    for (int side = 0; side < 2; ++side) {
      const std::size_t j = i + side;
      const double s = side;
      if (!std::isfinite(y_[j])) throw InputError("HermiteSpline: non-finite value");
      rows[m++] = {s, 0, y_[j]};
      if (std::isfinite(dy_[j])) rows[m++] = {s, 1, dy_[j] * h};
      if (std::isfinite(d2y_[j])) rows[m++] = {s, 2, d2y_[j] * h * h};
    }
    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs(m);
    for (int r = 0; r < m; ++r) {
      rhs(r) = rows[r].target;
      for (int k = 0; k < m; ++k) {
        double v;
        switch (rows[r].order) {
          case 0: v = std::pow(rows[r].s, k); break;
          case 1: v = k >= 1 ? k * std::pow(rows[r].s, k - 1) : 0.0; break;
          default: v = k >= 2 ? k * (k - 1) * std::pow(rows[r].s, k - 2) : 0.0; break;
        }
        mat(r, k) = v;
      }
    }
    const Eigen::VectorXd c = mat.fullPivLu().solve(rhs);
    auto& out = coef_[i];
    out.fill(0.0);
    for (int k = 0; k < m; ++k) out[k] = c(k);
  }
}

double HermiteSpline::operator()(double x, int order) const {
  const std::size_t n = x_.size();
  std::size_t i;
  if (x <= x_.front()) {
    i = 0;
  } else if (x >= x_.back()) {
    i = n - 2;
  } else {
    i = std::size_t(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
    if (i > n - 2) i = n - 2;
  }
  const double h = x_[i + 1] - x_[i];
  const double s = (x - x_[i]) / h;
  const auto& c = coef_[i];
  switch (order) {
    case 0:
      return c[0] + s * (c[1] + s * (c[2] + s * (c[3] + s * (c[4] + s * c[5]))));
    case 1:
      return (c[1] + s * (2 * c[2] + s * (3 * c[3] + s * (4 * c[4] + s * 5 * c[5])))) / h;
    case 2:
      return (2 * c[2] + s * (6 * c[3] + s * (12 * c[4] + s * 20 * c[5]))) / (h * h);
    default:
      throw InputError("HermiteSpline: derivative order must be 0, 1 or 2");
  }
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InputError("empirical_quantile: empty input");
  std::sort(values.begin(), values.end());
  const double h = (double(values.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const std::size_t lo = std::size_t(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - double(lo)) * (values[hi] - values[lo]);
}

}  // namespace evcop

#include "pickands.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "errors.hpp"

namespace evcop {

namespace {

// A' and A'' from W' and W'' through the rotation; W' = -inf maps to the
// limit A' = -1 with A'' left as a non-finite sentinel.
double ap_from(double wp) {
  if (std::isfinite(wp)) return (1.0 + wp) / (1.0 - wp);
  return wp < 0.0 ? -1.0 : 1.0;
}

double app_from(double wp, double wpp) {
  if (!std::isfinite(wp) || !std::isfinite(wpp)) return kInf;
  const double d = 1.0 - wp;
  return 4.0 * wpp / (d * d * d);
}

void check_t_nodes(std::span<const double> t) {
  if (t.size() < 2 || t.front() != 0.0 || t.back() != 1.0)
    throw InputError("t-nodes must run from 0 to 1");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw InputError("t-nodes must be strictly increasing");
}

// Shared driver: `w` evaluates the W curve at x with derivative order.
template <class W>
PickandsModel rotate_onto(const W& w, std::span<const double> t_nodes, double wp0, double wpp0,
                          double wp1, double wpp1) {
  check_t_nodes(t_nodes);
  const std::size_t n = t_nodes.size();
  PickandsModel a;
  a.t.assign(t_nodes.begin(), t_nodes.end());
  a.A.resize(n);
  a.Ap.resize(n);
  a.App.resize(n);
  a.A[0] = 1.0;
  a.Ap[0] = ap_from(wp0);
  a.App[0] = app_from(wp0, wpp0);
  a.A[n - 1] = 1.0;
  a.Ap[n - 1] = ap_from(wp1);
  a.App[n - 1] = app_from(wp1, wpp1);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double ti = a.t[i];
    const auto g = [&](double x) { return 0.5 * (1.0 + x - w(x, 0)) - ti; };
    const double x = brent_root(g, 0.0, 1.0, -ti, 1.0 - ti, RootOptions{1e-15, 300});
    const double wv = w(x, 0), wp = w(x, 1), wpp = w(x, 2);
    a.A[i] = 0.5 * (1.0 + x + wv);
    a.Ap[i] = ap_from(wp);
    a.App[i] = app_from(wp, wpp);
  }
  a.build_interpolator();
  return a;
}

}  // namespace

ConvexPatch ConvexPatch::fit(double t0, double t1, double y0, double y1, double m0, double m1) {
  ConvexPatch p;
  p.t0 = t0;
  p.t1 = t1;
  p.y0 = y0;
  p.active = true;
  const double h = t1 - t0, s = (y1 - y0) / h;
  if (!(m0 < s && s < m1)) {
    // Slopes do not bracket the secant: fall back to the line.
    p.m0 = p.mid = p.m1 = s;
    p.xi = h;
    return p;
  }
  // Derivative is piecewise linear m0 -> mid -> m1 with the kink at xi; the
  // area under it must equal h s.
  p.m0 = m0;
  p.m1 = m1;
  p.mid = std::clamp(2.0 * s - 0.5 * (m0 + m1), m0, m1);
  p.xi = std::clamp(h * (p.mid + m1 - 2.0 * s) / (m1 - m0), 0.0, h);
  return p;
}

double ConvexPatch::operator()(double tv, int order) const {
  const double u = std::clamp(tv - t0, 0.0, t1 - t0), h = t1 - t0;
  if (u <= xi) {
    const double c = xi > 0.0 ? (mid - m0) / xi : 0.0;
    if (order == 0) return y0 + m0 * u + 0.5 * c * u * u;
    return order == 1 ? m0 + c * u : c;
  }
  const double yxi = y0 + 0.5 * xi * (m0 + mid);
  const double c = (m1 - mid) / (h - xi), v = u - xi;
  if (order == 0) return yxi + mid * v + 0.5 * c * v * v;
  return order == 1 ? mid + c * v : c;
}

void PickandsModel::build_interpolator() {
  interp = HermiteSpline(t, A, Ap, App);
  const std::size_t n = t.size();
  head = tail = ConvexPatch{};
  if (n < 3) return;
  if (!std::isfinite(App.front())) head = ConvexPatch::fit(t[0], t[1], A[0], A[1], Ap[0], Ap[1]);
  if (!std::isfinite(App.back()))
    tail = ConvexPatch::fit(t[n - 2], t[n - 1], A[n - 2], A[n - 1], Ap[n - 2], Ap[n - 1]);
}

double PickandsModel::operator()(double tv, int order) const {
  // The patches are only C^1 at their inner node; hand over slightly early so
  // A'' at the node (reached by root finding) takes the tabulated value.
  constexpr double kGuard = 1e-9;
  if (head.active && tv < head.t1 - kGuard * (head.t1 - head.t0)) return head(tv, order);
  if (tail.active && tv > tail.t0 + kGuard * (tail.t1 - tail.t0)) return tail(tv, order);
  return interp(tv, order);
}

Curve PickandsModel::as_curve() const {
  auto self = std::make_shared<PickandsModel>(*this);
  return [self](double tv, int order) { return (*self)(tv, order); };
}

PickandsModel rotate(const WilliamsonGrid& w) {
  PickandsModel a;
  const std::size_t n = w.size();
  for (std::size_t j = 0; j < n; ++j) {
    double t = 0.5 * (1.0 + w.x[j] - w.W[j]);
    double av = 0.5 * (1.0 + w.x[j] + w.W[j]);
    if (j == 0) t = 0.0, av = 1.0;
    if (j == n - 1) t = 1.0, av = 1.0;
    // Rounding can produce ties where W is nearly flat; keep the first node.
    if (!a.t.empty() && !(t > a.t.back())) {
      if (j != n - 1) continue;
      a.t.pop_back();
      a.A.pop_back();
      a.Ap.pop_back();
      a.App.pop_back();
    }
    a.t.push_back(t);
    a.A.push_back(av);
    a.Ap.push_back(ap_from(w.Wp[j]));
    a.App.push_back(app_from(w.Wp[j], w.Wpp[j]));
  }
  a.build_interpolator();
  return a;
}

PickandsModel rotate(const WilliamsonGrid& w, std::span<const double> t_nodes) {
  return rotate_onto(w, t_nodes, w.Wp.front(), w.Wpp.front(), w.Wp.back(), w.Wpp.back());
}

PickandsModel rotate(const Curve& w, std::span<const double> t_nodes) {
  if (std::abs(w(0.0, 0) - 1.0) > 1e-12 || std::abs(w(1.0, 0)) > 1e-12)
    throw InputError("rotate: W must satisfy W(0) = 1 and W(1) = 0");
  return rotate_onto(w, t_nodes, w(0.0, 1), w(0.0, 2), w(1.0, 1), w(1.0, 2));
}

Curve rotate_inverse(Curve a) {
  return [a = std::move(a)](double x, int order) -> double {
    double t;
    if (x <= 0.0) {
      t = 0.0;
    } else if (x >= 1.0) {
      t = 1.0;
    } else {
      const auto g = [&](double tv) { return tv + a(tv, 0) - 1.0 - x; };
      t = brent_root(g, 0.0, 1.0, -x, 1.0 - x, RootOptions{1e-15, 300});
    }
    const double av = a(t, 0);
    if (order == 0) return x <= 0.0 ? 1.0 : (x >= 1.0 ? 0.0 : av - t);
    const double ap = a(t, 1);
    const double s = 1.0 + ap;
    if (x > 0.0 && x < 1.0 && !(s > 0.0))
      throw NumericalError("rotate_inverse: A touches the line 1 - t; W is not recoverable");
    if (order == 1) return s > 0.0 ? (ap - 1.0) / s : -kInf;
    return s > 0.0 ? 2.0 * a(t, 2) / (s * s * s) : kInf;
  };
}

double h_density(const Curve& a, double z) {
  const double av = a(z, 0), r = a(z, 1) / av;
  if (z <= 0.0 || z >= 1.0) return 1.0 + (1.0 - 2.0 * z) * r;
  return 1.0 + (1.0 - 2.0 * z) * r + z * (1.0 - z) * (a(z, 2) / av - r * r);
}

double SpectralMeasure::first_moment() const {
  std::vector<double> zeta(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double v = z[i] * eta[i];
    zeta[i] = std::isfinite(v) ? v : 0.0;
  }
  return trapezoid(z, zeta) + H1;
}

SpectralMeasure spectral_from_w(const WilliamsonGrid& w) {
  const PickandsModel a = rotate(w);
  SpectralMeasure s;
  s.z = a.t;
  s.eta = a.App;
  const double wp0 = w.Wp.front(), wp1 = w.Wp.back();
  s.H0 = std::isfinite(wp0) ? 2.0 / (1.0 - wp0) : 0.0;
  s.H1 = -2.0 * wp1 / (1.0 - wp1);
  return s;
}

double gini_from_pickands(const Curve& a) {
  static const std::vector<double> edges = linspace(0.0, 1.0, 129);
  const double integral = gauss_composite([&](double t) { return a(t, 0); }, edges, 10);
  return 4.0 * (1.0 - integral);
}

double gini_from_density(const RealFn& f, std::span<const double> grid) {
  std::vector<double> xf(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = grid[i] * f(grid[i]);
    xf[i] = std::isfinite(v) ? v : 0.0;
  }
  return 1.0 - trapezoid(grid, xf);
}

double blomqvist_beta(const Curve& a) { return std::pow(4.0, 1.0 - a(0.5, 0)) - 1.0; }

double upper_tail(const Curve& a) { return 2.0 * (1.0 - a(0.5, 0)); }

Curve khoudraji(Curve a, double alpha, double beta) {
  if (!(alpha > 0.0 && alpha <= 1.0) || !(beta > 0.0 && beta <= 1.0))
    throw InputError("khoudraji: alpha and beta must lie in (0, 1]");
  return [a = std::move(a), alpha, beta](double t, int order) {
    const double g = (1.0 - t) * alpha + t * beta;
    const double s = std::clamp(t * beta / g, 0.0, 1.0);
    switch (order) {
      case 0: return (1.0 - t) * (1.0 - alpha) + t * (1.0 - beta) + g * a(s, 0);
      case 1: return alpha - beta + (beta - alpha) * a(s, 0) + alpha * beta * a(s, 1) / g;
      default: {
        const double ab = alpha * beta;
        return ab * ab * a(s, 2) / (g * g * g);
      }
    }
  };
}

Curve symmetrize(Curve a) {
  return [a = std::move(a)](double t, int order) {
    const double sign = order == 1 ? -1.0 : 1.0;
    return 0.5 * (a(t, order) + sign * a(1.0 - t, order));
  };
}

Curve mirror(Curve a) {
  return [a = std::move(a)](double t, int order) {
    const double v = a(1.0 - t, order);
    return order == 1 ? -v : v;
  };
}

PickandsModel mirror(const PickandsModel& a) {
  PickandsModel m;
  const std::size_t n = a.t.size();
  for (std::size_t j = n; j-- > 0;) {
    m.t.push_back(j == 0 ? 1.0 : (j == n - 1 ? 0.0 : 1.0 - a.t[j]));
    m.A.push_back(a.A[j]);
    m.Ap.push_back(-a.Ap[j]);
    m.App.push_back(a.App[j]);
  }
  m.build_interpolator();
  return m;
}

std::vector<double> probe_grid(std::size_t n) { return linspace(0.0, 1.0, n); }

PickandsDiagnostics validate_pickands(const Curve& a) {
  static const std::vector<double> probes = probe_grid(1000);
  PickandsDiagnostics d;
  std::vector<double> v(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double t = probes[i];
    v[i] = a(t, 0);
    d.lower_bound_violation = std::max(d.lower_bound_violation, std::max(t, 1.0 - t) - v[i]);
    d.upper_bound_violation = std::max(d.upper_bound_violation, v[i] - 1.0);
  }
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    d.convexity_violation = std::max(d.convexity_violation, v[i] - 0.5 * (v[i - 1] + v[i + 1]));
  d.a0 = v.front();
  d.a1 = v.back();
  return d;
}

}  // namespace evcop

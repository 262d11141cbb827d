#include "fit.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "errors.hpp"
#include "families.hpp"
#include "optimizer.hpp"
#include "williamson.hpp"

namespace evcop {

namespace {

constexpr double kLogFloor = 1e-12;
constexpr double kMinH = -1e-6;

// Rotation of W data at one node into (t, A, A', A'').
struct NodeA {
  double t, a, ap, app;
};

NodeA rotate_node(double x, double w, double wp, double wpp) {
  const double d = 1.0 - wp;
  return {0.5 * (1.0 + x - w), 0.5 * (1.0 + x + w), (1.0 + wp) / d, 4.0 * wpp / (d * d * d)};
}

double h_formula(const NodeA& n) {
  const double r = n.ap / n.a, q = n.app / n.a;
  return 1.0 + (1.0 - 2.0 * n.t) * r + n.t * (1.0 - n.t) * (q - r * r);
}

}  // namespace

void FitConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("lambda must be >= 0");
  if (grid_k < 8) throw InputError("grid_k must be >= 8");
  if (basis_dim < 2) throw InputError("basis_dim must be >= 2");
  if (degree < 1) throw InputError("degree must be >= 1");
  if (basis_dim < degree) throw InputError("basis_dim must be at least the degree");
  if (max_iter < 1) throw InputError("max_iter must be >= 1");
}

std::vector<double> x_grid_from_quantiles(std::span<const double> q,
                                          const std::function<double(double)>& a_tilde) {
  std::vector<double> x{0.0};
  for (double qi : q) {
    const double a = std::clamp(a_tilde(qi), std::max(qi, 1.0 - qi), 1.0);
    const double xi = qi + a - 1.0;
    if (xi > 0.0 && xi < 1.0) x.push_back(xi);
  }
  std::sort(x.begin() + 1, x.end());
  x.push_back(1.0);
  std::vector<double> out{0.0};
  for (std::size_t i = 1; i + 1 < x.size(); ++i)
    if (x[i] - out.back() >= 1e-6 && 1.0 - x[i] >= 1e-6) out.push_back(x[i]);
  out.push_back(1.0);
  return out;
}

std::vector<double> empirical_w_grid(std::span<const double> z_sample, int k) {
  if (k < 2) throw InputError("empirical_w_grid: k must be >= 2");
  if (z_sample.empty()) throw InputError("empirical_w_grid: empty sample");
  std::vector<double> s(z_sample.begin(), z_sample.end());
  std::sort(s.begin(), s.end());
  std::vector<double> q(k);
  for (int i = 1; i <= k; ++i) q[i - 1] = empirical_quantile(s, double(i) / double(k + 1));
  const CfgEstimator cfg(s);
  auto x = x_grid_from_quantiles(q, [&](double t) { return cfg(t); });
  if (x.size() < 4) throw NumericalError("empirical_w_grid: degenerate grid after de-duplication");
  return x;
}

double HHat::operator()(double z) const {
  if (z <= 0.0 || z >= 1.0) return 0.0;
  const auto it = std::upper_bound(t.begin(), t.end(), z);
  const std::size_t a = std::size_t(it - t.begin()) - 1;
  const double s = (z - t[a]) / (t[a + 1] - t[a]);
  return h[a] + s * (h[a + 1] - h[a]);
}

struct PenalizedLikelihood::Forward {
  std::vector<double> f;
  double z_norm = 1.0;
  std::vector<NodeA> node;  // grid nodes, ends included
  std::vector<double> wp, wpp;
  std::vector<double> t, h;  // unnormalized h
  double integral = 0.0, min_h = 0.0;
};

PenalizedLikelihood::PenalizedLikelihood(ZBasis basis, std::vector<double> x_grid,
                                         std::vector<double> z_sample, double lambda, bool center)
    : basis_(std::move(basis)), x_grid_(std::move(x_grid)), z_(std::move(z_sample)), lambda_(lambda) {
  if (x_grid_.size() < 3 || x_grid_.front() != 0.0 || x_grid_.back() != 1.0)
    throw InputError("likelihood: x-grid must run from 0 to 1");
  for (std::size_t i = 1; i < x_grid_.size(); ++i)
    if (!(x_grid_[i] > x_grid_[i - 1])) throw InputError("likelihood: x-grid must be increasing");
  for (double z : z_)
    if (!(z > 0.0 && z < 1.0)) throw InputError("likelihood: z values must lie in (0,1)");
  std::sort(z_.begin(), z_.end());

  // Graded first interval, each later interval split in four.
  grid_index_.assign(x_grid_.size(), 0);
  for (int j = 0; j < 16; ++j) nodes_.push_back(x_grid_[1] * (j / 16.0) * (j / 16.0));
  for (std::size_t i = 1; i + 1 < x_grid_.size(); ++i) {
    grid_index_[i] = nodes_.size();
    const double d = x_grid_[i + 1] - x_grid_[i];
    for (int r = 0; r < 4; ++r) nodes_.push_back(r == 0 ? x_grid_[i] : x_grid_[i] + r * d / 4.0);
  }
  grid_index_.back() = nodes_.size();
  nodes_.push_back(1.0);

  design_ = basis_.design(nodes_);
  omega_ = curvature_matrix(basis_);
  center_ = center ? project_center(basis_) : Eigen::VectorXd::Zero(basis_.dim());
  weights_ = trapezoid_weights(nodes_);
}

bool PenalizedLikelihood::forward(const Eigen::VectorXd& theta, Forward& fw) const {
  const std::size_t n = nodes_.size();
  const Eigen::VectorXd p = design_ * (theta + center_);
  if (!p.allFinite()) return false;
  const double pmax = p.maxCoeff();
  fw.f.resize(n);
  double z = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    fw.f[j] = std::exp(p(j) - pmax);
    z += weights_[j] * fw.f[j];
  }
  for (double& v : fw.f) v /= z;
  fw.z_norm = z;

  // Suffix sums: tail = int_x^1 f, wp = -int_x^1 f(s)/s ds.
  std::vector<double> tail(n, 0.0), wp(n, 0.0);
  for (std::size_t j = n - 1; j-- > 1;) {
    const double dx = nodes_[j + 1] - nodes_[j];
    tail[j] = tail[j + 1] + 0.5 * dx * (fw.f[j] + fw.f[j + 1]);
    wp[j] = wp[j + 1] - 0.5 * dx * (fw.f[j] / nodes_[j] + fw.f[j + 1] / nodes_[j + 1]);
  }

  const std::size_t k = x_grid_.size();
  fw.node.assign(k, NodeA{0, 1, 0, 0});
  fw.wp.assign(k, 0.0);
  fw.wpp.assign(k, 0.0);
  fw.t.assign(k, 0.0);
  fw.h.assign(k, 0.0);
  fw.t.back() = 1.0;
  fw.min_h = kInf;
  for (std::size_t i = 1; i + 1 < k; ++i) {
    const std::size_t j = grid_index_[i];
    const double x = nodes_[j];
    const double w = x * wp[j] + tail[j];
    fw.wp[i] = wp[j];
    fw.wpp[i] = fw.f[j] / x;
    fw.node[i] = rotate_node(x, w, fw.wp[i], fw.wpp[i]);
    fw.t[i] = fw.node[i].t;
    fw.h[i] = h_formula(fw.node[i]);
    fw.min_h = std::min(fw.min_h, fw.h[i]);
  }
  fw.integral = trapezoid(fw.t, fw.h);
  return std::isfinite(fw.integral) && fw.integral > 0.0 && fw.min_h >= kMinH &&
         std::isfinite(fw.min_h);
}

HHat PenalizedLikelihood::h_hat(const Eigen::VectorXd& theta) const {
  Forward fw;
  const bool ok = forward(theta, fw);
  HHat out;
  out.t = fw.t;
  out.h = fw.h;
  out.min_h = fw.min_h;
  out.integral = fw.integral;
  if (!ok) throw NumericalError("build_h_hat: h below -1e-6 or non-finite; constraints broke down");
  for (double& v : out.h) v /= fw.integral;
  return out;
}

double PenalizedLikelihood::loglik(const Eigen::VectorXd& theta) const {
  return (*this)(theta) + lambda_ * penalty(theta);
}

double PenalizedLikelihood::operator()(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const {
  Forward fw;
  if (!forward(theta, fw)) return -kInf;
  const std::size_t k = x_grid_.size();
  const double inv_i = 1.0 / fw.integral;

  // Likelihood over the sorted sample with a moving interval pointer.
  std::vector<double> gh(k, 0.0), gt(k, 0.0);
  double gI = 0.0, ll = 0.0;
  std::size_t a = 0;
  for (double z : z_) {
    while (a + 2 < k && fw.t[a + 1] <= z) ++a;
    const double d = fw.t[a + 1] - fw.t[a];
    const double s = (z - fw.t[a]) / d;
    const double dh = fw.h[a + 1] - fw.h[a];
    const double ht = fw.h[a] + s * dh;
    const double hv = ht * inv_i;
    if (!(hv > kLogFloor)) {
      ll += std::log(kLogFloor);
      continue;
    }
    ll += std::log(hv);
    if (!grad) continue;
    const double c = 1.0 / ht;
    gh[a] += c * (1.0 - s);
    gh[a + 1] += c * s;
    gt[a] += c * dh * (s - 1.0) / d;
    gt[a + 1] -= c * dh * s / d;
    gI -= inv_i;
  }
  const double value = ll - lambda_ * penalty(theta);
  if (!grad) return value;

  // Trapezoid integral of h over t.
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const double dt = fw.t[i + 1] - fw.t[i], hs = fw.h[i] + fw.h[i + 1];
    gh[i] += 0.5 * gI * dt;
    gh[i + 1] += 0.5 * gI * dt;
    gt[i + 1] += 0.5 * gI * hs;
    gt[i] -= 0.5 * gI * hs;
  }

  // Back through h_i(t, A, A', A'') and the rotation to W, W', W''.
  const std::size_t n = nodes_.size();
  std::vector<double> g_w(n, 0.0), g_wp(n, 0.0), g_f(n, 0.0);
  for (std::size_t i = 1; i + 1 < k; ++i) {
    const NodeA& nd = fw.node[i];
    const double t = nd.t, r = nd.ap / nd.a, q = nd.app / nd.a;
    const double dh_dt = -2.0 * r + (1.0 - 2.0 * t) * (q - r * r);
    const double dh_dr = (1.0 - 2.0 * t) - 2.0 * t * (1.0 - t) * r;
    const double dh_dq = t * (1.0 - t);
    const double g_t = gt[i] + gh[i] * dh_dt;
    const double g_r = gh[i] * dh_dr, g_q = gh[i] * dh_dq;
    const double g_ap = g_r / nd.a, g_app = g_q / nd.a;
    const double g_a = -(g_r * nd.ap + g_q * nd.app) / (nd.a * nd.a);
    const double dd = 1.0 - fw.wp[i];
    const std::size_t j = grid_index_[i];
    g_w[j] += 0.5 * g_a - 0.5 * g_t;
    g_wp[j] += g_ap * 2.0 / (dd * dd) + g_app * 12.0 * fw.wpp[i] / (dd * dd * dd * dd);
    g_f[j] += g_app * 4.0 / (dd * dd * dd) / nodes_[j];
  }

  // W_j = x_j W'_j + tail_j, then the suffix sums back onto the intervals.
  double acc_tail = 0.0, acc_wp = 0.0;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    acc_tail += g_w[j];
    acc_wp += g_wp[j] + nodes_[j] * g_w[j];
    // Interval [j, j+1] feeds every tail_i and W'_i with i <= j.
    const double dx = nodes_[j + 1] - nodes_[j];
    g_f[j] += 0.5 * dx * acc_tail - 0.5 * dx * acc_wp / nodes_[j];
    g_f[j + 1] += 0.5 * dx * acc_tail - 0.5 * dx * acc_wp / nodes_[j + 1];
  }

  // f = e / Z with Z = sum w e; e = exp(p - max p).
  double gf_dot_f = 0.0;
  for (std::size_t j = 0; j < n; ++j) gf_dot_f += g_f[j] * fw.f[j];
  Eigen::VectorXd g_p(n);
  for (std::size_t j = 0; j < n; ++j) g_p(j) = fw.f[j] * (g_f[j] - weights_[j] * gf_dot_f);
  *grad = design_.transpose() * g_p - 2.0 * lambda_ * (omega_ * theta);
  return value;
}

HHat build_h_hat(const Eigen::VectorXd& theta, const ZBasis& basis, std::span<const double> x_grid,
                 bool center) {
  const PenalizedLikelihood lik(basis, {x_grid.begin(), x_grid.end()}, {}, 0.0, center);
  return lik.h_hat(theta);
}

double penalized_loglik(const Eigen::VectorXd& theta, const ZBasis& basis, const Eigen::MatrixXd& omega,
                        std::span<const double> x_grid, std::span<const double> z_sample, double lambda) {
  const PenalizedLikelihood lik(basis, {x_grid.begin(), x_grid.end()}, {z_sample.begin(), z_sample.end()}, 0.0);
  return lik(theta) - lambda * theta.dot(omega * theta);
}

bool ordering_heuristic(std::span<const double> z_sample) {
  if (z_sample.empty()) return false;
  constexpr int kBins = 32;
  std::array<std::size_t, kBins> counts{};
  for (double z : z_sample) counts[std::clamp(int(z * kBins), 0, kBins - 1)]++;
  const std::size_t top = *std::max_element(counts.begin(), counts.end());
  for (int b = 0; b < kBins; ++b)
    if (counts[b] == top && (b + 0.5) / kBins >= 0.5) return false;
  return true;
}

WilliamsonGrid w_from_theta(const ZBasis& basis, const Eigen::VectorXd& theta, bool center, bool normalize) {
  const ClrDensity d(basis, theta, center);
  const auto nodes = pipeline_w_nodes(basis.config().interior);
  // Gauss segments keep the nodal A, A', A'' consistent; see williamson_from_density.
  auto g = williamson_from_density([&](double x) { return d.pdf(x); }, nodes, 5);
  return normalize ? normalize_w(std::move(g)) : g;
}

PickandsModel pickands_from_theta(const ZBasis& basis, const Eigen::VectorXd& theta, bool center,
                                  bool normalize, bool flipped) {
  const PickandsModel a = rotate(w_from_theta(basis, theta, center, normalize));
  return flipped ? mirror(a) : a;
}

FittedModel optimize(std::span<const double> z_sample, const FitConfig& config) {
  config.validate();
  if (z_sample.size() < 30) throw InputError("fit: need at least 30 observations");
  const bool flip = config.force_flip ? *config.force_flip
                                      : config.ordering_heuristic && ordering_heuristic(z_sample);
  std::vector<double> z(z_sample.begin(), z_sample.end());
  if (flip)
    for (double& v : z) v = 1.0 - v;

  auto x_grid = empirical_w_grid(z, config.grid_k);
  const std::vector<double> interior(x_grid.begin() + 1, x_grid.end() - 1);
  ZBasis basis(quantile_knots(interior, config.basis_dim - config.degree, config.degree));
  const PenalizedLikelihood lik(basis, x_grid, z, config.lambda, true);

  LbfgsOptions opts;
  opts.max_iter = config.max_iter;
  opts.grad_tol = config.grad_tol;
  const auto res = lbfgs_maximize(lik, Eigen::VectorXd::Zero(basis.dim()), opts);

  FittedModel m{basis, res.x, true, flip, config.lambda, 0.0, 0.0, 0, false, {}, {}};
  m.center_applied = true;
  m.flipped = flip;
  m.lambda = config.lambda;
  m.penalty = lik.penalty(res.x);
  m.loglik = res.value + config.lambda * m.penalty;
  m.iterations = res.iterations;
  m.converged = res.converged;
  m.x_grid = std::move(x_grid);
  m.pickands = pickands_from_theta(basis, res.x, true, config.normalize_w, flip);
  return m;
}

UnivariateFit::UnivariateFit(ZBasis basis, Eigen::VectorXd theta, double a, double b)
    : basis_(std::move(basis)), theta_(std::move(theta)), a_(a), b_(b) {
  if (!(b > a)) throw InputError("univariate fit: bounds must satisfy a < b");
  grid_ = default_density_grid(basis_.breakpoints());
  const Eigen::VectorXd p = basis_.design(grid_) * theta_;
  f_.resize(grid_.size());
  for (std::size_t j = 0; j < grid_.size(); ++j) f_[j] = std::exp(p(j));
  const double z = trapezoid(grid_, f_);
  for (double& v : f_) v /= z;
  cdf_ = cumulative_trapezoid(grid_, f_);
  cdf_.back() = 1.0;
}

double UnivariateFit::pdf(double x) const {
  const double y = (x - a_) / (b_ - a_);
  if (y < 0.0 || y > 1.0) return 0.0;
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), y);
  const std::size_t j = std::min<std::size_t>(it - grid_.begin(), grid_.size() - 1) - 1;
  const double s = (y - grid_[j]) / (grid_[j + 1] - grid_[j]);
  return (f_[j] + s * (f_[j + 1] - f_[j])) / (b_ - a_);
}

double UnivariateFit::cdf(double x) const {
  const double y = (x - a_) / (b_ - a_);
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  // Integral of the piecewise linear density, consistent with the table.
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), y);
  const std::size_t j = std::size_t(it - grid_.begin()) - 1;
  const double d = grid_[j + 1] - grid_[j], u = y - grid_[j];
  const double fy = f_[j] + (f_[j + 1] - f_[j]) * u / d;
  return cdf_[j] + 0.5 * u * (f_[j] + fy);
}

double UnivariateFit::quantile(double p) const {
  if (p <= 0.0) return a_;
  if (p >= 1.0) return b_;
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), p);
  const std::size_t j = std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1) - 1;
  const double d = grid_[j + 1] - grid_[j], r = p - cdf_[j];
  const double c = 0.5 * (f_[j + 1] - f_[j]) / d;
  // Solve f_j u + c u^2 = r in the stable form.
  const double disc = std::max(0.0, f_[j] * f_[j] + 4.0 * c * r);
  const double denom = f_[j] + std::sqrt(disc);
  const double u = denom > 0.0 ? 2.0 * r / denom : 0.0;
  return a_ + (b_ - a_) * (grid_[j] + std::clamp(u, 0.0, d));
}

UnivariateFit fit_univariate_density(std::span<const double> sample, double a, double b,
                                     const UnivariateConfig& config) {
  if (sample.empty()) throw InputError("univariate fit: empty sample");
  if (!(b > a)) throw InputError("univariate fit: bounds must satisfy a < b");
  std::vector<double> xs;
  for (double x : sample) {
    if (!(x > a && x < b)) throw InputError("univariate fit: sample value outside the bounds");
    xs.push_back((x - a) / (b - a));
  }
  ZBasis basis(quantile_knots(xs, config.basis_dim - config.degree, config.degree));
  const auto grid = default_density_grid(basis.breakpoints());
  const Eigen::MatrixXd g = basis.design(grid);
  const Eigen::VectorXd sum_b = basis.design(xs).colwise().sum().transpose();
  const Eigen::MatrixXd omega = curvature_matrix(basis);
  const auto w = trapezoid_weights(grid);
  const double n = double(xs.size()), lambda = config.lambda;

  const Objective obj = [&](const Eigen::VectorXd& th, Eigen::VectorXd* grad) {
    const Eigen::VectorXd p = g * th;
    const double pmax = p.maxCoeff();
    Eigen::VectorXd we(p.size());
    for (Eigen::Index j = 0; j < p.size(); ++j) we(j) = w[j] * std::exp(p(j) - pmax);
    const double z = we.sum();
    const Eigen::VectorXd om_th = omega * th;
    if (grad) *grad = sum_b - n * (g.transpose() * we) / z - 2.0 * lambda * om_th;
    return sum_b.dot(th) - n * (std::log(z) + pmax) - lambda * th.dot(om_th);
  };
  LbfgsOptions opts;
  opts.max_iter = config.max_iter;
  opts.grad_tol = config.grad_tol;
  const auto res = lbfgs_maximize(obj, Eigen::VectorXd::Zero(basis.dim()), opts);
  return UnivariateFit(std::move(basis), res.x, a, b);
}

Chain mcmc_sample(const std::function<double(const Eigen::VectorXd&)>& log_target, Eigen::VectorXd x0,
                  std::size_t n_samples, std::uint64_t seed, double step_scale) {
  double cur = log_target(x0);
  if (!std::isfinite(cur)) throw InputError("mcmc: log target not finite at the initial point");
  if (!(step_scale > 0.0)) throw InputError("mcmc: step scale must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  const std::size_t burn = n_samples / 4;
  constexpr int kWindow = 20;

  Chain chain;
  chain.states.reserve(n_samples);
  Eigen::VectorXd x = std::move(x0), prop(x.size());
  int window_acc = 0, window_n = 0;
  std::size_t kept_acc = 0;
  for (std::size_t it = 0; it < burn + n_samples; ++it) {
    for (Eigen::Index i = 0; i < x.size(); ++i) prop(i) = x(i) + step_scale * nd(rng);
    const double lp = log_target(prop);
    const bool accept = std::isfinite(lp) && std::log(ud(rng)) < lp - cur;
    if (accept) {
      x = prop;
      cur = lp;
    }
    if (it < burn) {
      window_acc += accept;
      if (++window_n == kWindow) {
        const double rate = double(window_acc) / kWindow;
        if (rate < 0.2) step_scale *= 0.7;
        else if (rate > 0.4) step_scale *= 1.4;
        window_acc = window_n = 0;
      }
      continue;
    }
    kept_acc += accept;
    chain.states.push_back(x);
  }
  if (n_samples > 0 && kept_acc == 0) throw NumericalError("mcmc: zero acceptance after adaptation");
  chain.acceptance = n_samples ? double(kept_acc) / double(n_samples) : 0.0;
  chain.step_scale = step_scale;
  return chain;
}

std::vector<RandomEvc> random_pickands(double lambda, double radius, std::size_t n, std::uint64_t seed,
                                       const ZBasis& basis) {
  if (!(lambda >= 0.0)) throw InputError("random_pickands: lambda must be >= 0");
  if (!(radius > 0.0)) throw InputError("random_pickands: R must be positive");
  const Eigen::MatrixXd omega = curvature_matrix(basis);
  const Eigen::VectorXd theta0 = project_center(basis);
  const auto log_prior = [&](const Eigen::VectorXd& th) {
    if (th.norm() > radius) return -kInf;
    const Eigen::VectorXd bar = th + theta0;
    return -lambda * bar.dot(omega * bar);
  };
  // The prior is stiff in the high-curvature directions, so the step is
  // tuned on a warm-up run before any state is kept.
  constexpr std::size_t kThin = 20000, kWarmup = 20000;
  std::vector<RandomEvc> out;
  const auto warm = mcmc_sample(log_prior, Eigen::VectorXd::Zero(basis.dim()), kWarmup, seed, 0.05);
  Eigen::VectorXd start = warm.states.back();
  double step = warm.step_scale;
  for (std::uint64_t round = 0; out.size() < n; ++round) {
    if (round > 20) throw NumericalError("random_pickands: too many pipeline failures");
    const auto chain = mcmc_sample(log_prior, start, (n - out.size()) * kThin, seed + 1 + round, step);
    start = chain.states.back();
    step = chain.step_scale;
    for (std::size_t i = kThin - 1; i < chain.states.size() && out.size() < n; i += kThin) {
      try {
        const bool mirrored = out.size() % 2 == 1;
        auto a = pickands_from_theta(basis, chain.states[i], true, true, mirrored);
        if (!validate_pickands(a.as_curve()).ok(1e-6)) continue;
        out.push_back({chain.states[i], mirrored, std::move(a)});
      } catch (const NumericalError&) {
        // Resample: the next thinned state takes its place.
      }
    }
  }
  return out;
}

}  // namespace evcop

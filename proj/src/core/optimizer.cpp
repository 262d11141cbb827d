#include "optimizer.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "errors.hpp"

namespace evcop {

LbfgsResult lbfgs_maximize(const Objective& f, Eigen::VectorXd x0, const LbfgsOptions& opts) {
  // Work on the minimization problem F = -f.
  LbfgsResult r;
  r.x = std::move(x0);
  Eigen::VectorXd g(r.x.size());
  double fx = f(r.x, &g);
  if (!std::isfinite(fx)) throw NumericalError("lbfgs: objective not finite at the start point");
  g = -g;
  fx = -fx;

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  Eigen::VectorXd g_new(r.x.size());
  for (r.iterations = 0; r.iterations < opts.max_iter; ++r.iterations) {
    if (g.lpNorm<Eigen::Infinity>() <= opts.grad_tol) {
      r.converged = true;
      break;
    }
    // Two-loop recursion.
    Eigen::VectorXd q = g;
    std::vector<double> alpha(s_hist.size());
    for (int i = int(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    else q /= std::max(1.0, g.norm());
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd d = -q;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      // Lost descent; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = -g / std::max(1.0, g.norm());
      slope = g.dot(d);
    }

    double step = 1.0, f_new = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int k = 0; k < opts.max_backtracks; ++k, step *= 0.5) {
      x_new = r.x + step * d;
      f_new = f(x_new, &g_new);
      if (std::isfinite(f_new) && -f_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    f_new = -f_new;
    g_new = -g_new;

    const Eigen::VectorXd s = x_new - r.x, y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (int(s_hist.size()) > opts.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double gain = fx - f_new;
    r.x = x_new;
    g = g_new;
    fx = f_new;
    if (gain <= opts.rel_tol * std::max(1.0, std::abs(fx))) {
      r.converged = true;
      ++r.iterations;
      break;
    }
  }
  r.value = -fx;
  r.grad = -g;
  return r;
}

}  // namespace evcop

// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bayes.hpp"
#include "copula.hpp"
#include "families.hpp"
#include "fit.hpp"
#include "harness.hpp"
#include "pickands.hpp"
#include "williamson.hpp"

using namespace evcop;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "NOT MET: ") + what;
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double sup_diff(const Curve& a, const Curve& b, int order = 0) {
  double worst = 0.0;
  for (double t : probe_grid(1000)) worst = std::max(worst, std::abs(a(t, order) - b(t, order)));
  return worst;
}

const Curve kQuadratic = [](double t, int order) {
  switch (order) {
    case 0: return t * t - t + 1.0;
    case 1: return 2.0 * t - 1.0;
    default: return 2.0;
  }
};

Curve constant_curve(double c) {
  return [c](double, int order) { return order == 0 ? c : 0.0; };
}

PickandsModel random_pipeline_model(std::mt19937_64& rng, double scale = 0.4) {
  static const ZBasis b(uniform_knots(10, 3));
  std::normal_distribution<double> nd(0.0, scale);
  Eigen::VectorXd theta(b.dim());
  for (int i = 0; i < b.dim(); ++i) theta(i) = nd(rng);
  return pickands_from_theta(b, theta, true, true, false);
}

std::vector<double> two_sided_grid() {
  std::vector<double> g;
  for (double s : graded_nodes(10001, 4.0)) {
    g.push_back(0.5 * s);
    g.push_back(1.0 - 0.5 * s);
  }
  return merge_nodes(std::move(g));
}

// ---------------------------------------------------------------------------

Outcome c1() {
  Outcome o;
  const auto a = rotate(w_uniform_power(2.0), linspace(0.0, 1.0, 201));
  const double da = sup_diff(a.as_curve(), kQuadratic);
  o.require(da <= 1e-6, fmt("sup|A - (t^2-t+1)| = %.2e (tol 1e-6)", da));
  const auto w = rotate_inverse(kQuadratic);
  double dw = 0.0;
  for (double x : probe_grid(1000)) dw = std::max(dw, std::abs(w(x, 0) - (x - 2.0 * std::sqrt(x) + 1.0)));
  o.require(dw <= 1e-8, fmt("sup|W - (x-2sqrt(x)+1)| = %.2e (tol 1e-8)", dw));
  return o;
}

Outcome c2() {
  Outcome o;
  const auto g = williamson_from_density([](double x) { return 0.5 / std::sqrt(x); }, graded_nodes(200, 2.0));
  double worst = 0.0;
  for (double x : linspace(0.0, 1.0, 5001)) worst = std::max(worst, std::abs(g(x) - (x - 2.0 * std::sqrt(x) + 1.0)));
  o.require(worst <= 2e-3, fmt("U^2 density, 200 nodes: sup err %.2e (tol 2e-3)", worst));
  const double w = w_uniform_power(1.0)(0.5, 0);
  const double exact = 0.5 + 0.5 * std::log(0.5);
  o.require(std::abs(w - exact) <= 1e-10, fmt("W(0.5) = %.10f, closed form err %.1e (tol 1e-10)", w, std::abs(w - exact)));
  o.require(std::abs(w - 0.15343) <= 5e-6, fmt("rounds to %.5f", w));
  return o;
}

Outcome c3() {
  Outcome o;
  const auto q = constant_curve(0.75);
  o.require(upper_tail(q) == 0.5, fmt("lambda = %.17g", upper_tail(q)));
  const double db = std::abs(blomqvist_beta(q) - (std::sqrt(2.0) - 1.0));
  o.require(db <= 1e-12, fmt("|beta - (sqrt2-1)| = %.1e", db));

  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto a = random_pipeline_model(rng).as_curve();
    worst = std::max(worst, std::abs(blomqvist_beta(a) - (std::pow(2.0, upper_tail(a)) - 1.0)));
  }
  o.require(worst <= 1e-15, fmt("beta = 2^lambda - 1 on 100 models: max err %.1e", worst));

  const ParametricPickands g2{Family::Gumbel, 2.0, {}};
  const auto a = family_curve(g2);
  const double g_a = gini_from_pickands(a);
  const double g_c = gini_copula(EvCopula(g2));
  const auto w = rotate_inverse(a);
  const double g_f = gini_from_density([&](double x) { return x * w(x, 2); }, two_sided_grid());
  const double spread = std::max({g_a, g_c, g_f}) - std::min({g_a, g_c, g_f});
  o.require(spread <= 5e-3, fmt("Gumbel 2 Gini forms %.5f/%.5f/%.5f", g_a, g_f, g_c) + fmt(" spread %.1e", spread));

  double fam = 0.0;
  for (double th : {1.5, 2.0, 3.0, 5.0}) {
    const auto p = rotate(w_grid_from_curve(w_power_complement(th), pipeline_w_nodes()));
    fam = std::max(fam, std::abs(gini_from_pickands(p.as_curve()) - (th - 1.0) / (th + 1.0)));
  }
  for (double th : {0.5, 1.0, 2.0, 4.0}) {
    const auto p = rotate(w_grid_from_curve(w_uniform_power(th), pipeline_w_nodes()));
    fam = std::max(fam, std::abs(gini_from_pickands(p.as_curve()) - th / (th + 1.0)));
  }
  o.require(fam <= 1e-3, fmt("family Gini examples max err %.1e (tol 1e-3)", fam));
  return o;
}

Outcome c4() {
  Outcome o;
  std::mt19937_64 rng(202);
  std::vector<EvCopula> cs{EvCopula(ParametricPickands{Family::Gumbel, 2.0, {}}),
                           EvCopula(ParametricPickands{Family::Galambos, 1.0, {}}),
                           EvCopula(ParametricPickands{Family::HuslerReiss, 1.5, {}}),
                           EvCopula(ParametricPickands{Family::Gumbel, 3.0, std::pair{0.5, 1.0}}),
                           EvCopula(random_pipeline_model(rng))};
  double ms = 0.0, pdf_rel = 0.0, part_rel = 0.0, incr = 0.0;
  const auto g20 = linspace(0.025, 0.975, 20);
  const auto g10 = linspace(0.05, 0.95, 10);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const auto& c : cs) {
    for (int n : {2, 5, 10})
      for (double u : g20)
        for (double v : g20)
          ms = std::max(ms, std::abs(std::pow(c.cdf(std::pow(u, 1.0 / n), std::pow(v, 1.0 / n)), n) - c.cdf(u, v)));
    for (double u : g10) {
      for (double v : g10) {
        const double k = 1e-4, h = 1e-6;
        const double mixed =
            (c.cdf(u + k, v + k) - c.cdf(u + k, v - k) - c.cdf(u - k, v + k) + c.cdf(u - k, v - k)) / (4 * k * k);
        pdf_rel = std::max(pdf_rel, std::abs(c.pdf(u, v) - mixed) / std::max(1.0, std::abs(mixed)));
        const double du = (c.cdf(u + h, v) - c.cdf(u - h, v)) / (2 * h);
        const double dv = (c.cdf(u, v + h) - c.cdf(u, v - h)) / (2 * h);
        part_rel = std::max(part_rel, std::abs(c.partial_u(u, v) - du) / std::max(1.0, std::abs(du)));
        part_rel = std::max(part_rel, std::abs(c.partial_v(u, v) - dv) / std::max(1.0, std::abs(dv)));
      }
    }
    for (int i = 0; i < 500; ++i) {
      double u1 = unif(rng), u2 = unif(rng), v1 = unif(rng), v2 = unif(rng);
      if (u1 > u2) std::swap(u1, u2);
      if (v1 > v2) std::swap(v1, v2);
      incr = std::min(incr, c.cdf(u2, v2) - c.cdf(u1, v2) - c.cdf(u2, v1) + c.cdf(u1, v1));
    }
  }
  o.require(ms <= 1e-9, fmt("max-stability err %.1e (tol 1e-9)", ms));
  o.require(pdf_rel <= 1e-4, fmt("pdf vs mixed FD rel %.1e (tol 1e-4)", pdf_rel));
  o.require(incr >= -1e-10, fmt("min rectangle mass %.1e (>= -1e-10)", incr));
  o.require(part_rel <= 1e-5, fmt("partials vs FD rel %.1e (tol 1e-5)", part_rel));
  return o;
}

Outcome c5() {
  Outcome o;
  const auto nodes = linspace(0.0, 1.0, 2049);
  const ZBasis b(uniform_knots(8, 3));
  std::mt19937_64 rng(303);
  std::normal_distribution<double> nd(0.0, 0.6);
  double slack_w = kInf;
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd t1(b.dim()), t2(b.dim());
    for (int i = 0; i < b.dim(); ++i) t1(i) = nd(rng), t2(i) = nd(rng);
    const auto f = clr_inverse([&](double x) { return b.spline(t1, x); }, nodes);
    const auto g = clr_inverse([&](double x) { return b.spline(t2, x); }, nodes);
    const double d = tvd(f, g, nodes);
    const auto wf = williamson_from_density(f, nodes), wg = williamson_from_density(g, nodes);
    double sup_w = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) sup_w = std::max(sup_w, std::abs(wf.W[j] - wg.W[j]));
    slack_w = std::min(slack_w, 2.0 * d + 1e-9 - sup_w);
  }
  o.require(slack_w >= 0.0, fmt("W bound: min slack over 100 pairs %.2e", slack_w));

  int held = 0;
  double slack_c = kInf;
  for (int rep = 0; rep < 100; ++rep) {
    const auto a1 = random_pipeline_model(rng), a2 = random_pipeline_model(rng);
    const auto r = supnorm_bound_check(a1.as_curve(), a2.as_curve());
    held += r.holds();
    slack_c = std::min(slack_c, r.bound - r.measured);
  }
  o.require(held == 100, fmt("copula sup-norm bound held %.0f/100 (min slack %.2e)", held, slack_c));
  return o;
}

Outcome c6() {
  Outcome o;
  StudySpec s;
  s.mode = StudySpec::Mode::Tvd;
  s.families = {{{Family::Gumbel, 2.0, {}}, 1e-5}, {{Family::Galambos, 1.0, {}}, 1e-4}};
  s.random.count = 0;
  s.sample_sizes = {1000};
  s.replications = 10;
  s.seed = 606;
  const auto res = run_study(s);
  const char* names[] = {"Gumbel 2", "Galambos 1"};
  double slowest = 0.0;
  for (std::size_t c = 0; c < 2; ++c) {
    int good = 0;
    std::vector<double> v;
    for (const auto& r : res.runs) {
      if (r.copula_id != c) continue;
      slowest = std::max(slowest, r.runtime_s);
      if (r.ok) v.push_back(r.tvd);
      good += r.ok && r.tvd <= 0.10;
    }
    o.require(good >= 8, std::string(names[c]) + fmt(": tvd <= 0.10 in %.0f/10, median %.4f", good,
                                                      v.empty() ? std::nan("") : empirical_quantile(v, 0.5)));
  }
  o.require(slowest <= 300.0, fmt("slowest fit %.2fs (budget 300s)", slowest));
  return o;
}

Outcome c7() {
  Outcome o;
  StudySpec s;
  s.mode = StudySpec::Mode::Tvd;
  s.random = {1e-4, 5.0, 13, 20};
  s.sample_sizes = {250, 1000, 2000};
  s.replications = 1;
  s.seed = 707;
  const auto sum = tvd_summary(run_study(s));
  o.require(sum[1].failures == 0 && sum[1].q50 <= 0.08,
            fmt("median tvd at n=1000: %.4f (tol 0.08), mean %.4f, failures %.0f", sum[1].q50, sum[1].mean,
                double(sum[1].failures)));
  o.require(sum[2].q50 <= sum[0].q50, fmt("median n=2000 %.4f <= n=250 %.4f", sum[2].q50, sum[0].q50));
  return o;
}

Outcome c8() {
  Outcome o;
  const auto s = EvCopula::independence().simulate(2000, 808);
  std::mt19937_64 rng(808);
  bool exact = true;
  for (const auto& row : s) {
    (void)((static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53);
    exact = exact && row[1] == (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  }
  o.require(exact, "A = 1: V_i = P_i exactly");
  const ParametricPickands g2{Family::Gumbel, 2.0, {}};
  const auto sample = EvCopula(g2).simulate(5000, 809);
  const double beta = std::pow(4.0, 1.0 - family_pickands(g2, 0.5)) - 1.0;
  const double eb = empirical_blomqvist(sample);
  o.require(std::abs(eb - beta) <= 0.05, fmt("empirical beta %.4f vs %.4f (tol 0.05)", eb, beta));
  const auto grid = probe_grid(1000);
  const auto cfg = cfg_estimator(sample, grid);
  double sup = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) sup = std::max(sup, std::abs(cfg[i] - family_pickands(g2, grid[i])));
  o.require(sup <= 0.03, fmt("CFG sup err %.4f (tol 0.03)", sup));
  return o;
}

Outcome c9() {
  Outcome o;
  struct Config {
    const char* name;
    ParametricPickands truth;
    std::size_t n;
    int dim, grid_k;
    double lambda;
  };
  const Config configs[] = {{"Gumbel 1.6", {Family::Gumbel, 1.6, {}}, 300, 13, 78, 1e-2},
                            {"Galambos 1", {Family::Galambos, 1.0, {}}, 500, 9, 40, 1e-4},
                            {"Husler-Reiss 2", {Family::HuslerReiss, 2.0, {}}, 1000, 13, 78, 1e-5}};
  std::mt19937_64 rng(909);
  std::normal_distribution<double> nd(0.0, 0.3);
  for (const auto& c : configs) {
    const auto z = z_transform(EvCopula(c.truth).simulate(c.n, rng()));
    const auto xg = empirical_w_grid(z, c.grid_k);
    const std::vector<double> interior(xg.begin() + 1, xg.end() - 1);
    const ZBasis b(quantile_knots(interior, c.dim - 3, 3));
    const PenalizedLikelihood lik(b, xg, z, c.lambda);
    double worst = 0.0;
    int points = 0;
    for (int attempt = 0; points < 5 && attempt < 200; ++attempt) {
      Eigen::VectorXd th(b.dim());
      for (int i = 0; i < b.dim(); ++i) th(i) = nd(rng);
      Eigen::VectorXd g;
      if (!std::isfinite(lik(th, &g))) continue;
      ++points;
      for (int i = 0; i < b.dim(); ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(th(i)));
        Eigen::VectorXd p = th, m = th;
        p(i) += h;
        m(i) -= h;
        const double fd = (lik(p) - lik(m)) / (2.0 * h);
        worst = std::max(worst, std::abs(g(i) - fd) / std::max(1.0, std::abs(fd)));
      }
    }
    o.require(points == 5 && worst <= 1e-4,
              std::string(c.name) + fmt(": %.0f points, max rel err %.1e (tol 1e-4)", points, worst));
  }
  return o;
}

Outcome c10() {
  Outcome o;
  std::mt19937_64 rng(1010);
  double worst = 0.0;
  int valid = 0, total = 0;
  for (int m = 0; m < 3; ++m) {
    const auto a = random_pipeline_model(rng).as_curve();
    for (double alpha : {0.3, 0.6, 1.0}) {
      for (double beta : {0.25, 0.5, 0.9}) {
        const auto k = khoudraji(a, alpha, beta);
        const double h = 1e-6;
        worst = std::max(worst, std::abs((k(h, 0) - k(0.0, 0)) / h + beta));
        worst = std::max(worst, std::abs((k(1.0, 0) - k(1.0 - h, 0)) / h - alpha));
        valid += validate_pickands(k).ok(1e-6);
        ++total;
      }
    }
  }
  o.require(worst <= 1e-3, fmt("boundary slopes max err %.1e (tol 1e-3)", worst));
  o.require(valid == total, fmt("valid outputs %.0f/%.0f", valid, total));
  return o;
}

Outcome c11() {
  Outcome o;
  const ZBasis b(uniform_knots(10, 3));
  const Eigen::MatrixXd omega = curvature_matrix(b);
  const Eigen::VectorXd theta0 = project_center(b);
  const double lambda = 1e-4, radius = 5.0;
  const auto log_prior = [&](const Eigen::VectorXd& th) {
    if (th.norm() > radius) return -kInf;
    const Eigen::VectorXd bar = th + theta0;
    return -lambda * bar.dot(omega * bar);
  };
  const auto ch = mcmc_sample(log_prior, Eigen::VectorXd::Zero(b.dim()), 200000, 1111, 0.05);
  double max_norm = 0.0;
  for (const auto& s : ch.states) max_norm = std::max(max_norm, s.norm());
  o.require(max_norm <= radius, fmt("max |theta| over %.0f states %.4f (R = 5), acceptance %.2f",
                                    double(ch.states.size()), max_norm, ch.acceptance));

  const auto r = random_pickands(lambda, radius, 200, 1112, b);
  int valid = 0;
  double gmin = kInf, gmax = -kInf;
  for (const auto& e : r) {
    const auto a = e.pickands.as_curve();
    valid += validate_pickands(a).ok(1e-6);
    const double g = gini_from_pickands(a);
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
  }
  o.require(r.size() == 200 && valid == 200, fmt("valid %.0f/%.0f", valid, double(r.size())));
  o.require(gmin <= 0.1 && gmax >= 0.9, fmt("Gini range [%.3f, %.3f] covers [0.1, 0.9]", gmin, gmax));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "closed-form round trip", 1.0, c1},
      {2, "Williamson pipeline", 60.0, c2},
      {3, "dependence measures", 30.0, c3},
      {4, "copula laws", 60.0, c4},
      {5, "convergence inequalities", 120.0, c5},
      {6, "estimation quality", 7200.0, c6},
      {7, "scaled TVD table", 7200.0, c7},
      {8, "simulation correctness", 600.0, c8},
      {9, "likelihood gradient", 600.0, c9},
      {10, "Khoudraji slopes", 600.0, c10},
      {11, "random EVC generation", 600.0, c11},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) o.require(false, fmt("runtime %.1fs over budget %.0fs", secs, c.budget_s));
    failed += !o.pass;
    std::printf("[%s] %2d %-26s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(std::size(criteria)) - failed, std::size(criteria));
  return failed ? 1 : 0;
}

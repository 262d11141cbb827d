#include <doctest.h>

#include <cmath>
#include <random>

#include "bayes.hpp"
#include "errors.hpp"
#include "numerics.hpp"

using namespace evcop;

namespace {

// Graded nodes x = s^4 that avoid x = 0, for densities singular at 0.
std::vector<double> singular_grid(std::size_t n = 20001) {
  auto g = graded_nodes(n, 4.0);
  g.erase(g.begin());
  return g;
}

Eigen::VectorXd random_theta(int dim, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  Eigen::VectorXd t(dim);
  for (int i = 0; i < dim; ++i) t(i) = nd(rng);
  return t;
}

}  // namespace

TEST_CASE("inverse clr") {
  const auto grid = linspace(0.0, 1.0, 1025);
  const auto uniform = clr_inverse([](double) { return 0.0; }, grid);
  for (double x : {0.0, 0.3, 1.0}) CHECK(uniform(x) == doctest::Approx(1.0).epsilon(1e-15));

  const auto sg = singular_grid();
  const auto f = clr_inverse(clr_uniform_square, sg);
  for (double x : {0.01, 0.1, 0.5, 0.9, 1.0}) CHECK(std::abs(f(x) - 0.5 / std::sqrt(x)) <= 1e-4);

  CHECK_THROWS_AS(clr_inverse([](double x) { return 800.0 * x; }, grid), NumericalError);

  // Normalization against a reference rule independent of the trapezoid grid.
  ZBasis b(uniform_knots(10, 3));
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    ClrDensity d(b, random_theta(b.dim(), rng, 0.25), rep % 2 == 0);
    CHECK(std::abs(trapezoid(d.grid(), [&] {
      std::vector<double> v;
      for (double x : d.grid()) v.push_back(d.pdf(x));
      return v;
    }()) - 1.0) <= 1e-12);
    // The trapezoid on 512+ nodes is within 1e-3 of the exact mass even for
    // the steep centered densities.
    const double reference = gauss_composite([&](double x) { return d.pdf(x); }, linspace(0, 1, 2001), 10);
    CHECK(std::abs(reference - 1.0) <= 1e-3);
    for (double x : d.grid()) REQUIRE(d.pdf(x) > 0.0);
  }
}

TEST_CASE("clr") {
  const auto grid = linspace(0.0, 1.0, 2049);
  const auto zero = clr([](double) { return 1.0; }, grid);
  CHECK(std::abs(zero(0.4)) <= 1e-15);

  ZBasis b(uniform_knots(6, 3));
  std::mt19937_64 rng(9);
  const Eigen::VectorXd theta = random_theta(b.dim(), rng, 1.0);
  const RealFn p = [&](double x) { return b.spline(theta, x); };
  const auto round = clr(clr_inverse(p, grid), grid);
  for (int i = 0; i <= 100; ++i) CHECK(std::abs(round(i / 100.0) - p(i / 100.0)) <= 1e-5);

  const auto sg = singular_grid(40001);
  for (double th : {0.5, 2.0, 4.0}) {
    const RealFn pdf = [th](double x) { return std::pow(x, 1.0 / th - 1.0) / th; };
    const auto c = clr(pdf, sg);
    for (int i = 0; i <= 99; ++i) {
      const double x = 0.01 + i * 0.01;
      CHECK(std::abs(c(x) - (1.0 - th) / th * (1.0 + std::log(x))) <= 1e-5);
    }
  }
  CHECK_THROWS_AS(clr([](double x) { return x - 0.5; }, grid), InputError);
}

TEST_CASE("perturbation and powering") {
  const auto grid = linspace(1e-9, 1.0 - 1e-9, 20001);
  const RealFn f = [](double x) { return 2.0 * x + 0.1; };
  const auto g = perturb(f, [](double) { return 1.0; }, grid);
  const double mass = 1.1;  // int (2x + 0.1)
  for (double x : {0.1, 0.5, 0.9}) CHECK(std::abs(g(x) - f(x) / mass) <= 1e-6);

  // U^(1/2) has pdf 2x, 1 - U^(1/3) has pdf 3(1-x)^2; their perturbation is Beta(2,3).
  const auto beta = perturb([](double x) { return 2.0 * x; },
                            [](double x) { return 3.0 * (1.0 - x) * (1.0 - x); }, grid);
  for (int i = 1; i < 20; ++i) {
    const double x = i / 20.0;
    CHECK(std::abs(beta(x) - 12.0 * x * (1.0 - x) * (1.0 - x)) <= 1e-5);
  }

  const RealFn a = [](double x) { return 0.5 + x; };
  const RealFn c = [](double x) { return std::exp(std::sin(3.0 * x)); };
  const auto lhs = clr(perturb(a, c, grid), grid);
  const auto ca = clr(a, grid), cc = clr(c, grid);
  for (double x : {0.05, 0.3, 0.7, 0.99}) CHECK(std::abs(lhs(x) - ca(x) - cc(x)) <= 1e-6);

  const auto pw = clr(power(2.5, c, grid), grid);
  for (double x : {0.05, 0.3, 0.7, 0.99}) CHECK(std::abs(pw(x) - 2.5 * cc(x)) <= 1e-6);
}

TEST_CASE("total variation") {
  const RealFn one = [](double) { return 1.0; };
  const RealFn lin = [](double x) { return 2.0 * x; };
  CHECK(tvd(lin, lin) == 0.0);
  CHECK(std::abs(tvd(one, lin) - 0.25) <= 1e-4);
  CHECK(std::abs(tvd(one, lin) - tvd(lin, one)) <= 1e-12);
  CHECK_THROWS_AS(tvd(one, lin, linspace(0, 1, 100)), InputError);
}

TEST_CASE("clr isometry") {
  ZBasis b(uniform_knots(5, 3));
  std::mt19937_64 rng(21);
  const ClrDensity f(b, random_theta(b.dim(), rng, 0.7), false);
  const ClrDensity g(b, random_theta(b.dim(), rng, 0.7), false);
  const auto edges = linspace(0.0, 1.0, 41);
  const double l2 = gauss_composite(
      [&](double x) { return f.clr_value(x) * g.clr_value(x); }, edges, 8);
  // Aitchison inner product: 1/2 of the double integral of log-ratios.
  const double aitchison = 0.5 * gauss_composite([&](double x) {
    return gauss_composite([&](double y) {
      return std::log(f.pdf(x) / f.pdf(y)) * std::log(g.pdf(x) / g.pdf(y));
    }, edges, 8);
  }, edges, 8);
  CHECK(std::abs(l2 - aitchison) <= 1e-4);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "errors.hpp"
#include "numerics.hpp"
#include "splinebasis.hpp"

using namespace evcop;

namespace {

// Composite Gauss with many nodes per knot interval, independent of the
// basis' own quadrature order.
double fine_integral(const ZBasis& b, const std::function<double(double)>& f) {
  return gauss_composite(f, b.breakpoints(), 24);
}

}  // namespace

TEST_CASE("basis dimension") {
  CHECK(ZBasis(uniform_knots(10, 3)).dim() == 13);
  CHECK(ZBasis(KnotConfig{{}, 1}).dim() == 1);
  CHECK_THROWS_AS(ZBasis(KnotConfig{{0.5, 0.3}, 3}), InputError);
  CHECK_THROWS_AS(ZBasis(KnotConfig{{0.5}, 0}), InputError);
}

TEST_CASE("orthonormal and zero integral") {
  for (const auto& cfg : {uniform_knots(10, 3), KnotConfig{{0.05, 0.2, 0.21, 0.7}, 3},
                          uniform_knots(4, 2), KnotConfig{{}, 1}, KnotConfig{{0.3}, 1}}) {
    ZBasis b(cfg);
    for (int i = 0; i < b.dim(); ++i) {
      CHECK(std::abs(fine_integral(b, [&](double x) { return b.eval(x)(i); })) <= 1e-8);
      for (int j = 0; j < b.dim(); ++j) {
        const double g =
            fine_integral(b, [&](double x) { const Eigen::VectorXd v = b.eval(x); return v(i) * v(j); });
        CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("linear zero-integral polynomial") {
  ZBasis b(KnotConfig{{}, 1});
  for (double x : {0.0, 0.25, 1.0})
    CHECK(std::abs(b.eval(x)(0) - std::sqrt(3.0) * (1.0 - 2.0 * x)) <= 1e-12);
}

TEST_CASE("zero-integral polynomials are reproduced without interior knots") {
  ZBasis b(KnotConfig{{}, 3});
  auto poly = [](double x) { return x * x * x - 2.0 * x * x + 0.5 * x - (0.25 - 2.0 / 3.0 + 0.25); };
  const Eigen::VectorXd c = b.project(poly);
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    worst = std::max(worst, std::abs(b.spline(c, x) - poly(x)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("evaluation and derivatives") {
  ZBasis b(uniform_knots(10, 3));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  Eigen::VectorXd theta(b.dim());
  for (int i = 0; i < b.dim(); ++i) theta(i) = nd(rng);

  CHECK(b.spline(Eigen::VectorXd::Zero(b.dim()), 0.37) == 0.0);
  CHECK_THROWS_AS(b.eval(1.5), InputError);
  CHECK_THROWS_AS(b.eval(-0.1), InputError);

  // Continuity at interior knots, through the second derivative.
  for (double k : b.config().interior) {
    for (int order = 0; order <= 2; ++order) {
      const double left = b.spline(theta, std::nextafter(k, 0.0), order);
      const double right = b.spline(theta, k, order);
      CHECK(std::abs(left - right) <= 1e-10 * std::max(1.0, std::abs(right)) * (order + 1) * 100);
    }
  }

  // Central finite differences at 50 interior points.
  const double h = 1e-5;
  for (int i = 1; i <= 50; ++i) {
    const double x = (i - 0.5) / 50.0;
    const Eigen::VectorXd d1 = b.eval(x, 1), d2 = b.eval(x, 2);
    const Eigen::VectorXd fd1 = (b.eval(x + h) - b.eval(x - h)) / (2 * h);
    const Eigen::VectorXd fd2 = (b.eval(x + h, 1) - b.eval(x - h, 1)) / (2 * h);
    CHECK((d1 - fd1).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, d1.cwiseAbs().maxCoeff()));
    CHECK((d2 - fd2).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, d2.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("curvature matrix") {
  ZBasis b(quantile_knots(std::vector<double>{0.1, 0.15, 0.2, 0.3, 0.45, 0.5, 0.6, 0.8, 0.9, 0.95}, 5));
  const Eigen::MatrixXd omega = curvature_matrix(b);
  CHECK((omega - omega.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(omega);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
  CHECK(Eigen::VectorXd::Zero(b.dim()).dot(omega * Eigen::VectorXd::Zero(b.dim())) == 0.0);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::VectorXd theta(b.dim());
    for (int i = 0; i < b.dim(); ++i) theta(i) = nd(rng);
    const double direct = fine_integral(b, [&](double x) {
      const double p2 = b.spline(theta, x, 2);
      return p2 * p2;
    });
    CHECK(std::abs(theta.dot(omega * theta) - direct) <= 1e-8 * std::max(1.0, direct));
  }
  CHECK(curvature_matrix(ZBasis(KnotConfig{{0.5}, 1})).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("projection center") {
  ZBasis b(uniform_knots(10, 3));
  const Eigen::VectorXd c = project_center(b);

  double worst = 0.0;
  for (int i = 0; i <= 950; ++i) {
    const double x = 0.05 + i * 0.001;
    worst = std::max(worst, std::abs(b.spline(c, x) - clr_uniform_square(x)));
  }
  CHECK(worst < 0.1);

  // Orthogonality of the residual. The reference integral splits the first
  // knot interval far more finely than the production rule.
  std::vector<double> edges{0.0};
  for (int k = 60; k >= 1; --k) edges.push_back(b.breakpoints()[1] * std::ldexp(1.0, -k));
  edges.insert(edges.end(), b.breakpoints().begin() + 1, b.breakpoints().end());
  for (int i = 0; i < b.dim(); ++i) {
    const double r = gauss_composite(
        [&](double x) { return (clr_uniform_square(x) - b.spline(c, x)) * b.eval(x)(i); }, edges, 20);
    CHECK(std::abs(r) <= 1e-6);
  }
  CHECK(std::abs(fine_integral(b, [&](double x) { return b.spline(c, x); })) <= 1e-8);

  // Idempotence: projecting the projected spline returns the same coordinates.
  const Eigen::VectorXd again = b.project([&](double x) { return b.spline(c, x); });
  CHECK((again - c).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("quantile knots") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> sample(1000);
  for (auto& s : sample) s = u(rng);
  const auto cfg = quantile_knots(sample, 10);
  REQUIRE(cfg.interior.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(cfg.interior[i] - (i + 1) / 11.0) <= 0.05);
  CHECK_NOTHROW(cfg.validate());

  std::normal_distribution<double> nd(0.5, 0.01);
  for (auto& s : sample) s = nd(rng);
  for (double k : quantile_knots(sample, 10).interior) CHECK(std::abs(k - 0.5) < 0.05);

  CHECK(quantile_knots(sample, 0).interior.empty());
  CHECK_THROWS_AS(quantile_knots(std::vector<double>(50, 0.3), 5), InputError);
  CHECK_THROWS_AS(quantile_knots(std::vector<double>{0.1, 0.2, 0.3}, 2), InputError);
}

#include "splinebasis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "numerics.hpp"

namespace evcop {

void KnotConfig::validate() const {
  if (degree < 1) throw InputError("KnotConfig: degree must be >= 1");
  for (std::size_t i = 0; i < interior.size(); ++i) {
    const double k = interior[i];
    if (!(k > 0.0 && k < 1.0)) throw InputError("KnotConfig: interior knots must lie in (0,1)");
    if (i > 0 && !(k > interior[i - 1]))
      throw InputError("KnotConfig: interior knots must be strictly increasing");
  }
  if (dim() < 1) throw InputError("KnotConfig: basis would be empty");
}

ZBasis::ZBasis(KnotConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const int d = cfg_.degree;
  knots_.assign(d + 1, 0.0);
  knots_.insert(knots_.end(), cfg_.interior.begin(), cfg_.interior.end());
  knots_.insert(knots_.end(), d + 1, 1.0);
  breaks_.push_back(0.0);
  breaks_.insert(breaks_.end(), cfg_.interior.begin(), cfg_.interior.end());
  breaks_.push_back(1.0);

  const int nb = n_bsplines();
  dim_ = nb - 1;

  // Integral functional of the B-splines and its orthogonal complement.
  Eigen::MatrixXd w(nb, 1);
  for (int j = 0; j < nb; ++j) w(j, 0) = (knots_[j + d + 1] - knots_[j]) / (d + 1);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(w);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(nb, nb);
  const Eigen::MatrixXd null_space = q.rightCols(dim_);

  const Eigen::MatrixXd g = null_space.transpose() * raw_gram(0) * null_space;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (g + g.transpose()));
  if (eig.info() != Eigen::Success) throw NumericalError("ZBasis: Gram eigendecomposition failed");
  transform_.resize(dim_, nb);
  for (int i = 0; i < dim_; ++i) {
    const int col = dim_ - 1 - i;  // descending eigenvalue order
    const double lambda = eig.eigenvalues()(col);
    if (!(lambda > 0.0)) throw NumericalError("ZBasis: singular Gram matrix");
    Eigen::VectorXd row = null_space * eig.eigenvectors().col(col) / std::sqrt(lambda);
    Eigen::Index imax = 0;
    row.cwiseAbs().maxCoeff(&imax);
    if (row(imax) < 0.0) row = -row;
    transform_.row(i) = row.transpose();
  }
}

int ZBasis::find_span(double x) const {
  const int d = cfg_.degree;
  const int nb = n_bsplines();
  if (x >= 1.0) return nb - 1;
  if (x <= 0.0) return d;
  const auto it = std::upper_bound(knots_.begin() + d, knots_.begin() + nb, x);
  return int(it - knots_.begin()) - 1;
}

// Piegl & Tiller, "The NURBS Book", algorithm A2.3.
void ZBasis::basis_derivatives(double x, int span, int n,
                               std::vector<std::vector<double>>& ders) const {
  const int p = cfg_.degree;
  std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1, 0.0));
  std::vector<double> left(p + 1), right(p + 1);
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - knots_[span + 1 - j];
    right[j] = knots_[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  ders.assign(n + 1, std::vector<double>(p + 1, 0.0));
  for (int j = 0; j <= p; ++j) ders[0][j] = ndu[j][p];
  std::vector<std::vector<double>> a(2, std::vector<double>(p + 1, 0.0));
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= n; ++k) {
      double dd = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        dd = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        dd += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        dd += a[s2][k] * ndu[r][pk];
      }
      ders[k][r] = dd;
      std::swap(s1, s2);
    }
  }
  int factor = p;
  for (int k = 1; k <= n; ++k) {
    for (int j = 0; j <= p; ++j) ders[k][j] *= factor;
    factor *= (p - k);
  }
}

Eigen::VectorXd ZBasis::eval_bspline(double x, int deriv_order) const {
  if (!(x >= 0.0 && x <= 1.0)) throw InputError("ZBasis: x outside [0,1]: " + std::to_string(x));
  if (deriv_order < 0 || deriv_order > 2) throw InputError("ZBasis: derivative order must be 0..2");
  const int p = cfg_.degree;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_bsplines());
  if (deriv_order > p) return out;
  const int span = find_span(x);
  std::vector<std::vector<double>> ders;
  basis_derivatives(x, span, deriv_order, ders);
  for (int j = 0; j <= p; ++j) out(span - p + j) = ders[deriv_order][j];
  return out;
}

Eigen::VectorXd ZBasis::eval(double x, int deriv_order) const {
  return transform_ * eval_bspline(x, deriv_order);
}

Eigen::MatrixXd ZBasis::design(std::span<const double> xs, int deriv_order) const {
  Eigen::MatrixXd out(xs.size(), dim_);
  for (std::size_t i = 0; i < xs.size(); ++i) out.row(i) = eval(xs[i], deriv_order).transpose();
  return out;
}

double ZBasis::spline(const Eigen::VectorXd& theta, double x, int deriv_order) const {
  return theta.dot(eval(x, deriv_order));
}

Eigen::MatrixXd ZBasis::raw_gram(int deriv_order) const {
  const int nb = n_bsplines();
  const auto& rule = gauss_legendre(quadrature_order());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nb, nb);
  for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
    const double a = breaks_[k], b = breaks_[k + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const Eigen::VectorXd v = eval_bspline(mid + half * rule.nodes[q], deriv_order);
      g.noalias() += (half * rule.weights[q]) * v * v.transpose();
    }
  }
  return g;
}

Eigen::VectorXd ZBasis::project(const std::function<double(double)>& g,
                                bool log_singular_at_zero) const {
  std::vector<double> edges;
  if (log_singular_at_zero) {
    // 16 geometric pieces of ratio 1/2 inside the first knot interval.
    const double first = breaks_[1];
    edges.push_back(0.0);
    for (int k = 16; k >= 1; --k) edges.push_back(first * std::ldexp(1.0, -k));
    edges.insert(edges.end(), breaks_.begin() + 1, breaks_.end());
  } else {
    edges = breaks_;
  }
  const auto& rule = gauss_legendre(quadrature_order());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double a = edges[k], b = edges[k + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double x = mid + half * rule.nodes[q];
      const double gx = g(x);
      if (!std::isfinite(gx)) throw NumericalError("ZBasis::project: non-finite integrand");
      out.noalias() += (half * rule.weights[q] * gx) * eval(x);
    }
  }
  return out;
}

Eigen::VectorXd ZBasis::integrals() const {
  return project([](double) { return 1.0; });
}

Eigen::MatrixXd ZBasis::gram() const {
  return transform_ * raw_gram(0) * transform_.transpose();
}

Eigen::MatrixXd curvature_matrix(const ZBasis& basis) {
  if (basis.degree() < 2) return Eigen::MatrixXd::Zero(basis.dim(), basis.dim());
  // Build the second-derivative Gram through the public evaluation path.
  const auto& rule = gauss_legendre(basis.quadrature_order());
  const auto& br = basis.breakpoints();
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(basis.dim(), basis.dim());
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    const double mid = 0.5 * (br[k] + br[k + 1]), half = 0.5 * (br[k + 1] - br[k]);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const Eigen::VectorXd v = basis.eval(mid + half * rule.nodes[q], 2);
      omega.noalias() += (half * rule.weights[q]) * v * v.transpose();
    }
  }
  return 0.5 * (omega + omega.transpose());
}

double clr_uniform_square(double x) { return -0.5 * (1.0 + std::log(x)); }

Eigen::VectorXd project_center(const ZBasis& basis) {
  return basis.project(clr_uniform_square, true);
}

KnotConfig quantile_knots(std::span<const double> sample, int n_interior, int degree) {
  if (n_interior < 0) throw InputError("quantile_knots: negative knot count");
  KnotConfig cfg;
  cfg.degree = degree;
  if (n_interior == 0) return cfg;
  if (sample.size() < std::size_t(n_interior) + 2)
    throw InputError("quantile_knots: sample too small for the requested knots");
  std::vector<double> s(sample.begin(), sample.end());
  for (double v : s)
    if (!(v > 0.0 && v < 1.0)) throw InputError("quantile_knots: sample values must lie in (0,1)");
  std::sort(s.begin(), s.end());
  const double n = double(s.size());
  for (int i = 1; i <= n_interior; ++i) {
    const double pos = (n - 1.0) * double(i) / double(n_interior + 1);
    const auto lo = std::size_t(std::floor(pos));
    const auto hi = std::min(lo + 1, s.size() - 1);
    const double q = s[lo] + (pos - double(lo)) * (s[hi] - s[lo]);
    if (cfg.interior.empty() || q > cfg.interior.back()) cfg.interior.push_back(q);
  }
  if (int(cfg.interior.size()) < n_interior)
    throw InputError("quantile_knots: ties collapse the knot set below the requested count");
  return cfg;
}

KnotConfig uniform_knots(int n_interior, int degree) {
  KnotConfig cfg;
  cfg.degree = degree;
  for (int i = 1; i <= n_interior; ++i) cfg.interior.push_back(double(i) / (n_interior + 1));
  return cfg;
}

}  // namespace evcop

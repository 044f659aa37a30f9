#include "locdens/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>

#include "locdens/errors.hpp"
#include "locdens/types.hpp"

namespace locdens {

namespace {

// Golub-Welsch for a symmetric Jacobi matrix with zero diagonal.
Rule1D golub_welsch(int m, const std::function<double(int)>& offdiag, double mass) {
  Mat J = Mat::Zero(m, m);
  for (int k = 1; k < m; ++k) J(k, k - 1) = J(k - 1, k) = offdiag(k);
  Eigen::SelfAdjointEigenSolver<Mat> es(J);
  Rule1D r;
  r.nodes.resize(m);
  r.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    r.weights[i] = mass * v * v;
  }
  // Symmetrize against eigen-solver round-off.
  for (int i = 0; i < m / 2; ++i) {
    const int j = m - 1 - i;
    const double x = 0.5 * (r.nodes[j] - r.nodes[i]);
    const double w = 0.5 * (r.weights[i] + r.weights[j]);
    r.nodes[i] = -x;
    r.nodes[j] = x;
    r.weights[i] = r.weights[j] = w;
  }
  if (m % 2 == 1) r.nodes[m / 2] = 0.0;
  return r;
}

const Rule1D& cached(std::map<int, Rule1D>& cache, std::mutex& mu, int m,
                     const std::function<Rule1D(int)>& make) {
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it == cache.end()) it = cache.emplace(m, make(m)).first;
  return it->second;
}

}  // namespace

Rule1D gauss_legendre(int m, double a, double b) {
  if (m < 1) throw DomainError("quadrature order must be positive");
  static std::map<int, Rule1D> cache;
  static std::mutex mu;
  const Rule1D& ref = cached(cache, mu, m, [](int k) {
    return golub_welsch(k, [](int j) { return j / std::sqrt(4.0 * j * j - 1.0); }, 2.0);
  });
  Rule1D r = ref;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < m; ++i) {
    r.nodes[i] = mid + half * r.nodes[i];
    r.weights[i] *= half;
  }
  return r;
}

Rule1D gauss_hermite(int m) {
  if (m < 1) throw DomainError("quadrature order must be positive");
  static std::map<int, Rule1D> cache;
  static std::mutex mu;
  return cached(cache, mu, m, [](int k) {
    return golub_welsch(k, [](int j) { return std::sqrt(static_cast<double>(j)); }, 1.0);
  });
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                          double* error) {
  double err = 0.0, l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 30, tol, &err, &l1);
  if (error) *error = err;
  if (!std::isfinite(value) || err > 1e3 * tol * std::max(1.0, l1))
    throw NumericError("adaptive quadrature did not converge", err);
  return value;
}

}  // namespace locdens

#include "locdens/hyvarinen.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "locdens/errors.hpp"
#include "locdens/exact_sum.hpp"
#include "locdens/local_moments.hpp"

namespace locdens {

HyvarinenStats hyvarinen_stats(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h) {
  if (!kernel.differentiable())
    throw UnsupportedError("kernel '" + kernel.name() + "' has no analytic derivatives");
  if (data.n() < 1) throw DomainError("empty dataset");
  if (!(h > 0.0)) throw DomainError("bandwidth must be positive");
  const int d = data.d();
  if (x.size() != d || kernel.dimension() != d) throw DomainError("dimension mismatch");
  std::vector<ExactSum> acc(1 + d + d * d);
  std::vector<double> z(d), grad(d), hess(d * d);
  double kv = 0.0;
  for (std::int64_t i = 0; i < data.n(); ++i) {
    const double* xi = data.row(i);
    for (int j = 0; j < d; ++j) z[j] = (xi[j] - x(j)) / h;
    if (kernel.value(z.data()) == 0.0) continue;
    kernel.derivatives(z.data(), &kv, grad.data(), hess.data());
    acc[0].add(kv);
    for (int j = 0; j < d; ++j) {
      acc[1 + j].add(grad[j]);
      for (int k = 0; k < d; ++k) acc[1 + d + j * d + k].add(grad[j] * z[k]);
    }
  }
  const double s = acc[0].value();
  if (!(s > kDegenerateWeight))
    throw DegenerateNeighborhoodError("no observations carry kernel weight at the query point");
  HyvarinenStats st;
  st.q_hat.resize(d);
  st.Q_hat.resize(d, d);
  for (int j = 0; j < d; ++j) {
    st.q_hat(j) = acc[1 + j].value() / s;
    for (int k = 0; k < d; ++k) st.Q_hat(j, k) = acc[1 + d + j * d + k].value() / s;
  }
  return st;
}

Mat sylvester_solve(const Mat& sigma, const Mat& B) {
  const int d = static_cast<int>(sigma.rows());
  if (sigma.cols() != d || B.rows() != d || B.cols() != d) throw DomainError("sylvester_solve: shape mismatch");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (sigma + sigma.transpose()));
  const Vec& lam = es.eigenvalues();
  if (!(lam.minCoeff() > 0.0)) throw DomainError("sylvester_solve: sigma is not positive definite");
  const Mat& V = es.eigenvectors();
  Mat C = V.transpose() * (B + B.transpose()) * V;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) C(i, j) /= lam(i) + lam(j);
  Mat A = V * C * V.transpose();
  return 0.5 * (A + A.transpose());
}

double sylvester_objective(const Mat& sigma, const Mat& B, const Mat& A) {
  return 0.5 * (A * A * sigma).trace() - (A * B).trace();
}

EstimateTriple estimate_h_from_stats(const HyvarinenStats& stats, const LocalMeanCov& lmc, double h) {
  const int d = static_cast<int>(stats.q_hat.size());
  const Mat rhs = -Mat::Identity(d, d) - stats.Q_hat + lmc.mu_hat * stats.q_hat.transpose();
  const Mat A = sylvester_solve(lmc.sigma_hat, rhs);
  const Vec b = -A * lmc.mu_hat - stats.q_hat;
  EstimateTriple e;
  e.scale = Scale::log;
  e.has_value = false;
  e.value = std::numeric_limits<double>::quiet_NaN();
  e.gradient = b / h;
  e.hessian = A / (h * h);
  return e;
}

EstimateTriple estimate_h(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h) {
  const HyvarinenStats st = hyvarinen_stats(data, kernel, x, h);
  const LocalMeanCov lmc = local_mean_cov(moment_triple(data, kernel, x, h));
  return estimate_h_from_stats(st, lmc, h);
}

double hyvarinen_objective(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h, const Vec& b,
                           const Mat& A) {
  const int d = data.d();
  ExactSum acc;
  Vec y(d), z(d);
  const double hd = std::pow(h, -d);
  const double trA = A.trace();
  for (std::int64_t i = 0; i < data.n(); ++i) {
    for (int j = 0; j < d; ++j) {
      y(j) = data.row(i)[j] - x(j);
      z(j) = y(j) / h;
    }
    if (kernel.value(z.data()) == 0.0) continue;
    const KernelDerivatives kd = kernel.derivatives(z);
    const Vec g = b + A * y;
    acc.add(hd * kd.value * (0.5 * g.squaredNorm() + trA) + hd / h * kd.gradient.dot(g));
  }
  return acc.value() / static_cast<double>(data.n());
}

}  // namespace locdens

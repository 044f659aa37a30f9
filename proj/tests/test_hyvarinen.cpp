#include <doctest.h>

#include <cmath>

#include "locdens/errors.hpp"
#include "locdens/hyvarinen.hpp"
#include "locdens/kde.hpp"
#include "locdens/loglik.hpp"
#include "support.hpp"

using namespace locdens;
using namespace locdens::testing;

TEST_CASE("Gaussian Hyvarinen statistics in terms of local mean and covariance") {
  for (int d : {1, 2, 3}) {
    const KernelSpec k = KernelSpec::gaussian(d);
    const Dataset data = normal_data(400, d, 50 + d);
    const Vec x = Vec::Constant(d, 0.2);
    const HyvarinenStats st = hyvarinen_stats(data, k, x, 0.6);
    const LocalMeanCov lmc = local_mean_cov(moment_triple(data, k, x, 0.6));
    CHECK((st.q_hat + lmc.mu_hat).cwiseAbs().maxCoeff() < 1e-12);
    // DK(z) = -K(z) z gives Q = -S / s = -(Sigma + mu mu^T).
    const Mat expect = -(lmc.sigma_hat + lmc.mu_hat * lmc.mu_hat.transpose());
    CHECK((st.Q_hat - expect).cwiseAbs().maxCoeff() < 1e-12);
    const Mat lhs = -Mat::Identity(d, d) - st.Q_hat + lmc.mu_hat * st.q_hat.transpose();
    CHECK((lhs - (lmc.sigma_hat - Mat::Identity(d, d))).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Hyvarinen statistics of a single centered point vanish") {
  RowMat p(1, 2);
  p << 0.4, -0.3;
  const HyvarinenStats st = hyvarinen_stats(Dataset(p), KernelSpec::gaussian(2), p.row(0).transpose(), 0.5);
  CHECK(st.q_hat.isZero(0.0));
  CHECK(st.Q_hat.isZero(0.0));
}

TEST_CASE("Hyvarinen statistics match a direct loop") {
  const KernelSpec k = KernelSpec::triweight(2);
  const Dataset data = normal_data(300, 2, 61);
  Vec x(2);
  x << -0.2, 0.3;
  const double h = 0.9;
  double sw = 0.0;
  Vec q = Vec::Zero(2);
  Mat Q = Mat::Zero(2, 2);
  for (std::int64_t i = 0; i < data.n(); ++i) {
    const Vec z = (Eigen::Map<const Vec>(data.row(i), 2) - x) / h;
    const KernelDerivatives kd = kernel_derivatives(k, z);
    sw += kd.value;
    q += kd.gradient;
    Q += kd.gradient * z.transpose();
  }
  const HyvarinenStats st = hyvarinen_stats(data, k, x, h);
  CHECK((st.q_hat - q / sw).norm() < 1e-12);
  CHECK((st.Q_hat - Q / sw).norm() < 1e-12);
}

TEST_CASE("Sylvester solver special cases") {
  Rng rng(1);
  for (int d : {1, 3, 6}) {
    Mat B(d, d);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) B(j, k) = uniform(rng);
    CHECK((sylvester_solve(Mat::Identity(d, d), B) - 0.5 * (B + B.transpose())).norm() < 1e-14);

    // Commuting symmetric pair: B = polynomial in Sigma.
    const Mat S = random_spd(d, rng);
    const Mat Bs = S * S + 2.0 * S + Mat::Identity(d, d);
    CHECK((sylvester_solve(S, Bs) - S.inverse() * Bs).norm() < 1e-10);
  }
  CHECK_THROWS_AS(sylvester_solve(-Mat::Identity(2, 2), Mat::Identity(2, 2)), DomainError);
}

TEST_CASE("Sylvester solution residual and minimality") {
  Rng rng(2);
  for (int inst = 0; inst < 20; ++inst) {
    const int d = 1 + inst % 10;
    const Mat S = random_spd(d, rng);
    Mat B(d, d);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) B(j, k) = uniform(rng);
    const Mat A = sylvester_solve(S, B);
    CHECK(A == A.transpose());
    CHECK((S * A + A * S - B - B.transpose()).norm() < 1e-10);
    const double best = sylvester_objective(S, B, A);
    for (int t = 0; t < 1000; ++t) CHECK(sylvester_objective(S, B, A + random_sym(d, rng, 0.1)) >= best);
  }
}

TEST_CASE("antisymmetric parts of B are ignored") {
  Rng rng(3);
  const Mat S = random_spd(4, rng);
  const Mat A = random_sym(4, rng);
  Mat N = Mat::Zero(4, 4);
  for (int j = 0; j < 4; ++j)
    for (int k = j + 1; k < 4; ++k) N(j, k) = -(N(k, j) = uniform(rng));
  CHECK((sylvester_solve(S, 0.5 * (S * A + A * S) + N) - A).norm() < 1e-10);
}

TEST_CASE("Gaussian Hyvarinen estimate equals the local likelihood estimate") {
  for (int d : {1, 2, 3}) {
    const KernelSpec k = KernelSpec::gaussian(d);
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Dataset data = normal_data(300, d, 70 + s);
      const Vec x = Vec::Constant(d, -0.1 * static_cast<double>(s));
      const EstimateTriple a = estimate_h(data, k, x, 0.5);
      const EstimateTriple b = solve_l(data, k, x, 0.5);
      CHECK_FALSE(a.has_value);
      CHECK((a.gradient - b.gradient).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((a.hessian - b.hessian).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, b.hessian.norm()));
    }
  }
}

TEST_CASE("Hyvarinen estimate is stationary and optimal for the empirical score") {
  Rng rng(4);
  for (const KernelSpec& k : {KernelSpec::gaussian(2), KernelSpec::triweight(2)}) {
    const Dataset data = normal_data(300, 2, 90);
    Vec x(2);
    x << 0.3, 0.1;
    const double h = 0.8;
    const EstimateTriple e = estimate_h(data, k, x, h);
    const double best = hyvarinen_objective(data, k, x, h, e.gradient, e.hessian);
    const double step = 1e-4;
    for (int j = 0; j < 2; ++j) {
      Vec s = Vec::Zero(2);
      s(j) = step;
      const double g = (hyvarinen_objective(data, k, x, h, e.gradient + s, e.hessian) -
                        hyvarinen_objective(data, k, x, h, e.gradient - s, e.hessian)) /
                       (2 * step);
      CHECK(std::abs(g) < 1e-9);
    }
    for (int a = 0; a < 2; ++a)
      for (int b = a; b < 2; ++b) {
        Mat s = Mat::Zero(2, 2);
        s(a, b) = s(b, a) = step;
        const double g = (hyvarinen_objective(data, k, x, h, e.gradient, e.hessian + s) -
                          hyvarinen_objective(data, k, x, h, e.gradient, e.hessian - s)) /
                         (2 * step);
        CHECK(std::abs(g) < 1e-9);
      }
    int worse = 0;
    for (int t = 0; t < 10000; ++t) {
      const Vec db = random_vec(2, rng, 0.05);
      const Mat dA = random_sym(2, rng, 0.05);
      worse += hyvarinen_objective(data, k, x, h, e.gradient + db, e.hessian + dA) >= best;
    }
    CHECK(worse == 10000);
  }
}

TEST_CASE("duplicating every observation leaves the estimate bit-identical") {
  const KernelSpec k = KernelSpec::gaussian(2);
  const Dataset data = normal_data(200, 2, 5);
  RowMat twice(400, 2);
  twice << data.points(), data.points();
  const Vec x = Vec::Constant(2, 0.25);
  const EstimateTriple a = estimate_h(data, k, x, 0.5);
  const EstimateTriple b = estimate_h(Dataset(twice), k, x, 0.5);
  CHECK(a.gradient == b.gradient);
  CHECK(a.hessian == b.hessian);
}

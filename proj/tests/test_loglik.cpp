#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "locdens/errors.hpp"
#include "locdens/kde.hpp"
#include "locdens/loglik.hpp"
#include "locdens/moment_matching.hpp"
#include "support.hpp"

using namespace locdens;
using namespace locdens::testing;

namespace {

// Theta with lambda_max(A) kept below the limit.
HdsElement random_theta(int d, Rng& rng, double amax) {
  HdsElement t = random_element(d, rng, 0.5);
  Eigen::SelfAdjointEigenSolver<Mat> es(t.A);
  const double top = es.eigenvalues().maxCoeff();
  if (top > amax) t.A -= (top - amax) * Mat::Identity(d, d);
  return t;
}

}  // namespace

TEST_CASE("local mean and covariance") {
  const int d = 2;
  RowMat p(d + 2, d);
  p << 0.0, 0.0, 1.0, 0.2, 0.3, 1.1, -0.7, 0.4;
  const Dataset data(p);
  const KernelSpec k = KernelSpec::gaussian(d);
  const LocalMeanCov lmc = local_mean_cov(moment_triple(data, k, Vec::Zero(d), 1.0));
  CHECK(Eigen::SelfAdjointEigenSolver<Mat>(lmc.sigma_hat).eigenvalues().minCoeff() > 0.0);

  // Direct weighted mean and covariance of z_i = (X_i - x) / h.
  const Dataset big = normal_data(250, d, 3);
  Vec x(2);
  x << 0.2, -0.1;
  const double h = 0.8;
  double sw = 0.0;
  Vec m = Vec::Zero(d);
  for (std::int64_t i = 0; i < big.n(); ++i) {
    const Vec z = (Eigen::Map<const Vec>(big.row(i), d) - x) / h;
    sw += k(z);
    m += k(z) * z;
  }
  m /= sw;
  Mat c = Mat::Zero(d, d);
  for (std::int64_t i = 0; i < big.n(); ++i) {
    const Vec z = (Eigen::Map<const Vec>(big.row(i), d) - x) / h;
    c += k(z) * (z - m) * (z - m).transpose();
  }
  c /= sw;
  const LocalMeanCov got = local_mean_cov(moment_triple(big, k, x, h));
  CHECK((got.mu_hat - m).norm() < 1e-12);
  CHECK((got.sigma_hat - c).norm() < 1e-12);
}

TEST_CASE("two symmetric points give a singular covariance") {
  RowMat p(2, 2);
  p << 0.5, 0.25, -0.5, -0.25;
  const Dataset data(p);
  const MomentTriple t = moment_triple(data, KernelSpec::gaussian(2), Vec::Zero(2), 0.5);
  CHECK_THROWS_AS(local_mean_cov(t), SingularCovarianceError);
  CHECK_THROWS_AS(solve_l(data, KernelSpec::gaussian(2), Vec::Zero(2), 0.5), SingularCovarianceError);
  Vec v(2);
  v << 0.5, 0.25;
  try {
    local_mean_cov(t);
  } catch (const SingularCovarianceError& e) {
    CHECK(std::abs(e.min_eigenvalue()) < 1e-12);
  }
  RowMat one(1, 1);
  one << 0.0;
  const MomentTriple t1 = moment_triple(Dataset(one), KernelSpec::gaussian(1), Vec::Constant(1, 0.2), 0.5);
  CHECK_THROWS_AS(local_mean_cov(t1), SingularCovarianceError);
}

TEST_CASE("score at infeasible curvature is infinite") {
  const KernelSpec k = KernelSpec::gaussian(2);
  const Dataset data = normal_data(50, 2, 2);
  const double h = 0.5;
  const HdsElement theta(0.1, Vec::Zero(2), (1.0 / (h * h)) * Mat::Identity(2, 2));
  CHECK(std::isinf(score_l(theta, Vec::Zero(2), data, k, h)));
  HdsElement inside = theta;
  inside.A *= 0.99;
  CHECK(std::isfinite(score_l(inside, Vec::Zero(2), data, k, h)));
}

TEST_CASE("score along constants is minimized at log s") {
  const KernelSpec k = KernelSpec::gaussian(2);
  const Dataset data = normal_data(200, 2, 4);
  const Vec x = Vec::Zero(2);
  const double h = 0.6;
  const double s = moment_triple(data, k, x, h).c;
  auto score = [&](double c) { return score_l(HdsElement(c, Vec::Zero(2), Mat::Zero(2, 2)), x, data, k, h); };
  CHECK(score(std::log(s)) == doctest::Approx(-s * std::log(s) + s).epsilon(1e-12));
  CHECK(score(std::log(s)) < score(std::log(s) + 0.05));
  CHECK(score(std::log(s)) < score(std::log(s) - 0.05));
}

TEST_CASE("Gaussian tilted mass closed form against quadrature") {
  Rng rng(6);
  for (int d : {1, 2}) {
    const KernelSpec k = KernelSpec::gaussian(d);
    for (int t = 0; t < 25; ++t) {
      const HdsElement th = random_theta(d, rng, 0.4);
      CHECK(tilted_mass(th, k) == doctest::Approx(f_map_quadrature(th, k).c).epsilon(1e-8));
    }
  }
}

TEST_CASE("moment map at constants") {
  for (const KernelSpec& k : {KernelSpec::gaussian(2), KernelSpec::triweight(2)}) {
    const HdsElement F = f_map(ThetaPoint(HdsElement(0.4, Vec::Zero(2), Mat::Zero(2, 2)), k), k);
    const double e = std::exp(0.4);
    CHECK(max_abs_diff(F, HdsElement(e, Vec::Zero(2), e * Mat::Identity(2, 2))) < 1e-8);
  }
  CHECK_THROWS_AS(ThetaPoint(HdsElement(0.0, Vec::Zero(1), Mat::Constant(1, 1, 1.5)), KernelSpec::gaussian(1)),
                  DomainError);
}

TEST_CASE("Gaussian moment map against quadrature") {
  Rng rng(7);
  const KernelSpec k = KernelSpec::gaussian(2);
  for (int t = 0; t < 50; ++t) {
    const HdsElement th = random_theta(2, rng, 0.4);
    const HdsElement a = f_map(ThetaPoint(th, k), k);
    const HdsElement b = f_map_quadrature(th, k);
    CHECK(max_abs_diff(a, b) < 1e-8 * std::max(1.0, b.max_abs()));
  }
}

TEST_CASE("Jacobian of the moment map") {
  Rng rng(8);
  for (const KernelSpec& k : {KernelSpec::gaussian(2), KernelSpec::triweight(2)}) {
    const MatchingPolynomials poly(k);
    for (int t = 0; t < 5; ++t) {
      const HdsElement delta = random_element(2, rng);
      const double c = uniform(rng);
      const ThetaPoint at_c(HdsElement(c, Vec::Zero(2), Mat::Zero(2, 2)), k);
      CHECK(max_abs_diff(df_map(at_c, k, delta), std::exp(c) * poly.apply_J(delta)) < 1e-8);

      const HdsElement th = random_theta(2, rng, 0.4);
      const ThetaPoint tp(th, k);
      const HdsElement lin = df_map(tp, k, delta);
      const double step = 1e-6;
      const HdsElement fd = (1.0 / (2 * step)) * (f_map(ThetaPoint(th + step * delta, k), k) -
                                                  f_map(ThetaPoint(th - step * delta, k), k));
      CHECK(max_abs_diff(fd, lin) < 1e-5 * std::max(1.0, lin.max_abs()));
      CHECK(delta.inner(lin) > 0.0);
      if (k.family() == KernelFamily::gaussian)
        CHECK(max_abs_diff(lin, df_map_quadrature(th, k, delta)) < 1e-8 * std::max(1.0, lin.max_abs()));
    }
  }
}

TEST_CASE("Newton and the Gaussian closed form agree") {
  for (int d : {1, 2, 3}) {
    const KernelSpec k = KernelSpec::gaussian(d);
    for (std::uint64_t s = 0; s < 100; ++s) {
      const Dataset data = normal_data(400, d, 1000 + s);
      const Vec x = Vec::Constant(d, 0.3);
      NewtonOptions opts;
      opts.force_newton = true;
      SolveInfo info;
      const EstimateTriple nw = solve_l(data, k, x, 0.7, opts, &info);
      const EstimateTriple cf = solve_l(data, k, x, 0.7);
      CHECK_FALSE(info.closed_form);
      CHECK(std::abs(nw.value - cf.value) < 1e-8);
      CHECK((nw.gradient - cf.gradient).cwiseAbs().maxCoeff() < 1e-8);
      CHECK((nw.hessian - cf.hessian).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("closed form in terms of local mean and covariance") {
  const KernelSpec k = KernelSpec::gaussian(2);
  const Dataset data = normal_data(300, 2, 11);
  const Vec x = Vec::Constant(2, -0.4);
  const double h = 0.5;
  const MomentTriple t = moment_triple(data, k, x, h);
  const LocalMeanCov lmc = local_mean_cov(t);
  const Mat P = lmc.sigma_hat.inverse();
  const EstimateTriple e = solve_l(data, k, x, h);
  CHECK(e.value == doctest::Approx(std::log(t.c) - 0.5 * lmc.mu_hat.dot(P * lmc.mu_hat) -
                                   0.5 * std::log(lmc.sigma_hat.determinant()))
                       .epsilon(1e-12));
  CHECK((e.gradient - P * lmc.mu_hat / h).norm() < 1e-12);
  CHECK((e.hessian - (Mat::Identity(2, 2) - P) / (h * h)).norm() < 1e-10);
}

TEST_CASE("Newton inverts the moment map exactly") {
  Rng rng(9);
  for (const KernelSpec& k : {KernelSpec::triweight(2), KernelSpec::gaussian(2)}) {
    for (int t = 0; t < 5; ++t) {
      const HdsElement th = random_theta(2, rng, 0.3);
      const HdsElement F = f_map(ThetaPoint(th, k), k);
      NewtonOptions opts;
      opts.force_newton = true;
      SolveInfo info;
      const double h = 0.5;
      const EstimateTriple e = solve_l_from_triple(F, k, h, opts, &info);
      CHECK(max_abs_diff(info.theta, th) < 1e-10);
      CHECK(e.value == doctest::Approx(th.c).epsilon(1e-10));
      CHECK((e.gradient * h - th.b).norm() < 1e-10);
      CHECK(info.residual < 1e-10);
      CHECK(max_abs_diff(f_map(ThetaPoint(info.theta, k), k), F) < 1e-10 * std::max(1.0, F.max_abs()));
    }
  }
}

TEST_CASE("score is convex along segments") {
  Rng rng(10);
  const KernelSpec k = KernelSpec::gaussian(2);
  const Dataset data = normal_data(200, 2, 13);
  const Vec x = Vec::Zero(2);
  const double h = 0.5;
  for (int t = 0; t < 50; ++t) {
    HdsElement a = random_theta(2, rng, 0.5), b = random_theta(2, rng, 0.5);
    a.A /= h * h;
    b.A /= h * h;
    const double sa = score_l(a, x, data, k, h), sb = score_l(b, x, data, k, h);
    const double sm = score_l(0.5 * (a + b), x, data, k, h);
    CHECK(sm <= 0.5 * (sa + sb) + 1e-12);
  }
}

TEST_CASE("rescaled weights shift only the value") {
  const KernelSpec k = KernelSpec::gaussian(2);
  const Dataset data = normal_data(300, 2, 15);
  const MomentTriple t = moment_triple(data, k, Vec::Zero(2), 0.5);
  const EstimateTriple a = gaussian_closed_form_l(t, 0.5);
  const EstimateTriple b = gaussian_closed_form_l(3.0 * t, 0.5);
  CHECK(b.value - a.value == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK((a.gradient - b.gradient).norm() < 1e-12);
  CHECK((a.hessian - b.hessian).norm() < 1e-10);
}

TEST_CASE("triple outside the range of the moment map") {
  // Second moment beyond the squared support radius (9) cannot be matched.
  const KernelSpec k = KernelSpec::triweight(1);
  const HdsElement t(1.0, Vec::Zero(1), Mat::Constant(1, 1, 10.0));
  CHECK_THROWS_AS(solve_l_from_triple(t, k, 1.0), Error);
}

TEST_CASE("density to log-density") {
  const int d = 2;
  const double f0 = 1.0 / (2 * std::numbers::pi);
  EstimateTriple e;
  e.value = f0;
  e.gradient = Vec::Zero(d);
  e.hessian = -f0 * Mat::Identity(d, d);
  const EstimateTriple l = density_to_logdensity(e);
  CHECK(l.scale == Scale::log);
  CHECK(l.value == doctest::Approx(-std::log(2 * std::numbers::pi)));
  CHECK(l.gradient.isZero(0.0));
  CHECK((l.hessian + Mat::Identity(d, d)).norm() < 1e-15);

  Rng rng(12);
  EstimateTriple g;
  g.value = 0.37;
  g.gradient = random_vec(d, rng);
  g.hessian = random_sym(d, rng);
  const EstimateTriple back = logdensity_to_density(density_to_logdensity(g));
  CHECK(back.value == doctest::Approx(g.value).epsilon(1e-12));
  CHECK((back.gradient - g.gradient).norm() < 1e-12);
  CHECK((back.hessian - g.hessian).norm() < 1e-12);

  g.value = -0.1;
  CHECK_THROWS_AS(density_to_logdensity(g), NonpositiveDensityError);
}

TEST_CASE("log-scale KDE derivatives match finite differences of log f") {
  const KernelSpec k = KernelSpec::gaussian(2);
  const Dataset data = normal_data(300, 2, 14);
  const double h = 0.5, step = 1e-5;
  for (double a : {-1.0, 0.0, 0.8}) {
    Vec x(2);
    x << a, 0.5 * a + 0.2;
    const EstimateTriple l = density_to_logdensity(estimate_k(data, k, x, h));
    for (int j = 0; j < 2; ++j) {
      Vec s = Vec::Zero(2);
      s(j) = step;
      const EstimateTriple p = density_to_logdensity(estimate_k(data, k, x + s, h));
      const EstimateTriple m = density_to_logdensity(estimate_k(data, k, x - s, h));
      CHECK(std::abs((p.value - m.value) / (2 * step) - l.gradient(j)) < 1e-6);
      CHECK(((p.gradient - m.gradient) / (2 * step) - l.hessian.col(j)).norm() < 1e-5);
    }
  }
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "locdens/errors.hpp"
#include "locdens/local_moments.hpp"
#include "support.hpp"

using namespace locdens;
using namespace locdens::testing;

namespace {

Dataset single_point(const Vec& x) {
  RowMat p(1, x.size());
  p.row(0) = x.transpose();
  return Dataset(p);
}

}  // namespace

TEST_CASE("single observation at the query point") {
  const KernelSpec k = KernelSpec::gaussian(2);
  Vec x(2);
  x << 0.3, -1.2;
  const Dataset data = single_point(x);
  for (double h : {0.1, 0.5, 2.0}) {
    CHECK(local_moment(data, k, x, h, {0, 0}) == doctest::Approx(std::pow(h, -2) / (2 * std::numbers::pi)));
    CHECK(local_moment(data, k, x, h, {1, 0}) == 0.0);
    const MomentTriple t = moment_triple(data, k, x, h);
    CHECK(t.c == doctest::Approx(std::pow(h, -2) / (2 * std::numbers::pi)));
    CHECK(t.b.isZero(0.0));
    CHECK(t.A.isZero(0.0));
  }
}

TEST_CASE("local moment matches a naive loop") {
  const KernelSpec k = KernelSpec::gaussian(2);
  const Dataset data = normal_data(100, 2, 42);
  Vec x(2);
  x << 0.2, -0.1;
  for (const MultiIndex& a : {MultiIndex{2, 0}, MultiIndex{1, 1}, MultiIndex{0, 3}, MultiIndex{2, 2}}) {
    const double v = local_moment(data, k, x, 0.5, a);
    CHECK(std::abs(v - naive_local_moment(data, k, x, 0.5, a)) < 1e-12 * std::max(1.0, std::abs(v)));
  }
  CHECK_THROWS_AS(local_moment(data, k, x, 0.5, {3, 2}), DomainError);
}

TEST_CASE("moment triple agrees with per-index local moments") {
  const KernelSpec k = KernelSpec::gaussian(2);
  const Dataset data = normal_data(500, 2, 9);
  const Vec x = Vec::Zero(2);
  const MomentTriple t = moment_triple(data, k, x, 0.3);
  CHECK(std::abs(t.c - local_moment(data, k, x, 0.3, {0, 0})) < 1e-12);
  CHECK(std::abs(t.b(0) - local_moment(data, k, x, 0.3, {1, 0})) < 1e-12);
  CHECK(std::abs(t.b(1) - local_moment(data, k, x, 0.3, {0, 1})) < 1e-12);
  CHECK(std::abs(t.A(0, 0) - local_moment(data, k, x, 0.3, {2, 0})) < 1e-12);
  CHECK(std::abs(t.A(0, 1) - local_moment(data, k, x, 0.3, {1, 1})) < 1e-12);
  CHECK(std::abs(t.A(1, 1) - local_moment(data, k, x, 0.3, {0, 2})) < 1e-12);
  CHECK(t.A(0, 1) == t.A(1, 0));
}

TEST_CASE("row permutation leaves the moment triple bit-identical") {
  const KernelSpec k = KernelSpec::triweight(3);
  const Dataset data = normal_data(2000, 3, 5);
  RowMat shuffled = data.points();
  std::vector<int> idx(static_cast<std::size_t>(shuffled.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 g(1);
  std::shuffle(idx.begin(), idx.end(), g);
  for (std::size_t i = 0; i < idx.size(); ++i) shuffled.row(static_cast<Eigen::Index>(i)) = data.points().row(idx[i]);
  const Vec x = Vec::Constant(3, 0.1);
  const MomentTriple a = moment_triple(data, k, x, 0.8);
  const MomentTriple b = moment_triple(Dataset(shuffled), k, x, 0.8);
  CHECK(a.c == b.c);
  CHECK(a.b == b.b);
  CHECK(a.A == b.A);
}

TEST_CASE("translation equivariance and positivity") {
  const KernelSpec k = KernelSpec::gaussian(2);
  const Dataset data = normal_data(300, 2, 77);
  Vec v(2);
  v << 3.5, -2.25;
  RowMat moved = data.points();
  moved.rowwise() += v.transpose();
  Vec x(2);
  x << 0.4, 0.1;
  const MomentTriple a = moment_triple(data, k, x, 0.4);
  const MomentTriple b = moment_triple(Dataset(moved), k, x + v, 0.4);
  CHECK(max_abs_diff(a, b) < 1e-12);
  CHECK(a.c > 0.0);
  CHECK(Eigen::SelfAdjointEigenSolver<Mat>(a.A).eigenvalues().minCoeff() >= 0.0);
}

TEST_CASE("empty dataset is rejected") {
  CHECK_THROWS_AS(Dataset(RowMat(0, 2)), DomainError);
  CHECK_THROWS_AS(moment_triple(normal_data(10, 2, 1), KernelSpec::gaussian(2), Vec::Zero(2), 0.0), DomainError);
}

TEST_CASE("expected triple of a normal density has a closed form") {
  // integral phi(z) (1, z^2) phi(h z) dz = (2 pi (1 + h^2))^{-1/2} (1, (1 + h^2)^{-1}).
  const TestDensity f = TestDensity::standard_normal(1);
  const KernelSpec k = KernelSpec::gaussian(1);
  for (double h : {1.0, 0.3, 1e-3}) {
    const MomentTriple t = expected_moment_triple(f, k, Vec::Zero(1), h);
    const double s = 1.0 / std::sqrt(2 * std::numbers::pi * (1 + h * h));
    CHECK(t.c == doctest::Approx(s).epsilon(1e-12));
    CHECK(std::abs(t.b(0)) < 1e-15);
    CHECK(t.A(0, 0) == doctest::Approx(s / (1 + h * h)).epsilon(1e-12));
  }
}

TEST_CASE("expected triple of a locally constant density") {
  const DensityFn box = [](const Vec& y) { return (y.cwiseAbs().maxCoeff() <= 10.0) ? 1.0 / 400.0 : 0.0; };
  const MomentTriple t = expected_moment_triple(box, KernelSpec::gaussian(2), Vec::Zero(2), 0.1);
  CHECK(std::abs(t.c - 1.0 / 400.0) < 1e-9);
  CHECK(t.b.norm() < 1e-9);
  CHECK((t.A - Mat::Identity(2, 2) / 400.0).norm() < 1e-9);
}

TEST_CASE("expected triple of a mixture matches Monte Carlo") {
  Mat c2(2, 2);
  c2 << 0.5, 0.1, 0.1, 0.3;
  const TestDensity f = TestDensity::mixture({0.7, 0.3}, {Vec::Zero(2), Vec::Constant(2, 1.0)},
                                             {Mat::Identity(2, 2), c2});
  const KernelSpec k = KernelSpec::gaussian(2);
  Vec x(2);
  x << 0.5, 0.4;
  const double h = 0.2;
  const MomentTriple e = expected_moment_triple(f, k, x, h);

  // One large sample: its moment triple is an average of i.i.d. terms.
  const Dataset data = sample_data(f, 1'000'000, 123);
  const MomentTriple m = moment_triple(data, k, x, h);
  std::vector<double> c(static_cast<std::size_t>(data.n())), b0(c.size()), a01(c.size());
  for (std::int64_t i = 0; i < data.n(); ++i) {
    const Vec z = (Eigen::Map<const Vec>(data.row(i), 2) - x) / h;
    const double w = k(z) / (h * h);
    c[i] = w;
    b0[i] = w * z(0);
    a01[i] = w * z(0) * z(1);
  }
  const double n = static_cast<double>(data.n());
  CHECK(std::abs(m.c - e.c) < 3 * std::sqrt(sample_variance(c) / n));
  CHECK(std::abs(m.b(0) - e.b(0)) < 3 * std::sqrt(sample_variance(b0) / n));
  CHECK(std::abs(m.A(0, 1) - e.A(0, 1)) < 3 * std::sqrt(sample_variance(a01) / n));
}

TEST_CASE("Mueller moments") {
  const KernelSpec k = KernelSpec::gaussian(2);
  const Dataset data = normal_data(400, 2, 8);
  Vec x(2);
  x << 0.1, 0.2;
  const double h = 0.5;
  const double s0 = local_moment(data, k, x, h, {0, 0});
  CHECK(mueller_moment(data, k, x, h, {1, 0}) == local_moment(data, k, x, h, {1, 0}) / s0 / h);
  CHECK(mueller_moment(data, k, x, h, {2, 0}) == local_moment(data, k, x, h, {2, 0}) / s0);
  CHECK(mueller_moment(data, k, x, h, {1, 1}) == local_moment(data, k, x, h, {1, 1}) / s0 / (h * h));

  const Dataset big = normal_data(200'000, 2, 3);
  CHECK(mueller_moment(big, k, Vec::Zero(2), 0.1, {2, 0}) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::abs(mueller_moment(big, k, Vec::Zero(2), 0.3, {1, 0})) < 0.1);

  const Dataset far = normal_data(50, 2, 1);
  CHECK_THROWS_AS(mueller_moment(far, KernelSpec::triweight(2), Vec::Constant(2, 50.0), 0.5, {2, 0}),
                  DegenerateNeighborhoodError);
}

#include "locdens/local_moments.hpp"

#include <cmath>
#include <vector>

#include "locdens/errors.hpp"
#include "locdens/exact_sum.hpp"

namespace locdens {

namespace {

void check_query(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h) {
  if (data.n() < 1) throw DomainError("empty dataset");
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("bandwidth must be positive");
  if (x.size() != data.d() || kernel.dimension() != data.d())
    throw DomainError("query point, data and kernel dimensions disagree");
  if (!x.allFinite()) throw DomainError("query point must be finite");
}

double scale_factor(const Dataset& data, double h) {
  return std::pow(h, -data.d()) / static_cast<double>(data.n());
}

}  // namespace

double local_moment(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h,
                    const MultiIndex& alpha) {
  check_query(data, kernel, x, h);
  if (static_cast<int>(alpha.size()) != data.d()) throw DomainError("multi-index has wrong dimension");
  if (order(alpha) > 4) throw DomainError("local moments are available up to order 4");
  const int d = data.d();
  ExactSum acc;
  std::vector<double> z(d);
  for (std::int64_t i = 0; i < data.n(); ++i) {
    const double* xi = data.row(i);
    for (int j = 0; j < d; ++j) z[j] = (xi[j] - x(j)) / h;
    const double k = kernel.value(z.data());
    if (k == 0.0) continue;
    double m = k;
    for (int j = 0; j < d; ++j)
      for (int r = 0; r < alpha[j]; ++r) m *= z[j];
    acc.add(m);
  }
  return acc.value() * scale_factor(data, h);
}

LocalMomentData local_moment_data(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h) {
  check_query(data, kernel, x, h);
  const int d = data.d();
  // Accumulators: s, sfrak_j, S_jk (j <= k), t_j.
  const int nS = d * (d + 1) / 2;
  std::vector<ExactSum> acc(1 + d + nS + d);
  std::vector<double> z(d);
  double max_w = 0.0;
  for (std::int64_t i = 0; i < data.n(); ++i) {
    const double* xi = data.row(i);
    double r2 = 0.0;
    for (int j = 0; j < d; ++j) {
      z[j] = (xi[j] - x(j)) / h;
      r2 += z[j] * z[j];
    }
    const double k = kernel.value(z.data());
    if (k == 0.0) continue;
    max_w = std::max(max_w, k);
    acc[0].add(k);
    int p = 1 + d;
    for (int j = 0; j < d; ++j) {
      const double kz = k * z[j];
      acc[1 + j].add(kz);
      for (int l = j; l < d; ++l) acc[p++].add(kz * z[l]);
      acc[1 + d + nS + j].add(kz * r2);
    }
  }
  const double sc = scale_factor(data, h);
  LocalMomentData out;
  Vec b(d), t(d);
  Mat S(d, d);
  int p = 1 + d;
  for (int j = 0; j < d; ++j) {
    b(j) = acc[1 + j].value() * sc;
    t(j) = acc[1 + d + nS + j].value() * sc;
    for (int l = j; l < d; ++l) S(j, l) = acc[p++].value() * sc;
  }
  out.triple = MomentTriple(acc[0].value() * sc, b, S);
  out.cubic = t;
  out.max_weight = max_w;
  return out;
}

MomentTriple moment_triple(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h) {
  return local_moment_data(data, kernel, x, h).triple;
}

MomentTriple expected_moment_triple(const DensityFn& f, const KernelSpec& kernel, const Vec& x, double h,
                                    double tol) {
  const int d = kernel.dimension();
  if (!(h > 0.0)) throw DomainError("bandwidth must be positive");
  if (x.size() != d) throw DomainError("query point has wrong dimension");
  const int size = HdsElement::flat_size(d);
  const Vec v = kernel.integrate(
      [&](const Vec& z, double, Eigen::Ref<Vec> out) {
        const double fz = f(x + h * z);
        out(0) = fz;
        for (int j = 0; j < d; ++j) {
          out(1 + j) = fz * z(j);
          out(1 + d + j) = fz * z(j) * z(j);
        }
        int p = 1 + 2 * d;
        for (int j = 0; j < d; ++j)
          for (int k = j + 1; k < d; ++k) out(p++) = fz * z(j) * z(k);
      },
      size, tol);
  return HdsElement::unflatten(v, d);
}

MomentTriple expected_moment_triple(const TestDensity& f, const KernelSpec& kernel, const Vec& x, double h) {
  return expected_moment_triple([&f](const Vec& y) { return f.pdf(y); }, kernel, x, h);
}

LocalMomentData expected_local_moment_data(const TestDensity& f, const KernelSpec& kernel, const Vec& x,
                                           double h) {
  const int d = kernel.dimension();
  const int size = HdsElement::flat_size(d);
  const Vec v = kernel.integrate(
      [&](const Vec& z, double, Eigen::Ref<Vec> out) {
        const double fz = f.pdf(x + h * z);
        const double r2 = z.squaredNorm();
        out(0) = fz;
        for (int j = 0; j < d; ++j) {
          out(1 + j) = fz * z(j);
          out(1 + d + j) = fz * z(j) * z(j);
          out(size + j) = fz * r2 * z(j);
        }
        int p = 1 + 2 * d;
        for (int j = 0; j < d; ++j)
          for (int k = j + 1; k < d; ++k) out(p++) = fz * z(j) * z(k);
      },
      size + d, 1e-12);
  LocalMomentData out;
  out.triple = HdsElement::unflatten(v.head(size), d);
  out.cubic = v.tail(d);
  out.max_weight = kernel.sup_value();
  return out;
}

double mueller_moment(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h,
                      const MultiIndex& alpha) {
  const MultiIndex zero(data.d(), 0);
  const double s0 = local_moment(data, kernel, x, h, zero);
  if (!(s0 > kDegenerateWeight))
    throw DegenerateNeighborhoodError("no observations carry kernel weight at the query point");
  int odd = 0;
  for (int a : alpha) odd += a % 2;
  return std::pow(h, -odd) * local_moment(data, kernel, x, h, alpha) / s0;
}

}  // namespace locdens

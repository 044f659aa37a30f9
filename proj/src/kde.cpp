#include "locdens/kde.hpp"

#include <cmath>
#include <vector>

#include "locdens/errors.hpp"
#include "locdens/exact_sum.hpp"

namespace locdens {

KernelDerivatives kernel_derivatives(const KernelSpec& kernel, const Vec& z) {
  if (!kernel.differentiable())
    throw UnsupportedError("kernel '" + kernel.name() + "' has no analytic derivatives");
  return kernel.derivatives(z);
}

EstimateTriple estimate_k(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h) {
  if (!kernel.differentiable())
    throw UnsupportedError("kernel '" + kernel.name() + "' has no analytic derivatives");
  if (data.n() < 1) throw DomainError("empty dataset");
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("bandwidth must be positive");
  const int d = data.d();
  if (x.size() != d || kernel.dimension() != d) throw DomainError("dimension mismatch");
  const int nH = d * (d + 1) / 2;
  std::vector<ExactSum> acc(1 + d + nH);
  std::vector<double> z(d), grad(d), hess(d * d);
  double k = 0.0;
  for (std::int64_t i = 0; i < data.n(); ++i) {
    const double* xi = data.row(i);
    for (int j = 0; j < d; ++j) z[j] = (xi[j] - x(j)) / h;
    if (kernel.value(z.data()) == 0.0) continue;
    kernel.derivatives(z.data(), &k, grad.data(), hess.data());
    acc[0].add(k);
    int p = 1 + d;
    for (int j = 0; j < d; ++j) {
      acc[1 + j].add(grad[j]);
      for (int l = j; l < d; ++l) acc[p++].add(hess[j * d + l]);
    }
  }
  const double sc = std::pow(h, -d) / static_cast<double>(data.n());
  EstimateTriple e;
  e.scale = Scale::density;
  e.value = acc[0].value() * sc;
  e.gradient.resize(d);
  e.hessian.resize(d, d);
  int p = 1 + d;
  for (int j = 0; j < d; ++j) {
    e.gradient(j) = -acc[1 + j].value() * sc / h;
    for (int l = j; l < d; ++l) e.hessian(j, l) = e.hessian(l, j) = acc[p++].value() * sc / (h * h);
  }
  return e;
}

}  // namespace locdens

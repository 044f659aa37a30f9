#include "locdens/moment_matching.hpp"

#include <cmath>
#include <vector>

#include "locdens/errors.hpp"
#include "locdens/exact_sum.hpp"

namespace locdens {

namespace {

constexpr double kStandardTol = 1e-6;

}  // namespace

MatchingPolynomials::MatchingPolynomials(const KernelSpec& kernel, bool refined)
    : d_(kernel.dimension()), refined_(refined) {
  const double mu0 = kernel.special_moment({});
  const double mu2 = kernel.special_moment({2});
  if (std::abs(mu0 - 1.0) > kStandardTol || std::abs(mu2 - 1.0) > kStandardTol)
    throw DomainError("moment matching needs a kernel with unit mass and unit variance");
  mu4_ = kernel.special_moment({4});
  // mu22 never enters when d = 1; 1 keeps the general formulas valid.
  mu22_ = d_ > 1 ? kernel.special_moment({2, 2}) : 1.0;
  eta_ = mu4_ + (d_ - 1) * mu22_ - d_;
  if (!(eta_ > 0.0)) throw DomainError("kernel has eta <= 0");
  M_ = Mat::Constant(d_, d_, mu22_);
  M_.diagonal().setConstant(0.5 * (mu4_ - mu22_));
  if (!((M_.array() > 0.0).all())) throw DomainError("kernel has nonpositive M entries");
  if (refined_) {
    if (!kernel.is_spherical()) throw UnsupportedError("refined gradient weights need a spherical kernel");
    const auto [r4, r6] = kernel.radial_moments();
    const double denom = r6 - r4 * r4 / d_;
    if (!(denom > 0.0)) throw DomainError("kernel has E R^6 - (E R^4)^2 / d <= 0");
    b_ = r4 / denom;
    a_ = 1.0 + b_ * r4 / d_;
  }
}

HdsElement MatchingPolynomials::apply_J(const HdsElement& v) const {
  if (v.dim() != d_) throw DomainError("apply_J: dimension mismatch");
  const double tr = v.A.trace();
  Mat A = v.A.cwiseProduct(M_);
  A.diagonal().array() += v.c + 0.5 * mu22_ * tr;
  return HdsElement(v.c + 0.5 * tr, v.b, A);
}

HdsElement MatchingPolynomials::invert_J(const HdsElement& v) const {
  if (v.dim() != d_) throw DomainError("invert_J: dimension mismatch");
  Mat A0 = v.A;
  A0.diagonal().array() -= v.c;
  const double t = A0.trace() / eta_;
  Mat A = A0;
  A.diagonal().array() -= (mu22_ - 1.0) * t;
  return HdsElement(v.c - t, v.b, A.cwiseQuotient(M_));
}

HdsElement MatchingPolynomials::weights(const Vec& z) const {
  if (z.size() != d_) throw DomainError("weights: dimension mismatch");
  const double r2 = z.squaredNorm();
  const double q = (r2 - d_) / eta_;
  Mat P(d_, d_);
  for (int j = 0; j < d_; ++j) {
    P(j, j) = 2.0 / (mu4_ - mu22_) * (z(j) * z(j) - 1.0 - (mu22_ - 1.0) * q);
    for (int k = j + 1; k < d_; ++k) P(j, k) = P(k, j) = z(j) * z(k) / mu22_;
  }
  const Vec b = refined_ ? Vec((a_ - b_ * r2) * z) : z;
  return HdsElement(1.0 - q, b, P);
}

HdsElement apply_J(const MatchingPolynomials& poly, const HdsElement& v) { return poly.apply_J(v); }
HdsElement invert_J(const MatchingPolynomials& poly, const HdsElement& v) { return poly.invert_J(v); }
HdsElement polynomial_weights(const MatchingPolynomials& poly, const Vec& z) { return poly.weights(z); }

EstimateTriple estimate_m_from_moments(const MatchingPolynomials& poly, const LocalMomentData& m, double h) {
  const HdsElement v = poly.invert_J(m.triple);
  EstimateTriple e;
  e.scale = Scale::density;
  e.value = v.c;
  if (poly.refined()) {
    if (m.cubic.size() != poly.dimension()) throw DomainError("refined weights need cubic moments");
    e.gradient = (poly.a() * m.triple.b - poly.b() * m.cubic) / h;
  } else {
    e.gradient = v.b / h;
  }
  e.hessian = v.A / (h * h);
  if (e.value < 0.0) e.warnings |= warn_negative_density;
  return e;
}

EstimateTriple estimate_m(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h, bool refined) {
  const MatchingPolynomials poly(kernel, refined);
  const LocalMomentData m = local_moment_data(data, kernel, x, h);
  if (!(m.max_weight > kDegenerateWeight))
    throw DegenerateNeighborhoodError("no observations carry kernel weight at the query point");
  return estimate_m_from_moments(poly, m, h);
}

EstimateTriple estimate_m_weighted(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h,
                                   bool refined) {
  const MatchingPolynomials poly(kernel, refined);
  if (data.n() < 1) throw DomainError("empty dataset");
  if (!(h > 0.0)) throw DomainError("bandwidth must be positive");
  const int d = data.d();
  const int size = HdsElement::flat_size(d);
  std::vector<ExactSum> acc(size);
  Vec z(d);
  double max_w = 0.0;
  for (std::int64_t i = 0; i < data.n(); ++i) {
    for (int j = 0; j < d; ++j) z(j) = (data.row(i)[j] - x(j)) / h;
    const double k = kernel.value(z.data());
    if (k == 0.0) continue;
    max_w = std::max(max_w, k);
    const Vec w = poly.weights(z).flatten();
    for (int p = 0; p < size; ++p) acc[p].add(k * w(p));
  }
  if (!(max_w > kDegenerateWeight))
    throw DegenerateNeighborhoodError("no observations carry kernel weight at the query point");
  Vec v(size);
  const double sc = std::pow(h, -d) / static_cast<double>(data.n());
  for (int p = 0; p < size; ++p) v(p) = acc[p].value() * sc;
  const HdsElement t = HdsElement::unflatten(v, d);
  EstimateTriple e;
  e.value = t.c;
  e.gradient = t.b / h;
  e.hessian = t.A / (h * h);
  if (e.value < 0.0) e.warnings |= warn_negative_density;
  return e;
}

}  // namespace locdens

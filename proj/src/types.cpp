#include "locdens/types.hpp"

#include <cmath>

#include "locdens/errors.hpp"

namespace locdens {

int order(const MultiIndex& alpha) {
  int s = 0;
  for (int a : alpha) {
    if (a < 0) throw DomainError("multi-index entries must be nonnegative");
    s += a;
  }
  return s;
}

HdsElement::HdsElement(double c_, Vec b_, Mat A_) : c(c_), b(std::move(b_)), A(std::move(A_)) {
  if (A.rows() != b.size() || A.cols() != b.size())
    throw DomainError("HdsElement: matrix and vector dimensions differ");
  A.triangularView<Eigen::StrictlyLower>() = A.transpose();
}

HdsElement HdsElement::zero(int d) { return HdsElement(0.0, Vec::Zero(d), Mat::Zero(d, d)); }

double HdsElement::inner(const HdsElement& o) const {
  return c * o.c + b.dot(o.b) + 0.5 * (A.cwiseProduct(o.A)).sum();
}

double HdsElement::norm() const { return std::sqrt(inner(*this)); }

double HdsElement::max_abs() const {
  double m = std::abs(c);
  if (b.size() > 0) m = std::max(m, b.cwiseAbs().maxCoeff());
  if (A.size() > 0) m = std::max(m, A.cwiseAbs().maxCoeff());
  return m;
}

Vec HdsElement::flatten() const {
  const int d = dim();
  Vec v(flat_size(d));
  v(0) = c;
  v.segment(1, d) = b;
  int k = 1 + d;
  for (int j = 0; j < d; ++j) v(k++) = A(j, j);
  for (int j = 0; j < d; ++j)
    for (int l = j + 1; l < d; ++l) v(k++) = A(j, l);
  return v;
}

HdsElement HdsElement::unflatten(const Vec& v, int d) {
  if (v.size() != flat_size(d)) throw DomainError("unflatten: wrong coordinate count");
  Mat A(d, d);
  int k = 1 + d;
  for (int j = 0; j < d; ++j) A(j, j) = v(k++);
  for (int j = 0; j < d; ++j)
    for (int l = j + 1; l < d; ++l) A(j, l) = v(k++);
  return HdsElement(v(0), v.segment(1, d), A);
}

HdsElement& HdsElement::operator+=(const HdsElement& o) {
  c += o.c;
  b += o.b;
  A += o.A;
  return *this;
}

HdsElement& HdsElement::operator-=(const HdsElement& o) {
  c -= o.c;
  b -= o.b;
  A -= o.A;
  return *this;
}

HdsElement& HdsElement::operator*=(double s) {
  c *= s;
  b *= s;
  A *= s;
  return *this;
}

HdsElement operator+(HdsElement a, const HdsElement& b) { return a += b; }
HdsElement operator-(HdsElement a, const HdsElement& b) { return a -= b; }
HdsElement operator*(double s, HdsElement a) { return a *= s; }
double inner(const HdsElement& a, const HdsElement& b) { return a.inner(b); }

Dataset::Dataset(RowMat points) : pts_(std::move(points)) {
  if (pts_.rows() < 1) throw DomainError("dataset must contain at least one observation");
  if (pts_.cols() < 1) throw DomainError("dataset dimension must be at least one");
  if (!pts_.allFinite()) {
    for (Eigen::Index i = 0; i < pts_.rows(); ++i)
      if (!pts_.row(i).allFinite())
        throw DomainError("non-finite entry in observation " + std::to_string(i));
  }
}

HdsElement EstimateTriple::scaled(double h) const {
  return HdsElement(has_value ? value : 0.0, h * gradient, h * h * hessian);
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::domain: return "domain";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::degenerate_neighborhood: return "degenerate_neighborhood";
    case ErrorCode::singular_covariance: return "singular_covariance";
    case ErrorCode::nonpositive_density: return "nonpositive_density";
    case ErrorCode::solver: return "solver";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::parse: return "parse";
    case ErrorCode::experiment: return "experiment";
  }
  return "unknown";
}

}  // namespace locdens

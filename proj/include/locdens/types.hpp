#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace locdens {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

//! Multi-index alpha = (alpha_1, ..., alpha_d), entries >= 0.
using MultiIndex = std::vector<int>;

int order(const MultiIndex& alpha);

//! Element (c, b, A) of R x R^d x Sym(d).
//!
//! A is kept exactly symmetric: the constructor mirrors the upper triangle
//! into the lower one. The inner product is c*c' + b.b' + tr(A A')/2.
struct HdsElement {
  double c = 0.0;
  Vec b;
  Mat A;

  HdsElement() = default;
  HdsElement(double c, Vec b, Mat A);

  static HdsElement zero(int d);

  int dim() const { return static_cast<int>(b.size()); }
  double inner(const HdsElement& other) const;
  double norm() const;
  double max_abs() const;

  //! Coordinates (c, b_1..b_d, A_11..A_dd, A_jk for j < k).
  Vec flatten() const;
  static HdsElement unflatten(const Vec& v, int d);
  static int flat_size(int d) { return 1 + d + d * (d + 1) / 2; }

  HdsElement& operator+=(const HdsElement& o);
  HdsElement& operator-=(const HdsElement& o);
  HdsElement& operator*=(double s);
};

HdsElement operator+(HdsElement a, const HdsElement& b);
HdsElement operator-(HdsElement a, const HdsElement& b);
HdsElement operator*(double s, HdsElement a);
double inner(const HdsElement& a, const HdsElement& b);

//! Local moment triple (s, first-moment vector, second-moment matrix).
using MomentTriple = HdsElement;

//! n observations in R^d, one per row.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(RowMat points);

  std::int64_t n() const { return pts_.rows(); }
  int d() const { return static_cast<int>(pts_.cols()); }
  const RowMat& points() const { return pts_; }
  const double* row(std::int64_t i) const { return pts_.data() + i * pts_.cols(); }

 private:
  RowMat pts_;
};

enum class Scale { density, log };

enum Warning : unsigned {
  warn_none = 0,
  warn_negative_density = 1u << 0,
  warn_ill_conditioned = 1u << 1,
};

//! Estimates (value, gradient, Hessian) of f or of log f at one point.
struct EstimateTriple {
  double value = 0.0;
  Vec gradient;
  Mat hessian;
  Scale scale = Scale::density;
  unsigned warnings = warn_none;
  //! False for estimators that only identify derivatives.
  bool has_value = true;

  int dim() const { return static_cast<int>(gradient.size()); }
  //! (value, h * gradient, h^2 * hessian).
  HdsElement scaled(double h) const;
};

}  // namespace locdens

#pragma once

#include "locdens/kernel.hpp"
#include "locdens/local_moments.hpp"
#include "locdens/types.hpp"

namespace locdens {

//! Operator J, its inverse and the matching polynomials for one kernel.
class MatchingPolynomials {
 public:
  //! Requires mu_0 = mu_2 = 1. refined needs a spherical kernel.
  explicit MatchingPolynomials(const KernelSpec& kernel, bool refined = false);

  int dimension() const { return d_; }
  double eta() const { return eta_; }
  double mu22() const { return mu22_; }
  double mu4() const { return mu4_; }
  const Mat& M() const { return M_; }
  bool refined() const { return refined_; }
  double a() const { return a_; }
  double b() const { return b_; }

  //! (c + tr A / 2, b, c I + A o M + mu22 tr A / 2 I).
  HdsElement apply_J(const HdsElement& v) const;
  HdsElement invert_J(const HdsElement& v) const;
  //! (p0(z), p_j(z), p_jk(z)); p_jj sits on the diagonal.
  HdsElement weights(const Vec& z) const;

 private:
  int d_;
  double mu22_, mu4_, eta_;
  Mat M_;
  bool refined_;
  double a_ = 1.0, b_ = 0.0;
};

HdsElement apply_J(const MatchingPolynomials& poly, const HdsElement& v);
HdsElement invert_J(const MatchingPolynomials& poly, const HdsElement& v);
HdsElement polynomial_weights(const MatchingPolynomials& poly, const Vec& z);

//! (f, Df, D^2 f) from local moment data.
EstimateTriple estimate_m_from_moments(const MatchingPolynomials& poly, const LocalMomentData& m, double h);

EstimateTriple estimate_m(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h,
                          bool refined = false);

//! Same estimator as a kernel-weighted sum of polynomial weights.
EstimateTriple estimate_m_weighted(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h,
                                   bool refined = false);

}  // namespace locdens

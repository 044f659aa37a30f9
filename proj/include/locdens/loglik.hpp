#pragma once

#include "locdens/kernel.hpp"
#include "locdens/local_moments.hpp"
#include "locdens/types.hpp"

namespace locdens {

//! Scaled parameter (c, h b, h^2 A) with lambda_max(A) < eps(K).
class ThetaPoint {
 public:
  ThetaPoint(HdsElement theta, const KernelSpec& kernel);
  const HdsElement& theta() const { return theta_; }

 private:
  HdsElement theta_;
};

bool in_theta(const HdsElement& theta, const KernelSpec& kernel, double margin = 0.0);

struct LocalMeanCov {
  Vec mu_hat;
  Mat sigma_hat;
};

//! mu = sfrak / s, Sigma = S / s - mu mu^T.
LocalMeanCov local_mean_cov(const MomentTriple& triple);

//! integral K(z) exp(c + b^T z + z^T A z / 2) dz for a scaled theta; +inf outside Theta.
double tilted_mass(const HdsElement& theta, const KernelSpec& kernel);

//! -<theta, T> + integral K exp(g_theta) for scaled theta and moment triple T.
double score_from_triple(const HdsElement& theta_scaled, const MomentTriple& triple, const KernelSpec& kernel);

//! Local negative log-likelihood at unscaled (c, b, A).
double score_l(const HdsElement& theta, const Vec& x, const Dataset& data, const KernelSpec& kernel, double h);

//! F(theta) = integral K(z) (1, z, z z^T) exp(g_theta(z)) dz.
HdsElement f_map(const ThetaPoint& theta, const KernelSpec& kernel);
//! DF(theta) delta.
HdsElement df_map(const ThetaPoint& theta, const KernelSpec& kernel, const HdsElement& delta);
//! Matrix of DF(theta) in flattened coordinates.
Mat df_matrix(const ThetaPoint& theta, const KernelSpec& kernel);

//! Cubature versions (no closed forms), used as oracles.
HdsElement f_map_quadrature(const HdsElement& theta, const KernelSpec& kernel, double tol = 1e-12);
HdsElement df_map_quadrature(const HdsElement& theta, const KernelSpec& kernel, const HdsElement& delta,
                             double tol = 1e-12);

struct NewtonOptions {
  //! Use Newton even when a closed form exists.
  bool force_newton = false;
  double tol = 1e-10;
  int max_iter = 100;
};

struct SolveInfo {
  int iterations = 0;
  double residual = 0.0;
  bool closed_form = false;
  HdsElement theta;  // scaled solution
};

//! Closed form for the Gaussian kernel from a moment triple.
EstimateTriple gaussian_closed_form_l(const MomentTriple& triple, double h);

EstimateTriple solve_l_from_triple(const MomentTriple& triple, const KernelSpec& kernel, double h,
                                   const NewtonOptions& opts = {}, SolveInfo* info = nullptr);

//! (l, Dl, D^2 l) by inverting F at the empirical moment triple.
EstimateTriple solve_l(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h,
                       const NewtonOptions& opts = {}, SolveInfo* info = nullptr);

EstimateTriple density_to_logdensity(const EstimateTriple& est);
EstimateTriple logdensity_to_density(const EstimateTriple& est);

}  // namespace locdens

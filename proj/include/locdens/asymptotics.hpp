#pragma once

#include <array>
#include <cstdint>
#include <functional>

#include "locdens/estimators.hpp"
#include "locdens/kernel.hpp"
#include "locdens/test_density.hpp"
#include "locdens/types.hpp"

namespace locdens {

enum class Target { value, gradient, hessian };

const char* to_string(Target t);
Target parse_target(const std::string& s);

//! Error norm of one target: |.|, Euclidean or Frobenius.
double target_error(Target t, const EstimateTriple& est, const EstimateTriple& truth);
//! Order of the derivative a target estimates.
int target_order(Target t);

//! Leading bias (h^g0 beta, h^g1 beta_vec, h^4 B) and influence function G
//! of a linear expansion in scaled coordinates (value, h grad, h^2 hess).
struct BiasProfile {
  explicit BiasProfile(KernelSpec k) : kernel(std::move(k)) {}

  KernelSpec kernel;
  Paradigm paradigm = Paradigm::M;
  Scale scale = Scale::density;
  int gamma0 = 4;
  int gamma1 = 3;
  double beta = 0.0;
  Vec beta_vec;
  Mat B_mat;
  //! G(z) given z and K(z). Only evaluated where K(z) > 0.
  std::function<HdsElement(const Vec& z, double kval)> G;

  //! Scaled leading bias at bandwidth h.
  HdsElement leading_bias(double h) const;
  //! Leading bias of (value, gradient, Hessian) on the original scale.
  EstimateTriple unscaled_bias(double h) const;
};

//! Bias constants for M, M3, K and L. H throws UnsupportedError.
BiasProfile bias_constants(Paradigm p, const TestDensity& f, const Vec& x0, const KernelSpec& kernel);

//! Constants of (log f^, f^-1 Df^, ...) from those of a density-scale estimator.
BiasProfile transfer_to_log(const BiasProfile& profile, const TestDensity& f, const Vec& x0);

//! fx0 * integral <G(z), H>^2 dz.
double variance_functional(const BiasProfile& profile, const HdsElement& H, double fx0);

//! E over the sampling distribution replaced by cubature: the estimator
//! map applied to the expected local statistics at (x, h).
EstimateTriple expected_estimate(Paradigm p, const TestDensity& f, const Vec& x, const KernelSpec& kernel,
                                 double h, Scale scale);

//! Bandwidth rules h = C n^{-1/(d + offset)}.
class BandwidthPlan {
 public:
  enum class Mode { single, rate, triple };

  static BandwidthPlan single(double h);
  //! offset in {4, 6, 8}.
  static BandwidthPlan rate(double C, int offset);
  //! h(j) = C_j n^{-1/(d + 4 + 2j)}.
  static BandwidthPlan triple(std::array<double, 3> C);
  //! Three equal bandwidths h(j) = C n^{-1/(d + offset)}, the control plan.
  static BandwidthPlan equal_triple(double C, int offset);

  Mode mode() const { return mode_; }
  double bandwidth(std::int64_t n, int d, int component = 0) const;
  std::string describe() const;

 private:
  Mode mode_ = Mode::single;
  std::array<double, 3> C_{1.0, 1.0, 1.0};
  std::array<int, 3> offsets_{4, 4, 4};
};

//! (hj/hk)^{d/2} integral G_j(z) G_k(hj z / hk) f(x + hj z) dz for the kernel
//! derivative components G_0 = K, G_1 = -b^T DK, G_2 = tr(A D^2 K), j < k.
double cross_moment(const KernelSpec& kernel, const TestDensity& f, const Vec& x, int j, int k, double hj,
                    double hk, const Vec& b, const Mat& A);

}  // namespace locdens

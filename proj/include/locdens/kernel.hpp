#pragma once

#include <functional>
#include <initializer_list>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include "locdens/types.hpp"

namespace locdens {

enum class KernelFamily { gaussian, spherical, rectangular, custom };

const char* to_string(KernelFamily family);

//! Radial profile kappa(r) of a spherically symmetric kernel K(z) = kappa(|z|).
struct RadialProfile {
  std::string name = "spherical";
  std::function<double(double)> value;
  //! kappa'(r) / r, finite at r = 0. Optional.
  std::function<double(double)> slope_over_r;
  //! kappa''(r). Optional; required together with slope_over_r.
  std::function<double(double)> curvature;
  double support = std::numeric_limits<double>::infinity();
  //! Exponential moment radius; only used when support is infinite.
  double exp_moment_radius = 0.0;
};

//! Kernel given by pointwise evaluators. Supported for d <= 3.
struct CustomKernelDef {
  std::string name = "custom";
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;
  //! K vanishes outside [-a, a]^d; integrals are taken over this box.
  double support_halfwidth = 0.0;
  //! Sign- and permutation-symmetry is claimed (and tested by check_conditions).
  bool symmetric = true;
  double exp_moment_radius = std::numeric_limits<double>::infinity();
};

struct KernelDerivatives {
  double value = 0.0;
  Vec gradient;
  Mat hessian;
};

//! Discretization of the measure K(z) dz: integral K(z) phi(z) dz ~ sum w_i phi(z_i).
struct KernelRule {
  Mat nodes;    // d x N
  Vec weights;  // K-weighted
  Vec kvalues;  // K(z_i) > 0
};

//! Integrand callback: writes phi(z) into out, given z and K(z).
using KernelIntegrand = std::function<void(const Vec& z, double kval, Eigen::Ref<Vec> out)>;

//! Immutable kernel description with its frozen moment table.
class KernelSpec {
 public:
  static KernelSpec gaussian(int d);
  static KernelSpec rectangular(int d);
  //! With standardize, the profile is rescaled so that K integrates to one
  //! and has unit marginal second moments.
  static KernelSpec spherical(int d, RadialProfile profile, bool standardize = true);
  //! Standardized triweight profile (1 - r^2)^3.
  static KernelSpec triweight(int d);
  static KernelSpec uniform_ball(int d, bool standardize = true);
  static KernelSpec custom(int d, CustomKernelDef def);

  int dimension() const;
  KernelFamily family() const;
  const std::string& name() const;
  bool is_spherical() const;
  bool symmetric() const;
  bool differentiable() const;
  //! Closed-form moments (tolerance 1e-8) versus quadrature (1e-6).
  bool closed_form_moments() const;
  double exp_moment_radius() const;
  //! Radius of a ball containing the support (infinity for the Gaussian).
  double support_radius() const;
  double sup_value() const;

  double operator()(const Vec& z) const;
  double value(const double* z) const;
  //! K_h(z) = h^{-d} K(z / h).
  double evaluate(const Vec& z, double h) const;
  KernelDerivatives derivatives(const Vec& z) const;
  //! Allocation-free form; hess is a d x d buffer.
  void derivatives(const double* z, double* value, double* grad, double* hess) const;

  //! mu_alpha = integral of K(z) z^alpha, |alpha| <= 8.
  double moment(const MultiIndex& alpha) const;
  //! Moment for a sorted even pattern, e.g. {4} = mu_4, {2, 2} = mu_22.
  double special_moment(std::initializer_list<int> pattern) const;
  const std::map<MultiIndex, double>& moment_table() const;
  //! (E|Z|^4, E|Z|^6) for spherical kernels.
  std::pair<double, double> radial_moments() const;
  double radial_moment(int k) const;

  KernelRule rule(int level) const;
  int max_rule_level() const;
  //! Integral of K(z) phi(z), refining the rule until successive levels
  //! agree to tol relative to the largest component.
  Vec integrate(const KernelIntegrand& fn, int out_dim, double tol = 1e-12) const;

  struct Impl;

 private:
  explicit KernelSpec(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

double evaluate(const KernelSpec& kernel, const Vec& z, double h);
double kernel_moment(const KernelSpec& kernel, const MultiIndex& alpha);
std::pair<double, double> radial_moments(const KernelSpec& kernel);

struct ConditionCheck {
  bool pass = false;
  double residual = 0.0;
  std::string note;
};

struct ConditionReport {
  ConditionCheck normalized;       // integrates to one
  ConditionCheck symmetric;        // sign and permutation symmetric
  ConditionCheck unit_variance;    // unit marginal second moment
  ConditionCheck differentiable;   // bounded first and second derivatives available
  ConditionCheck exp_moment;       // finite exponential moment below epsilon(K)
  bool all_pass() const;
};

ConditionReport check_conditions(const KernelSpec& kernel);

}  // namespace locdens

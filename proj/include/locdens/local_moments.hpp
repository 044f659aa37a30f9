#pragma once

#include <functional>

#include "locdens/kernel.hpp"
#include "locdens/test_density.hpp"
#include "locdens/types.hpp"

namespace locdens {

//! Weights below this count as an empty neighborhood.
inline constexpr double kDegenerateWeight = 1e-300;

//! Moment triple plus the cubic moments t_j = n^{-1} sum K_h(X_i - x) |z_i|^2 z_j
//! used by the refined gradient weights.
struct LocalMomentData {
  MomentTriple triple;
  Vec cubic;
  //! Largest single kernel weight K(z_i) (unscaled).
  double max_weight = 0.0;
};

//! n^{-1} sum K_h(X_i - x) ((X_i - x) / h)^alpha, |alpha| <= 4.
double local_moment(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h,
                    const MultiIndex& alpha);

MomentTriple moment_triple(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h);

LocalMomentData local_moment_data(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h);

using DensityFn = std::function<double(const Vec&)>;

//! integral K(z) (1, z, z z^T) f(x + h z) dz.
MomentTriple expected_moment_triple(const TestDensity& f, const KernelSpec& kernel, const Vec& x, double h);
MomentTriple expected_moment_triple(const DensityFn& f, const KernelSpec& kernel, const Vec& x, double h,
                                    double tol = 1e-12);
LocalMomentData expected_local_moment_data(const TestDensity& f, const KernelSpec& kernel, const Vec& x,
                                           double h);

//! h^{-|parity(alpha)|} s^alpha / s^0.
double mueller_moment(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h,
                      const MultiIndex& alpha);

}  // namespace locdens

#pragma once

#include "locdens/kernel.hpp"
#include "locdens/types.hpp"

namespace locdens {

//! (K(z), DK(z), D^2 K(z)); analytic only.
KernelDerivatives kernel_derivatives(const KernelSpec& kernel, const Vec& z);

//! Kernel density estimate with its analytic gradient and Hessian.
EstimateTriple estimate_k(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h);

}  // namespace locdens

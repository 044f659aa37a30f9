#pragma once

#include <functional>
#include <vector>

namespace locdens {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

//! m-point Gauss-Legendre rule on [a, b].
Rule1D gauss_legendre(int m, double a = -1.0, double b = 1.0);

//! m-point Gauss-Hermite rule for the standard normal weight; weights sum to 1.
Rule1D gauss_hermite(int m);

//! Adaptive 31-point Gauss-Kronrod quadrature on [a, b].
//! Throws NumericError when the error estimate stays above tol * max(1, |I|).
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-13, double* error = nullptr);

}  // namespace locdens

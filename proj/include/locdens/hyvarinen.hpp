#pragma once

#include "locdens/kernel.hpp"
#include "locdens/loglik.hpp"
#include "locdens/types.hpp"

namespace locdens {

struct HyvarinenStats {
  Vec q_hat;
  //! Not symmetric in general.
  Mat Q_hat;
};

//! q = sum DK(z_i) / sum K(z_i), Q = sum DK(z_i) z_i^T / sum K(z_i), z_i = (X_i - x) / h.
HyvarinenStats hyvarinen_stats(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h);

//! Symmetric A with Sigma A + A Sigma = B + B^T.
Mat sylvester_solve(const Mat& sigma, const Mat& B);

//! tr(A^2 Sigma) / 2 - tr(A B).
double sylvester_objective(const Mat& sigma, const Mat& B, const Mat& A);

//! (Dl, D^2 l); the value slot is empty (has_value = false).
EstimateTriple estimate_h_from_stats(const HyvarinenStats& stats, const LocalMeanCov& lmc, double h);
EstimateTriple estimate_h(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h);

//! n^{-1} sum [K_h |b + A y|^2 / 2 + K_h tr A + h^{-1} (DK)_h(y)^T (b + A y)], y = X_i - x.
double hyvarinen_objective(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h, const Vec& b,
                           const Mat& A);

}  // namespace locdens

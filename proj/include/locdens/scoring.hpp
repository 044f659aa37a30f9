#pragma once

#include "locdens/kernel.hpp"
#include "locdens/test_density.hpp"
#include "locdens/types.hpp"

namespace locdens {

//! Kernel window w(y) = K_h(y - x).
class WeightFunction {
 public:
  WeightFunction(KernelSpec kernel, Vec center, double h);

  double operator()(const Vec& y) const;
  Vec gradient(const Vec& y) const;
  //! m_w = h^{-d} sup K.
  double sup_value() const;

  const KernelSpec& kernel() const { return kernel_; }
  const Vec& center() const { return center_; }
  double bandwidth() const { return h_; }

 private:
  KernelSpec kernel_;
  Vec center_;
  double h_;
};

//! g(y) = exp(c + b^T (y - x) + (y - x)^T A (y - x) / 2).
struct LocalCandidate {
  HdsElement theta;
  Vec center;

  double log_g(const Vec& y) const;
  Vec dlog_g(const Vec& y) const;
  double laplacian_log_g() const { return theta.A.trace(); }
};

//! integral w g, +inf when it diverges.
double window_mass(const LocalCandidate& g, const WeightFunction& w);

//! -w log g + w log(int w g) - w log w.
double localized_log_score(const LocalCandidate& g, const Vec& y, const WeightFunction& w);

//! -w log(int w g) + int w g + w (log m_w - 1).
double sq_score(const LocalCandidate& g, const Vec& y, const WeightFunction& w);

//! -w log g + int w g - w (1 + log(w / m_w)); reduced drops the last term.
double penalized_log_score(const LocalCandidate& g, const Vec& y, const WeightFunction& w, bool reduced = false);

//! Q(alpha, z) = -z (log alpha + 1) + alpha.
double binary_log_q(double alpha, double z);

//! w (|D log g|^2 / 2 + lap log g) + Dw^T D log g.
double weighted_hyvarinen_score(const LocalCandidate& g, const Vec& y, const WeightFunction& w);

//! Sample average of the weighted Hyvarinen score.
double empirical_weighted_hyvarinen(const Dataset& data, const LocalCandidate& g, const WeightFunction& w);

enum class ScoreKind { localized_log, sq, penalized_log, penalized_log_reduced, weighted_hyvarinen };

//! E_f S(g, Y, w) by cubature against the window kernel.
double expected_score(ScoreKind kind, const TestDensity& f, const LocalCandidate& g, const WeightFunction& w);

}  // namespace locdens

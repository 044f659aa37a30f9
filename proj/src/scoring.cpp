#include "locdens/scoring.hpp"

#include <cmath>

#include "locdens/errors.hpp"
#include "locdens/exact_sum.hpp"
#include "locdens/loglik.hpp"

namespace locdens {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

HdsElement scaled_theta(const LocalCandidate& g, double h) {
  return HdsElement(g.theta.c, h * g.theta.b, h * h * g.theta.A);
}

// w log w with 0 log 0 = 0.
double xlogx(double w) { return w > 0.0 ? w * std::log(w) : 0.0; }

}  // namespace

WeightFunction::WeightFunction(KernelSpec kernel, Vec center, double h)
    : kernel_(std::move(kernel)), center_(std::move(center)), h_(h) {
  if (!(h_ > 0.0)) throw DomainError("bandwidth must be positive");
  if (center_.size() != kernel_.dimension()) throw DomainError("window center has wrong dimension");
}

double WeightFunction::operator()(const Vec& y) const { return kernel_.evaluate(y - center_, h_); }

Vec WeightFunction::gradient(const Vec& y) const {
  if (!kernel_.differentiable()) throw UnsupportedError("window kernel is not differentiable");
  const int d = kernel_.dimension();
  return kernel_.derivatives((y - center_) / h_).gradient * std::pow(h_, -d - 1);
}

double WeightFunction::sup_value() const { return std::pow(h_, -kernel_.dimension()) * kernel_.sup_value(); }

double LocalCandidate::log_g(const Vec& y) const {
  const Vec r = y - center;
  return theta.c + theta.b.dot(r) + 0.5 * r.dot(theta.A * r);
}

Vec LocalCandidate::dlog_g(const Vec& y) const { return theta.b + theta.A * (y - center); }

double window_mass(const LocalCandidate& g, const WeightFunction& w) {
  if ((g.center - w.center()).cwiseAbs().maxCoeff() != 0.0)
    throw DomainError("candidate and window must share the center");
  return tilted_mass(scaled_theta(g, w.bandwidth()), w.kernel());
}

double localized_log_score(const LocalCandidate& g, const Vec& y, const WeightFunction& w) {
  const double I = window_mass(g, w);
  if (!std::isfinite(I)) return kInf;
  const double wy = w(y);
  if (wy == 0.0) return 0.0;
  return -wy * g.log_g(y) + wy * std::log(I) - xlogx(wy);
}

double sq_score(const LocalCandidate& g, const Vec& y, const WeightFunction& w) {
  const double I = window_mass(g, w);
  if (!std::isfinite(I)) return kInf;
  const double wy = w(y);
  return -wy * std::log(I) + I + wy * (std::log(w.sup_value()) - 1.0);
}

double penalized_log_score(const LocalCandidate& g, const Vec& y, const WeightFunction& w, bool reduced) {
  const double I = window_mass(g, w);
  if (!std::isfinite(I)) return kInf;
  const double wy = w(y);
  double s = I;
  if (wy > 0.0) s -= wy * g.log_g(y);
  if (!reduced && wy > 0.0) s -= wy * (1.0 + std::log(wy / w.sup_value()));
  return s;
}

double binary_log_q(double alpha, double z) {
  if (!(alpha > 0.0)) throw DomainError("Q needs alpha > 0");
  return -z * (std::log(alpha) + 1.0) + alpha;
}

double weighted_hyvarinen_score(const LocalCandidate& g, const Vec& y, const WeightFunction& w) {
  const Vec dl = g.dlog_g(y);
  return w(y) * (0.5 * dl.squaredNorm() + g.laplacian_log_g()) + w.gradient(y).dot(dl);
}

double empirical_weighted_hyvarinen(const Dataset& data, const LocalCandidate& g, const WeightFunction& w) {
  ExactSum acc;
  for (std::int64_t i = 0; i < data.n(); ++i) {
    const Vec y = Eigen::Map<const Vec>(data.row(i), data.d());
    acc.add(weighted_hyvarinen_score(g, y, w));
  }
  return acc.value() / static_cast<double>(data.n());
}

double expected_score(ScoreKind kind, const TestDensity& f, const LocalCandidate& g, const WeightFunction& w) {
  const double h = w.bandwidth();
  const int d = f.dimension();
  const KernelSpec& K = w.kernel();
  const Vec& x = w.center();
  double I = 0.0;
  if (kind != ScoreKind::weighted_hyvarinen) {
    I = window_mass(g, w);
    if (!std::isfinite(I)) return kInf;
  }
  const double logm = std::log(w.sup_value());
  const double hd = std::pow(h, -d);
  // integral f(y) w(y) a(y) dy = integral f(x + h z) K(z) a(x + h z) dz
  const Vec v = K.integrate(
      [&](const Vec& z, double kval, Eigen::Ref<Vec> out) {
        const Vec y = x + h * z;
        const double fy = f.pdf(y);
        const double wy = hd * kval;
        switch (kind) {
          case ScoreKind::localized_log:
            out(0) = fy * (-g.log_g(y) + std::log(I) - std::log(wy));
            break;
          case ScoreKind::sq:
            out(0) = fy * (-std::log(I) + logm - 1.0);
            break;
          case ScoreKind::penalized_log:
            out(0) = fy * (-g.log_g(y) - 1.0 - std::log(wy) + logm);
            break;
          case ScoreKind::penalized_log_reduced:
            out(0) = fy * (-g.log_g(y));
            break;
          case ScoreKind::weighted_hyvarinen: {
            const Vec dl = g.dlog_g(y);
            const Vec dk_over_k = K.derivatives(z).gradient / kval;
            out(0) = fy * (0.5 * dl.squaredNorm() + g.laplacian_log_g() + dk_over_k.dot(dl) / h);
            break;
          }
        }
      },
      1, 1e-11);
  const bool plus_mass = kind == ScoreKind::sq || kind == ScoreKind::penalized_log ||
                         kind == ScoreKind::penalized_log_reduced;
  return v(0) + (plus_mass ? I : 0.0);
}

}  // namespace locdens

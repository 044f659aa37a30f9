#include "locdens/loglik.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

#include "locdens/errors.hpp"

namespace locdens {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kThetaMargin = 1e-6;

double lambda_max(const Mat& A) {
  Eigen::SelfAdjointEigenSolver<Mat> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

bool is_gaussian(const KernelSpec& k) { return k.family() == KernelFamily::gaussian; }

// Tilted normal N(m, Sig) with total mass z0 for the Gaussian kernel.
struct TiltedNormal {
  double z0;
  Vec m;
  Mat Sig;
};

TiltedNormal tilted_normal(const HdsElement& t) {
  const int d = t.dim();
  const Mat P = Mat::Identity(d, d) - t.A;
  Eigen::LLT<Mat> llt(P);
  if (llt.info() != Eigen::Success) throw DomainError("theta outside the parameter set");
  TiltedNormal out;
  out.Sig = llt.solve(Mat::Identity(d, d));
  out.Sig = 0.5 * (out.Sig + out.Sig.transpose()).eval();
  out.m = out.Sig * t.b;
  const double logdet = 2.0 * Mat(llt.matrixL()).diagonal().array().log().sum();
  out.z0 = std::exp(t.c - 0.5 * logdet + 0.5 * t.b.dot(out.m));
  return out;
}

HdsElement gaussian_f(const HdsElement& t) {
  const TiltedNormal tn = tilted_normal(t);
  return HdsElement(tn.z0, tn.z0 * tn.m, tn.z0 * (tn.Sig + tn.m * tn.m.transpose()));
}

// Gaussian moments up to order four give DF in closed form.
HdsElement gaussian_df(const HdsElement& t, const HdsElement& delta) {
  const TiltedNormal tn = tilted_normal(t);
  const Vec& m = tn.m;
  const Mat& S = tn.Sig;
  const double beta = delta.c;
  const Vec& bv = delta.b;
  const Mat& B = delta.A;
  const Mat E2 = S + m * m.transpose();
  const double mBm = m.dot(B * m);
  const double trBS = (B * S).trace();
  const Vec SBm = S * B * m;
  const Vec Sb = S * bv;
  const double bm = bv.dot(m);
  const double e_quad = trBS + mBm;
  const Vec e_z_quad = m * e_quad + 2.0 * SBm;
  const Mat e_zz_lin = m * m.transpose() * bm + m * Sb.transpose() + Sb * m.transpose() + S * bm;
  const Mat e_zz_quad = E2 * e_quad + 2.0 * (m * SBm.transpose() + SBm * m.transpose()) + 2.0 * S * B * S;
  const double c = beta + bv.dot(m) + 0.5 * e_quad;
  const Vec b = beta * m + E2 * bv + 0.5 * e_z_quad;
  Mat A = beta * E2 + e_zz_lin + 0.5 * e_zz_quad;
  return tn.z0 * HdsElement(c, b, A);
}

double g_value(const HdsElement& t, const Vec& z) { return t.c + t.b.dot(z) + 0.5 * z.dot(t.A * z); }

// phi(z) in flattened coordinates: (1, z, z_j^2 / 2, z_j z_k).
void phi_coords(const Vec& z, Eigen::Ref<Vec> out) {
  const int d = static_cast<int>(z.size());
  out(0) = 1.0;
  for (int j = 0; j < d; ++j) {
    out(1 + j) = z(j);
    out(1 + d + j) = 0.5 * z(j) * z(j);
  }
  int p = 1 + 2 * d;
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) out(p++) = z(j) * z(k);
}

// psi(z) in flattened coordinates: (1, z, z_j^2, z_j z_k).
void psi_coords(const Vec& z, Eigen::Ref<Vec> out) {
  const int d = static_cast<int>(z.size());
  phi_coords(z, out);
  for (int j = 0; j < d; ++j) out(1 + d + j) *= 2.0;
}

Mat quadrature_df_matrix(const HdsElement& t, const KernelSpec& kernel, double tol) {
  const int d = t.dim();
  const int n = HdsElement::flat_size(d);
  Vec phi(n), psi(n);
  const Vec v = kernel.integrate(
      [&](const Vec& z, double, Eigen::Ref<Vec> out) {
        const double e = std::exp(g_value(t, z));
        phi_coords(z, phi);
        psi_coords(z, psi);
        Eigen::Map<Mat>(out.data(), n, n) = e * psi * phi.transpose();
      },
      n * n, tol);
  return Eigen::Map<const Mat>(v.data(), n, n);
}

}  // namespace

bool in_theta(const HdsElement& theta, const KernelSpec& kernel, double margin) {
  const double eps = kernel.exp_moment_radius();
  if (!std::isfinite(eps)) return theta.A.allFinite();
  return lambda_max(theta.A) < eps - margin;
}

ThetaPoint::ThetaPoint(HdsElement theta, const KernelSpec& kernel) : theta_(std::move(theta)) {
  if (theta_.dim() != kernel.dimension()) throw DomainError("theta has wrong dimension");
  if (!in_theta(theta_, kernel)) throw DomainError("theta outside the parameter set");
}

LocalMeanCov local_mean_cov(const MomentTriple& triple) {
  if (!(triple.c > 0.0)) throw DegenerateNeighborhoodError("local zero-moment is not positive");
  LocalMeanCov out;
  out.mu_hat = triple.b / triple.c;
  out.sigma_hat = triple.A / triple.c - out.mu_hat * out.mu_hat.transpose();
  out.sigma_hat = 0.5 * (out.sigma_hat + out.sigma_hat.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(out.sigma_hat, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  const double scale = std::max({lmax, (triple.A / triple.c).trace(), 1e-300});
  if (!(lmin > 1e-13 * scale))
    throw SingularCovarianceError("local covariance matrix is singular", lmin);
  return out;
}

HdsElement f_map_quadrature(const HdsElement& theta, const KernelSpec& kernel, double tol) {
  const int d = theta.dim();
  const int n = HdsElement::flat_size(d);
  const Vec v = kernel.integrate(
      [&](const Vec& z, double, Eigen::Ref<Vec> out) {
        psi_coords(z, out);
        out *= std::exp(g_value(theta, z));
      },
      n, tol);
  return HdsElement::unflatten(v, d);
}

HdsElement df_map_quadrature(const HdsElement& theta, const KernelSpec& kernel, const HdsElement& delta,
                             double tol) {
  const int d = theta.dim();
  const int n = HdsElement::flat_size(d);
  const Vec v = kernel.integrate(
      [&](const Vec& z, double, Eigen::Ref<Vec> out) {
        psi_coords(z, out);
        out *= std::exp(g_value(theta, z)) * (delta.c + delta.b.dot(z) + 0.5 * z.dot(delta.A * z));
      },
      n, tol);
  return HdsElement::unflatten(v, d);
}

double tilted_mass(const HdsElement& theta, const KernelSpec& kernel) {
  if (!in_theta(theta, kernel)) return kInf;
  if (is_gaussian(kernel)) return tilted_normal(theta).z0;
  const Vec v = kernel.integrate(
      [&](const Vec& z, double, Eigen::Ref<Vec> out) { out(0) = std::exp(g_value(theta, z)); }, 1, 1e-12);
  return v(0);
}

double score_from_triple(const HdsElement& theta_scaled, const MomentTriple& triple, const KernelSpec& kernel) {
  const double mass = tilted_mass(theta_scaled, kernel);
  if (!std::isfinite(mass)) return kInf;
  return -inner(theta_scaled, triple) + mass;
}

double score_l(const HdsElement& theta, const Vec& x, const Dataset& data, const KernelSpec& kernel, double h) {
  const MomentTriple t = moment_triple(data, kernel, x, h);
  const HdsElement scaled(theta.c, h * theta.b, h * h * theta.A);
  return score_from_triple(scaled, t, kernel);
}

HdsElement f_map(const ThetaPoint& theta, const KernelSpec& kernel) {
  if (is_gaussian(kernel)) return gaussian_f(theta.theta());
  return f_map_quadrature(theta.theta(), kernel);
}

HdsElement df_map(const ThetaPoint& theta, const KernelSpec& kernel, const HdsElement& delta) {
  if (delta.dim() != theta.theta().dim()) throw DomainError("df_map: dimension mismatch");
  if (is_gaussian(kernel)) return gaussian_df(theta.theta(), delta);
  return df_map_quadrature(theta.theta(), kernel, delta);
}

Mat df_matrix(const ThetaPoint& theta, const KernelSpec& kernel) {
  const int d = theta.theta().dim();
  const int n = HdsElement::flat_size(d);
  if (!is_gaussian(kernel)) return quadrature_df_matrix(theta.theta(), kernel, 1e-12);
  Mat D(n, n);
  for (int p = 0; p < n; ++p) {
    Vec e = Vec::Zero(n);
    e(p) = 1.0;
    D.col(p) = gaussian_df(theta.theta(), HdsElement::unflatten(e, d)).flatten();
  }
  return D;
}

EstimateTriple gaussian_closed_form_l(const MomentTriple& triple, double h) {
  const LocalMeanCov lmc = local_mean_cov(triple);
  const int d = triple.dim();
  Eigen::LLT<Mat> llt(lmc.sigma_hat);
  const Mat Pinv = llt.solve(Mat::Identity(d, d));
  const Vec Pmu = llt.solve(lmc.mu_hat);
  const double logdet = 2.0 * Mat(llt.matrixL()).diagonal().array().log().sum();
  EstimateTriple e;
  e.scale = Scale::log;
  e.value = std::log(triple.c) - 0.5 * lmc.mu_hat.dot(Pmu) - 0.5 * logdet;
  e.gradient = Pmu / h;
  e.hessian = (Mat::Identity(d, d) - 0.5 * (Pinv + Pinv.transpose())) / (h * h);
  return e;
}

EstimateTriple solve_l_from_triple(const MomentTriple& triple, const KernelSpec& kernel, double h,
                                   const NewtonOptions& opts, SolveInfo* info) {
  if (!(h > 0.0)) throw DomainError("bandwidth must be positive");
  // Sigma > 0 is necessary for the triple to lie in F(Theta).
  local_mean_cov(triple);
  const int d = triple.dim();
  if (is_gaussian(kernel) && !opts.force_newton) {
    EstimateTriple e = gaussian_closed_form_l(triple, h);
    if (info) {
      info->iterations = 0;
      info->residual = 0.0;
      info->closed_form = true;
      info->theta = HdsElement(e.value, h * e.gradient, h * h * e.hessian);
    }
    return e;
  }
  const double s = triple.c;
  const double scale = std::max(s, 1.0);
  HdsElement theta(std::log(s), Vec::Zero(d), Mat::Zero(d, d));
  HdsElement F = f_map(ThetaPoint(theta, kernel), kernel);
  double res = (triple - F).norm() / scale;
  double score = score_from_triple(theta, triple, kernel);
  int it = 0;
  for (; it < opts.max_iter && !(res < opts.tol); ++it) {
    const Mat D = df_matrix(ThetaPoint(theta, kernel), kernel);
    const Vec step = D.fullPivLu().solve((triple - F).flatten());
    const HdsElement delta = HdsElement::unflatten(step, d);
    double t = 1.0;
    while (!in_theta(theta + t * delta, kernel, kThetaMargin) && t > 1e-300) t *= 0.5;
    bool accepted = false;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      const HdsElement cand = theta + t * delta;
      const double sc = score_from_triple(cand, triple, kernel);
      if (!std::isfinite(sc)) continue;
      const HdsElement Fc = f_map(ThetaPoint(cand, kernel), kernel);
      const double rc = (triple - Fc).norm() / scale;
      const bool decrease = sc < score;
      const bool flat = sc <= score + 1e-13 * (std::abs(score) + 1.0) && rc < res;
      if (decrease || flat) {
        theta = cand;
        F = Fc;
        res = rc;
        score = sc;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!(res < opts.tol)) {
    // Unbounded score along the last Newton direction means no solution exists.
    const Mat D = df_matrix(ThetaPoint(theta, kernel), kernel);
    const HdsElement dir = HdsElement::unflatten(D.fullPivLu().solve((triple - F).flatten()), d);
    double prev = score, t = 1.0;
    bool diverging = true;
    for (int k = 0; k < 100; ++k, t *= 2.0) {
      const double sc = score_from_triple(theta + t * dir, triple, kernel);
      if (!(sc < prev)) {
        diverging = false;
        break;
      }
      prev = sc;
    }
    if (diverging) throw InfeasibleError("moment triple lies outside the range of the moment map");
    throw SolverError("Newton iteration did not converge", res);
  }
  if (info) {
    info->iterations = it;
    info->residual = res;
    info->closed_form = false;
    info->theta = theta;
  }
  EstimateTriple e;
  e.scale = Scale::log;
  e.value = theta.c;
  e.gradient = theta.b / h;
  e.hessian = theta.A / (h * h);
  return e;
}

EstimateTriple solve_l(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h,
                       const NewtonOptions& opts, SolveInfo* info) {
  const MomentTriple t = moment_triple(data, kernel, x, h);
  if (!(t.c > 0.0)) throw DegenerateNeighborhoodError("no observations carry kernel weight at the query point");
  return solve_l_from_triple(t, kernel, h, opts, info);
}

EstimateTriple density_to_logdensity(const EstimateTriple& est) {
  if (est.scale != Scale::density) throw DomainError("estimate is already on the log scale");
  if (!(est.value > 0.0)) throw NonpositiveDensityError("density estimate is not positive");
  EstimateTriple e;
  e.scale = Scale::log;
  e.warnings = est.warnings & ~static_cast<unsigned>(warn_negative_density);
  e.value = std::log(est.value);
  e.gradient = est.gradient / est.value;
  e.hessian = est.hessian / est.value - e.gradient * e.gradient.transpose();
  e.hessian = 0.5 * (e.hessian + e.hessian.transpose()).eval();
  return e;
}

EstimateTriple logdensity_to_density(const EstimateTriple& est) {
  if (est.scale != Scale::log) throw DomainError("estimate is already on the density scale");
  if (!est.has_value) throw DomainError("estimate carries no value");
  EstimateTriple e;
  e.scale = Scale::density;
  e.warnings = est.warnings;
  e.value = std::exp(est.value);
  e.gradient = e.value * est.gradient;
  e.hessian = e.value * (est.hessian + est.gradient * est.gradient.transpose());
  return e;
}

}  // namespace locdens

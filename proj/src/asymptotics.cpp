#include "locdens/asymptotics.hpp"

#include <cmath>
#include <sstream>

#include "locdens/errors.hpp"
#include "locdens/hyvarinen.hpp"
#include "locdens/loglik.hpp"
#include "locdens/moment_matching.hpp"

namespace locdens {

const char* to_string(Target t) {
  switch (t) {
    case Target::value: return "value";
    case Target::gradient: return "gradient";
    case Target::hessian: return "hessian";
  }
  return "?";
}

Target parse_target(const std::string& s) {
  if (s == "value") return Target::value;
  if (s == "gradient") return Target::gradient;
  if (s == "hessian") return Target::hessian;
  throw DomainError("unknown target '" + s + "'");
}

double target_error(Target t, const EstimateTriple& est, const EstimateTriple& truth) {
  switch (t) {
    case Target::value: return std::abs(est.value - truth.value);
    case Target::gradient: return (est.gradient - truth.gradient).norm();
    case Target::hessian: return (est.hessian - truth.hessian).norm();
  }
  return 0.0;
}

int target_order(Target t) {
  return t == Target::value ? 0 : (t == Target::gradient ? 1 : 2);
}

HdsElement BiasProfile::leading_bias(double h) const {
  return HdsElement(std::pow(h, gamma0) * beta, std::pow(h, gamma1) * beta_vec, std::pow(h, 4) * B_mat);
}

EstimateTriple BiasProfile::unscaled_bias(double h) const {
  EstimateTriple e;
  e.scale = scale;
  e.value = std::pow(h, gamma0) * beta;
  e.gradient = std::pow(h, gamma1 - 1) * beta_vec;
  e.hessian = h * h * B_mat;
  return e;
}

namespace {

// Integral of K(z) phi(z) with phi given as an HdsElement.
HdsElement integrate_element(const KernelSpec& kernel, const std::function<HdsElement(const Vec&)>& phi) {
  const int d = kernel.dimension();
  const Vec v = kernel.integrate(
      [&](const Vec& z, double, Eigen::Ref<Vec> out) { out = phi(z).flatten(); }, HdsElement::flat_size(d),
      1e-11);
  return HdsElement::unflatten(v, d);
}

BiasProfile moment_matching_profile(bool refined, const TestDensity& f, const Vec& x0, const KernelSpec& kernel) {
  const int d = kernel.dimension();
  const MatchingPolynomials poly(kernel, refined);
  const HdsElement c = integrate_element(kernel, [&](const Vec& z) {
    const HdsElement w = poly.weights(z);
    const double d4 = f.directional(x0, z, 4) / 24.0;
    const Vec grad = refined ? Vec::Zero(d) : Vec(z * (f.directional(x0, z, 3) / 6.0));
    return HdsElement(w.c * d4, grad, w.A * d4);
  });
  BiasProfile p(kernel);
  p.paradigm = refined ? Paradigm::M3 : Paradigm::M;
  p.gamma0 = 4;
  p.gamma1 = refined ? 4 : 3;
  p.beta = c.c;
  p.beta_vec = c.b;
  p.B_mat = c.A;
  p.G = [poly](const Vec& z, double kval) { return kval * poly.weights(z); };
  return p;
}

BiasProfile kde_profile(const TestDensity& f, const Vec& x0, const KernelSpec& kernel) {
  if (!kernel.differentiable())
    throw UnsupportedError("kernel '" + kernel.name() + "' has no analytic derivatives");
  const int d = kernel.dimension();
  BiasProfile p(kernel);
  p.paradigm = Paradigm::K;
  p.gamma0 = 2;
  p.gamma1 = 3;
  p.beta = 0.5 * f.hessian(x0).trace();
  p.beta_vec = Vec::Zero(d);
  p.B_mat = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    for (int m = 0; m < d; ++m) p.beta_vec(j) += 0.5 * f.partial_axes(x0, {j, m, m});
    for (int k = j; k < d; ++k) {
      double s = 0.0;
      for (int m = 0; m < d; ++m) s += 0.5 * f.partial_axes(x0, {j, k, m, m});
      p.B_mat(j, k) = p.B_mat(k, j) = s;
    }
  }
  p.G = [kernel](const Vec& z, double) {
    const KernelDerivatives kd = kernel.derivatives(z);
    return HdsElement(kd.value, -kd.gradient, kd.hessian);
  };
  return p;
}

BiasProfile loglik_profile(const TestDensity& f, const Vec& x0, const KernelSpec& kernel) {
  const int d = kernel.dimension();
  const MatchingPolynomials poly(kernel, false);
  const HdsElement c = integrate_element(kernel, [&](const Vec& z) {
    const double l1 = f.log_directional(x0, z, 1);
    const double l3 = f.log_directional(x0, z, 3);
    const double l4 = f.log_directional(x0, z, 4);
    const Mat zz = z * z.transpose();
    const double even = l4 / 24.0 + l1 * l3 / 6.0;
    return HdsElement(even, z * (l3 / 6.0), zz * even);
  });
  const Vec dl = f.dl(x0);
  const HdsElement inv = poly.invert_J(HdsElement(c.c, Vec::Zero(d), c.A));
  const double fx = f.pdf(x0);
  BiasProfile p(kernel);
  p.paradigm = Paradigm::L;
  p.scale = Scale::log;
  p.gamma0 = 4;
  p.gamma1 = 3;
  p.beta = inv.c;
  p.beta_vec = c.b;
  p.B_mat = inv.A - (c.b * dl.transpose() + dl * c.b.transpose());
  p.G = [poly, fx](const Vec& z, double kval) { return (kval / fx) * poly.weights(z); };
  return p;
}

}  // namespace

BiasProfile bias_constants(Paradigm p, const TestDensity& f, const Vec& x0, const KernelSpec& kernel) {
  if (f.dimension() != kernel.dimension() || x0.size() != kernel.dimension())
    throw DomainError("dimension mismatch");
  switch (p) {
    case Paradigm::M: return moment_matching_profile(false, f, x0, kernel);
    case Paradigm::M3: return moment_matching_profile(true, f, x0, kernel);
    case Paradigm::K: return kde_profile(f, x0, kernel);
    case Paradigm::L: return loglik_profile(f, x0, kernel);
    case Paradigm::H: break;
  }
  throw UnsupportedError("bias constants for the Hyvarinen estimator are out of scope");
}

BiasProfile transfer_to_log(const BiasProfile& profile, const TestDensity& f, const Vec& x0) {
  if (profile.scale != Scale::density) throw DomainError("transfer_to_log needs a density-scale profile");
  const double fx = f.pdf(x0);
  const Vec dl = f.dl(x0);
  const Mat d2l = f.d2l(x0);
  BiasProfile p = profile;
  p.scale = Scale::log;
  p.gamma1 = std::min(profile.gamma1, profile.gamma0 + 1);
  p.beta = profile.beta / fx;
  const double i1 = profile.gamma1 == p.gamma1 ? 1.0 : 0.0;
  const double i0 = profile.gamma0 + 1 == p.gamma1 ? 1.0 : 0.0;
  p.beta_vec = (i1 * profile.beta_vec - i0 * profile.beta * dl) / fx;
  Mat B = profile.B_mat;
  if (profile.gamma0 == 2) B -= profile.beta * (d2l - dl * dl.transpose());
  if (profile.gamma1 == 3) B -= profile.beta_vec * dl.transpose() + dl * profile.beta_vec.transpose();
  p.B_mat = B / fx;
  auto G = profile.G;
  p.G = [G, fx](const Vec& z, double kval) { return (1.0 / fx) * G(z, kval); };
  return p;
}

double variance_functional(const BiasProfile& profile, const HdsElement& H, double fx0) {
  if (H.max_abs() == 0.0) return 0.0;
  const Vec v = profile.kernel.integrate(
      [&](const Vec& z, double kval, Eigen::Ref<Vec> out) {
        const double g = profile.G(z, kval).inner(H);
        out(0) = g * g / kval;
      },
      1, 1e-10);
  return fx0 * v(0);
}

namespace {

EstimateTriple expected_kde(const TestDensity& f, const Vec& x, const KernelSpec& kernel, double h) {
  if (!kernel.differentiable())
    throw UnsupportedError("kernel '" + kernel.name() + "' has no analytic derivatives");
  const int d = kernel.dimension();
  const Vec v = kernel.integrate(
      [&](const Vec& z, double kval, Eigen::Ref<Vec> out) {
        const KernelDerivatives kd = kernel.derivatives(z);
        const double w = f.pdf(x + h * z) / kval;
        out = HdsElement(kd.value * w, -kd.gradient * w, kd.hessian * w).flatten();
      },
      HdsElement::flat_size(d), 1e-12);
  const HdsElement e = HdsElement::unflatten(v, d);
  EstimateTriple out;
  out.value = e.c;
  out.gradient = e.b / h;
  out.hessian = e.A / (h * h);
  return out;
}

HyvarinenStats expected_hstats(const TestDensity& f, const Vec& x, const KernelSpec& kernel, double h) {
  if (!kernel.differentiable())
    throw UnsupportedError("kernel '" + kernel.name() + "' has no analytic derivatives");
  const int d = kernel.dimension();
  const Vec v = kernel.integrate(
      [&](const Vec& z, double kval, Eigen::Ref<Vec> out) {
        const KernelDerivatives kd = kernel.derivatives(z);
        const double fz = f.pdf(x + h * z);
        out(0) = fz;
        const double w = fz / kval;
        for (int j = 0; j < d; ++j) {
          out(1 + j) = kd.gradient(j) * w;
          for (int k = 0; k < d; ++k) out(1 + d + j * d + k) = kd.gradient(j) * z(k) * w;
        }
      },
      1 + d + d * d, 1e-12);
  HyvarinenStats st;
  st.q_hat = v.segment(1, d) / v(0);
  st.Q_hat = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) st.Q_hat(j, k) = v(1 + d + j * d + k) / v(0);
  return st;
}

}  // namespace

EstimateTriple expected_estimate(Paradigm p, const TestDensity& f, const Vec& x, const KernelSpec& kernel,
                                 double h, Scale scale) {
  if (!(h > 0.0)) throw DomainError("bandwidth must be positive");
  EstimateTriple e;
  switch (p) {
    case Paradigm::M:
    case Paradigm::M3:
      e = estimate_m_from_moments(MatchingPolynomials(kernel, p == Paradigm::M3),
                                  expected_local_moment_data(f, kernel, x, h), h);
      return scale == Scale::log ? density_to_logdensity(e) : e;
    case Paradigm::K:
      e = expected_kde(f, x, kernel, h);
      return scale == Scale::log ? density_to_logdensity(e) : e;
    case Paradigm::L:
      e = solve_l_from_triple(expected_moment_triple(f, kernel, x, h), kernel, h);
      return scale == Scale::density ? logdensity_to_density(e) : e;
    case Paradigm::H:
      if (scale == Scale::density) throw UnsupportedError("the Hyvarinen estimator has no density scale");
      return estimate_h_from_stats(expected_hstats(f, x, kernel, h),
                                   local_mean_cov(expected_moment_triple(f, kernel, x, h)), h);
  }
  throw DomainError("unknown paradigm");
}

BandwidthPlan BandwidthPlan::single(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("bandwidth must be positive");
  BandwidthPlan p;
  p.mode_ = Mode::single;
  p.C_ = {h, h, h};
  return p;
}

BandwidthPlan BandwidthPlan::rate(double C, int offset) {
  if (!(C > 0.0)) throw DomainError("bandwidth constant must be positive");
  if (offset != 4 && offset != 6 && offset != 8) throw DomainError("rate offset must be 4, 6 or 8");
  BandwidthPlan p;
  p.mode_ = Mode::rate;
  p.C_ = {C, C, C};
  p.offsets_ = {offset, offset, offset};
  return p;
}

BandwidthPlan BandwidthPlan::triple(std::array<double, 3> C) {
  for (double c : C)
    if (!(c > 0.0)) throw DomainError("bandwidth constants must be positive");
  BandwidthPlan p;
  p.mode_ = Mode::triple;
  p.C_ = C;
  p.offsets_ = {4, 6, 8};
  return p;
}

BandwidthPlan BandwidthPlan::equal_triple(double C, int offset) {
  BandwidthPlan p = rate(C, offset);
  p.mode_ = Mode::triple;
  return p;
}

double BandwidthPlan::bandwidth(std::int64_t n, int d, int component) const {
  if (component < 0 || component > 2) throw DomainError("bandwidth component must be 0, 1 or 2");
  if (mode_ == Mode::single) return C_[0];
  if (n < 1) throw DomainError("sample size must be positive");
  const int j = mode_ == Mode::triple ? component : 0;
  return C_[j] * std::pow(static_cast<double>(n), -1.0 / (d + offsets_[j]));
}

std::string BandwidthPlan::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (mode_ == Mode::single) {
    os << "single h=" << C_[0];
  } else if (mode_ == Mode::rate) {
    os << "rate C=" << C_[0] << " n^(-1/(d+" << offsets_[0] << "))";
  } else {
    os << "triple";
    for (int j = 0; j < 3; ++j) os << " C" << j << "=" << C_[j] << " n^(-1/(d+" << offsets_[j] << "))";
  }
  return os.str();
}

double cross_moment(const KernelSpec& kernel, const TestDensity& f, const Vec& x, int j, int k, double hj,
                    double hk, const Vec& b, const Mat& A) {
  if (!kernel.differentiable())
    throw UnsupportedError("kernel '" + kernel.name() + "' has no analytic derivatives");
  if (j < 0 || k > 2 || j >= k) throw DomainError("cross_moment needs 0 <= j < k <= 2");
  const int d = kernel.dimension();
  const double r = hj / hk;
  auto component = [&](int c, const KernelDerivatives& kd) {
    if (c == 0) return kd.value;
    if (c == 1) return -b.dot(kd.gradient);
    return (A * kd.hessian).trace();
  };
  const Vec v = kernel.integrate(
      [&](const Vec& z, double kval, Eigen::Ref<Vec> out) {
        const KernelDerivatives kj = kernel.derivatives(z);
        const KernelDerivatives kk = kernel.derivatives(Vec(r * z));
        out(0) = component(j, kj) / kval * component(k, kk) * f.pdf(x + hj * z);
      },
      1, 1e-10);
  return std::pow(r, 0.5 * d) * v(0);
}

}  // namespace locdens

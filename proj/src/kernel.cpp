#include "locdens/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "locdens/errors.hpp"
#include "locdens/quadrature.hpp"

namespace locdens {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;
constexpr int kMaxMomentOrder = 8;

double double_factorial_odd(int k) {  // (k - 1)!! for even k
  double r = 1.0;
  for (int j = k - 1; j > 1; j -= 2) r *= j;
  return r;
}

double sphere_area(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d); }

// E(U^gamma) for U uniform on the unit sphere, all entries even.
double sphere_moment(const MultiIndex& gamma, int d) {
  const int k = order(gamma);
  double r = std::exp(std::lgamma(0.5 * d) - std::lgamma(0.5 * (d + k)));
  for (int g : gamma) r *= std::exp(std::lgamma(0.5 * (g + 1)) - std::lgamma(0.5));
  return r;
}

// Sorted descending even patterns of order <= 8 with at most d parts.
std::vector<MultiIndex> even_patterns(int d) {
  std::vector<MultiIndex> out;
  std::function<void(MultiIndex, int, int)> rec = [&](MultiIndex cur, int remaining, int maxpart) {
    out.push_back(cur);
    if (static_cast<int>(cur.size()) == d) return;
    for (int p = std::min(maxpart, remaining); p >= 2; p -= 2) {
      MultiIndex next = cur;
      next.push_back(p);
      rec(next, remaining - p, p);
    }
  };
  rec({}, kMaxMomentOrder, kMaxMomentOrder);
  return out;
}

MultiIndex pattern_of(const MultiIndex& alpha) {
  MultiIndex p;
  for (int a : alpha)
    if (a > 0) p.push_back(a);
  std::sort(p.begin(), p.end(), std::greater<int>());
  return p;
}

bool has_odd(const MultiIndex& alpha) {
  return std::any_of(alpha.begin(), alpha.end(), [](int a) { return a % 2 != 0; });
}

const int kGaussLevels[] = {6, 10, 16, 24, 32, 48, 64, 96, 128, 160};
const int kRadialLevels[] = {8, 12, 16, 24, 32, 48, 64, 96, 128};
const int kBoxLevels[] = {4, 8, 12, 16, 24, 32, 48, 64, 96};
constexpr long kMaxRuleNodes = 4'000'000;

}  // namespace

struct KernelSpec::Impl {
  int d = 1;
  KernelFamily family = KernelFamily::gaussian;
  std::string name;
  // Spherical: K(z) = scale * profile(|z| / sigma).
  RadialProfile profile;
  double scale = 1.0;
  double sigma = 1.0;
  CustomKernelDef custom;
  double norm_const = 1.0;  // Gaussian normalization
  double eps = 1.0;
  double support = kInf;
  double sup = 1.0;
  std::map<MultiIndex, double> table;
  double radial4 = std::numeric_limits<double>::quiet_NaN();
  double radial6 = std::numeric_limits<double>::quiet_NaN();

  double value(const double* z) const {
    switch (family) {
      case KernelFamily::gaussian: {
        double r2 = 0.0;
        for (int j = 0; j < d; ++j) r2 += z[j] * z[j];
        return norm_const * std::exp(-0.5 * r2);
      }
      case KernelFamily::rectangular:
        for (int j = 0; j < d; ++j)
          if (std::abs(z[j]) > 1.0) return 0.0;
        return 1.0;
      case KernelFamily::spherical: {
        double r2 = 0.0;
        for (int j = 0; j < d; ++j) r2 += z[j] * z[j];
        const double s = std::sqrt(r2) / sigma;
        if (s > profile.support) return 0.0;
        return scale * profile.value(s);
      }
      case KernelFamily::custom: {
        for (int j = 0; j < d; ++j)
          if (std::abs(z[j]) > custom.support_halfwidth) return 0.0;
        return custom.value(Eigen::Map<const Vec>(z, d));
      }
    }
    return 0.0;
  }

  double radial_integral(int k) const {
    // c_d * integral_0^R K(r) r^{k + d - 1} dr in the kernel's own scale.
    auto integrand = [&](double s) { return profile.value(s) * std::pow(s, k + d - 1); };
    double upper = profile.support;
    if (!std::isfinite(upper)) {
      upper = 1.0;
      const double head = integrate_adaptive([&](double s) {
        return profile.value(s) * std::pow(s, kMaxMomentOrder + d - 1);
      }, 0.0, upper, 1e-13);
      for (int it = 0; it < 60; ++it) {
        const double tail = integrate_adaptive([&](double s) {
          return profile.value(s) * std::pow(s, kMaxMomentOrder + d - 1);
        }, upper, 2.0 * upper, 1e-13);
        if (std::abs(tail) < 1e-12 * std::max(std::abs(head), 1e-300) && upper > 1.0) break;
        upper *= 2.0;
      }
    }
    const double base = integrate_adaptive(integrand, 0.0, upper, 1e-14);
    return sphere_area(d) * scale * base * std::pow(sigma, k + d);
  }

  double quadrature_radius() const {
    if (family != KernelFamily::spherical) return support;
    if (std::isfinite(profile.support)) return profile.support * sigma;
    double r = 1.0;
    const double k0 = profile.value(0.0);
    while (profile.value(r) > 1e-17 * k0 && r < 1e4) r *= 1.25;
    return r * sigma;
  }
};

const char* to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::spherical: return "spherical";
    case KernelFamily::rectangular: return "rectangular";
    case KernelFamily::custom: return "custom";
  }
  return "unknown";
}

KernelSpec KernelSpec::gaussian(int d) {
  if (d < 1) throw DomainError("kernel dimension must be positive");
  auto impl = std::make_shared<Impl>();
  impl->d = d;
  impl->family = KernelFamily::gaussian;
  impl->name = "gaussian";
  impl->norm_const = std::pow(2.0 * kPi, -0.5 * d);
  impl->eps = 1.0;
  impl->support = kInf;
  impl->sup = impl->norm_const;
  for (const auto& p : even_patterns(d)) {
    double m = 1.0;
    for (int a : p) m *= double_factorial_odd(a);
    impl->table[p] = m;
  }
  impl->radial4 = d * (d + 2.0);
  impl->radial6 = d * (d + 2.0) * (d + 4.0);
  return KernelSpec(std::move(impl));
}

KernelSpec KernelSpec::rectangular(int d) {
  if (d < 1) throw DomainError("kernel dimension must be positive");
  auto impl = std::make_shared<Impl>();
  impl->d = d;
  impl->family = KernelFamily::rectangular;
  impl->name = "rectangular";
  impl->eps = kInf;
  impl->support = std::sqrt(static_cast<double>(d));
  impl->sup = 1.0;
  for (const auto& p : even_patterns(d)) {
    double m = std::pow(2.0, d - static_cast<int>(p.size()));
    for (int a : p) m *= 2.0 / (a + 1.0);
    impl->table[p] = m;
  }
  return KernelSpec(std::move(impl));
}

KernelSpec KernelSpec::spherical(int d, RadialProfile profile, bool standardize) {
  if (d < 1) throw DomainError("kernel dimension must be positive");
  if (!profile.value) throw DomainError("radial profile needs a value function");
  if (static_cast<bool>(profile.slope_over_r) != static_cast<bool>(profile.curvature))
    throw DomainError("radial profile derivatives must be given together");
  auto impl = std::make_shared<Impl>();
  impl->d = d;
  impl->family = KernelFamily::spherical;
  impl->name = profile.name;
  impl->profile = std::move(profile);
  if (standardize) {
    const double m0 = impl->radial_integral(0);
    const double m2 = impl->radial_integral(2) / d;
    if (!(m0 > 0.0) || !(m2 > 0.0)) throw DomainError("radial profile has no mass");
    impl->sigma = std::sqrt(m0 / m2);
    impl->scale = 1.0 / (std::pow(impl->sigma, d) * m0);
  }
  impl->support = impl->profile.support * impl->sigma;
  impl->eps = std::isfinite(impl->support) ? kInf : impl->profile.exp_moment_radius;
  impl->sup = impl->scale * impl->profile.value(0.0);
  for (int k : {4, 6}) {
    const double v = impl->radial_integral(k);
    (k == 4 ? impl->radial4 : impl->radial6) = v;
  }
  std::map<int, double> radial;
  for (int k = 0; k <= kMaxMomentOrder; k += 2) radial[k] = impl->radial_integral(k);
  for (const auto& p : even_patterns(d)) {
    MultiIndex full(d, 0);
    std::copy(p.begin(), p.end(), full.begin());
    impl->table[p] = radial[order(p)] * sphere_moment(full, d);
  }
  return KernelSpec(std::move(impl));
}

KernelSpec KernelSpec::triweight(int d) {
  RadialProfile p;
  p.name = "triweight";
  p.support = 1.0;
  p.value = [](double r) {
    const double u = 1.0 - r * r;
    return u > 0.0 ? u * u * u : 0.0;
  };
  p.slope_over_r = [](double r) {
    const double u = 1.0 - r * r;
    return u > 0.0 ? -6.0 * u * u : 0.0;
  };
  p.curvature = [](double r) {
    const double u = 1.0 - r * r;
    return u > 0.0 ? -6.0 * u * u + 24.0 * r * r * u : 0.0;
  };
  return spherical(d, std::move(p), true);
}

KernelSpec KernelSpec::uniform_ball(int d, bool standardize) {
  RadialProfile p;
  p.name = "uniform_ball";
  p.support = 1.0;
  p.value = [](double r) { return r <= 1.0 ? 1.0 : 0.0; };
  KernelSpec k = spherical(d, std::move(p), false);
  // Plain ball kernels are normalized to unit mass; standardization also
  // fixes the radius so that marginal variances are one.
  auto impl = std::make_shared<Impl>(*k.impl_);
  const double vol = sphere_area(d) / d;
  impl->sigma = standardize ? std::sqrt(d + 2.0) : 1.0;
  impl->scale = 1.0 / (vol * std::pow(impl->sigma, d));
  impl->support = impl->sigma;
  impl->sup = impl->scale;
  impl->radial4 = impl->radial_integral(4);
  impl->radial6 = impl->radial_integral(6);
  std::map<int, double> radial;
  for (int kk = 0; kk <= kMaxMomentOrder; kk += 2) radial[kk] = impl->radial_integral(kk);
  for (auto& [pat, val] : impl->table) {
    MultiIndex full(d, 0);
    std::copy(pat.begin(), pat.end(), full.begin());
    val = radial[order(pat)] * sphere_moment(full, d);
  }
  return KernelSpec(std::move(impl));
}

KernelSpec KernelSpec::custom(int d, CustomKernelDef def) {
  if (d < 1 || d > 3) throw UnsupportedError("custom kernels are supported for d <= 3");
  if (!def.value) throw DomainError("custom kernel needs a value function");
  if (!(def.support_halfwidth > 0.0) || !std::isfinite(def.support_halfwidth))
    throw DomainError("custom kernel needs a finite positive support half-width");
  if (static_cast<bool>(def.gradient) != static_cast<bool>(def.hessian))
    throw DomainError("custom kernel derivatives must be given together");
  auto impl = std::make_shared<Impl>();
  impl->d = d;
  impl->family = KernelFamily::custom;
  impl->name = def.name;
  impl->custom = std::move(def);
  impl->support = impl->custom.support_halfwidth * std::sqrt(static_cast<double>(d));
  impl->eps = impl->custom.exp_moment_radius;
  impl->sup = impl->custom.value(Vec::Zero(d));
  KernelSpec k(impl);
  const auto patterns = even_patterns(d);
  const Vec vals = k.integrate(
      [&](const Vec& z, double, Eigen::Ref<Vec> out) {
        for (std::size_t i = 0; i < patterns.size(); ++i) {
          double m = 1.0;
          for (std::size_t j = 0; j < patterns[i].size(); ++j) m *= std::pow(z(j), patterns[i][j]);
          out(i) = m;
        }
      },
      static_cast<int>(patterns.size()), 1e-12);
  for (std::size_t i = 0; i < patterns.size(); ++i) impl->table[patterns[i]] = vals(i);
  return k;
}

int KernelSpec::dimension() const { return impl_->d; }
KernelFamily KernelSpec::family() const { return impl_->family; }
const std::string& KernelSpec::name() const { return impl_->name; }
bool KernelSpec::is_spherical() const {
  return impl_->family == KernelFamily::gaussian || impl_->family == KernelFamily::spherical;
}
bool KernelSpec::symmetric() const {
  return impl_->family != KernelFamily::custom || impl_->custom.symmetric;
}
bool KernelSpec::differentiable() const {
  switch (impl_->family) {
    case KernelFamily::gaussian: return true;
    case KernelFamily::rectangular: return false;
    case KernelFamily::spherical: return static_cast<bool>(impl_->profile.slope_over_r);
    case KernelFamily::custom: return static_cast<bool>(impl_->custom.gradient);
  }
  return false;
}
bool KernelSpec::closed_form_moments() const {
  return impl_->family == KernelFamily::gaussian || impl_->family == KernelFamily::rectangular;
}
double KernelSpec::exp_moment_radius() const { return impl_->eps; }
double KernelSpec::support_radius() const { return impl_->support; }
double KernelSpec::sup_value() const { return impl_->sup; }

double KernelSpec::operator()(const Vec& z) const {
  if (z.size() != impl_->d) throw DomainError("kernel argument has wrong dimension");
  return impl_->value(z.data());
}

double KernelSpec::value(const double* z) const { return impl_->value(z); }

double KernelSpec::evaluate(const Vec& z, double h) const {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("bandwidth must be positive");
  if (z.size() != impl_->d) throw DomainError("kernel argument has wrong dimension");
  if (!z.allFinite()) throw DomainError("kernel argument must be finite");
  const Vec u = z / h;
  return impl_->value(u.data()) / std::pow(h, impl_->d);
}

void KernelSpec::derivatives(const double* z, double* value, double* grad, double* hess) const {
  const int d = impl_->d;
  switch (impl_->family) {
    case KernelFamily::gaussian: {
      const double k = impl_->value(z);
      *value = k;
      for (int j = 0; j < d; ++j) {
        grad[j] = -k * z[j];
        for (int l = 0; l < d; ++l) hess[j * d + l] = k * (z[j] * z[l] - (j == l ? 1.0 : 0.0));
      }
      return;
    }
    case KernelFamily::spherical: {
      if (!impl_->profile.slope_over_r)
        throw UnsupportedError("kernel '" + impl_->name + "' has no derivative evaluators");
      double r2 = 0.0;
      for (int j = 0; j < d; ++j) r2 += z[j] * z[j];
      const double s = std::sqrt(r2) / impl_->sigma;
      *value = impl_->value(z);
      if (s > impl_->profile.support) {
        std::fill(grad, grad + d, 0.0);
        std::fill(hess, hess + d * d, 0.0);
        return;
      }
      const double sg2 = impl_->sigma * impl_->sigma;
      const double sor = impl_->scale / sg2 * impl_->profile.slope_over_r(s);
      const double curv = impl_->scale / sg2 * impl_->profile.curvature(s);
      for (int j = 0; j < d; ++j) {
        grad[j] = sor * z[j];
        for (int l = 0; l < d; ++l) {
          const double p = r2 > 0.0 ? z[j] * z[l] / r2 : 0.0;
          hess[j * d + l] = curv * p + sor * ((j == l ? 1.0 : 0.0) - p);
        }
      }
      return;
    }
    case KernelFamily::custom: {
      if (!impl_->custom.gradient)
        throw UnsupportedError("kernel '" + impl_->name + "' has no derivative evaluators");
      const Eigen::Map<const Vec> zv(z, d);
      *value = impl_->value(z);
      if (zv.cwiseAbs().maxCoeff() > impl_->custom.support_halfwidth) {
        std::fill(grad, grad + d, 0.0);
        std::fill(hess, hess + d * d, 0.0);
        return;
      }
      const Vec g = impl_->custom.gradient(zv);
      const Mat H = impl_->custom.hessian(zv);
      for (int j = 0; j < d; ++j) {
        grad[j] = g(j);
        for (int l = 0; l < d; ++l) hess[j * d + l] = 0.5 * (H(j, l) + H(l, j));
      }
      return;
    }
    case KernelFamily::rectangular:
      break;
  }
  throw UnsupportedError("kernel '" + impl_->name + "' is not differentiable");
}

KernelDerivatives KernelSpec::derivatives(const Vec& z) const {
  const int d = impl_->d;
  if (z.size() != d) throw DomainError("kernel argument has wrong dimension");
  KernelDerivatives out;
  out.gradient.resize(d);
  out.hessian.resize(d, d);
  // Mat is column-major; the Hessian is symmetric so the layout does not matter.
  derivatives(z.data(), &out.value, out.gradient.data(), out.hessian.data());
  return out;
}

double KernelSpec::moment(const MultiIndex& alpha) const {
  const int d = impl_->d;
  if (static_cast<int>(alpha.size()) != d) throw DomainError("multi-index has wrong dimension");
  const int k = order(alpha);
  if (k > kMaxMomentOrder) throw DomainError("moments are available up to order 8");
  if (symmetric() && has_odd(alpha)) return 0.0;
  if (!has_odd(alpha)) return impl_->table.at(pattern_of(alpha));
  const Vec v = integrate(
      [&](const Vec& z, double, Eigen::Ref<Vec> out) {
        double m = 1.0;
        for (int j = 0; j < d; ++j) m *= std::pow(z(j), alpha[j]);
        out(0) = m;
      },
      1, 1e-12);
  return v(0);
}

double KernelSpec::special_moment(std::initializer_list<int> pattern) const {
  MultiIndex p(pattern);
  auto it = impl_->table.find(p);
  if (it == impl_->table.end())
    throw DomainError("moment pattern not available in dimension " + std::to_string(impl_->d));
  return it->second;
}

const std::map<MultiIndex, double>& KernelSpec::moment_table() const { return impl_->table; }

std::pair<double, double> KernelSpec::radial_moments() const {
  if (!is_spherical()) throw UnsupportedError("radial moments need a spherical kernel");
  return {impl_->radial4, impl_->radial6};
}

double KernelSpec::radial_moment(int k) const {
  if (!is_spherical()) throw UnsupportedError("radial moments need a spherical kernel");
  if (impl_->family == KernelFamily::gaussian) {
    // E R^k = 2^{k/2} Gamma((d+k)/2) / Gamma(d/2)
    const int d = impl_->d;
    return std::exp(0.5 * k * std::log(2.0) + std::lgamma(0.5 * (d + k)) - std::lgamma(0.5 * d));
  }
  return impl_->radial_integral(k);
}

int KernelSpec::max_rule_level() const {
  switch (impl_->family) {
    case KernelFamily::gaussian: return static_cast<int>(std::size(kGaussLevels)) - 1;
    case KernelFamily::spherical: return static_cast<int>(std::size(kRadialLevels)) - 1;
    default: return static_cast<int>(std::size(kBoxLevels)) - 1;
  }
}

KernelRule KernelSpec::rule(int level) const {
  const int d = impl_->d;
  level = std::clamp(level, 0, max_rule_level());
  std::vector<Vec> nodes;
  std::vector<double> leb;  // Lebesgue weights

  auto tensor = [&](const Rule1D& r1) {
    const long m = static_cast<long>(r1.nodes.size());
    long total = 1;
    for (int j = 0; j < d; ++j) total *= m;
    if (total > kMaxRuleNodes) throw NumericError("cubature rule too large", static_cast<double>(total));
    std::vector<long> idx(d, 0);
    for (long t = 0; t < total; ++t) {
      Vec z(d);
      double w = 1.0;
      for (int j = 0; j < d; ++j) {
        z(j) = r1.nodes[idx[j]];
        w *= r1.weights[idx[j]];
      }
      nodes.push_back(z);
      leb.push_back(w);
      for (int j = 0; j < d; ++j) {
        if (++idx[j] < m) break;
        idx[j] = 0;
      }
    }
  };

  KernelRule out;
  switch (impl_->family) {
    case KernelFamily::gaussian: {
      tensor(gauss_hermite(kGaussLevels[level]));
      // Gauss-Hermite weights already integrate against K.
      const long N = static_cast<long>(nodes.size());
      out.nodes.resize(d, N);
      out.weights.resize(N);
      out.kvalues.resize(N);
      for (long i = 0; i < N; ++i) {
        out.nodes.col(i) = nodes[i];
        out.weights(i) = leb[i];
        out.kvalues(i) = impl_->value(nodes[i].data());
      }
      return out;
    }
    case KernelFamily::rectangular:
      tensor(gauss_legendre(kBoxLevels[level], -1.0, 1.0));
      break;
    case KernelFamily::custom:
      tensor(gauss_legendre(kBoxLevels[level], -impl_->custom.support_halfwidth,
                            impl_->custom.support_halfwidth));
      break;
    case KernelFamily::spherical: {
      if (d > 3) throw UnsupportedError("cubature for spherical kernels is limited to d <= 3");
      const int mr = kRadialLevels[level];
      const Rule1D rad = gauss_legendre(mr, 0.0, impl_->quadrature_radius());
      if (d == 1) {
        for (int i = 0; i < mr; ++i)
          for (double sgn : {-1.0, 1.0}) {
            nodes.push_back(Vec::Constant(1, sgn * rad.nodes[i]));
            leb.push_back(rad.weights[i]);
          }
      } else if (d == 2) {
        const int mt = 2 * mr;
        for (int i = 0; i < mr; ++i)
          for (int t = 0; t < mt; ++t) {
            const double th = 2.0 * kPi * (t + 0.5) / mt;
            Vec z(2);
            z << rad.nodes[i] * std::cos(th), rad.nodes[i] * std::sin(th);
            nodes.push_back(z);
            leb.push_back(rad.weights[i] * rad.nodes[i] * 2.0 * kPi / mt);
          }
      } else {
        const Rule1D cz = gauss_legendre(mr, -1.0, 1.0);
        const int mp = 2 * mr;
        for (int i = 0; i < mr; ++i)
          for (int c = 0; c < mr; ++c)
            for (int t = 0; t < mp; ++t) {
              const double ph = 2.0 * kPi * (t + 0.5) / mp;
              const double st = std::sqrt(1.0 - cz.nodes[c] * cz.nodes[c]);
              Vec z(3);
              z << rad.nodes[i] * st * std::cos(ph), rad.nodes[i] * st * std::sin(ph),
                  rad.nodes[i] * cz.nodes[c];
              nodes.push_back(z);
              leb.push_back(rad.weights[i] * rad.nodes[i] * rad.nodes[i] * cz.weights[c] * 2.0 * kPi / mp);
            }
      }
      break;
    }
  }
  std::vector<long> keep;
  std::vector<double> kv(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    kv[i] = impl_->value(nodes[i].data());
    if (kv[i] > 0.0) keep.push_back(static_cast<long>(i));
  }
  const long N = static_cast<long>(keep.size());
  out.nodes.resize(d, N);
  out.weights.resize(N);
  out.kvalues.resize(N);
  for (long t = 0; t < N; ++t) {
    const long i = keep[t];
    out.nodes.col(t) = nodes[i];
    out.weights(t) = leb[i] * kv[i];
    out.kvalues(t) = kv[i];
  }
  return out;
}

Vec KernelSpec::integrate(const KernelIntegrand& fn, int out_dim, double tol) const {
  Vec prev;
  Vec buf(out_dim);
  double last_diff = kInf;
  for (int level = 0; level <= max_rule_level(); ++level) {
    KernelRule r;
    try {
      r = rule(level);
    } catch (const NumericError&) {
      break;
    }
    Vec acc = Vec::Zero(out_dim);
    Vec mass = Vec::Zero(out_dim);  // integral of |integrand|, the scale for cancelling components
    Vec z(impl_->d);
    for (Eigen::Index i = 0; i < r.weights.size(); ++i) {
      z = r.nodes.col(i);
      buf.setZero();
      fn(z, r.kvalues(i), buf);
      acc += r.weights(i) * buf;
      mass += std::abs(r.weights(i)) * buf.cwiseAbs();
    }
    if (!acc.allFinite()) throw NumericError("non-finite cubature result", kInf);
    if (prev.size() == out_dim) {
      const double scale = std::max(mass.maxCoeff(), 1e-300);
      last_diff = (acc - prev).cwiseAbs().maxCoeff();
      if (last_diff <= tol * scale) return acc;
    }
    prev = acc;
  }
  throw NumericError("kernel cubature did not converge", last_diff);
}

double evaluate(const KernelSpec& kernel, const Vec& z, double h) { return kernel.evaluate(z, h); }
double kernel_moment(const KernelSpec& kernel, const MultiIndex& alpha) { return kernel.moment(alpha); }
std::pair<double, double> radial_moments(const KernelSpec& kernel) { return kernel.radial_moments(); }

bool ConditionReport::all_pass() const {
  return normalized.pass && symmetric.pass && unit_variance.pass && differentiable.pass && exp_moment.pass;
}

ConditionReport check_conditions(const KernelSpec& kernel) {
  ConditionReport rep;
  const int d = kernel.dimension();
  const double tol = kernel.closed_form_moments() ? 1e-8 : 1e-6;
  const double mu0 = kernel.special_moment({});
  const double mu2 = kernel.special_moment({2});
  rep.normalized = {std::abs(mu0 - 1.0) <= tol, mu0 - 1.0, "mu_0 = " + std::to_string(mu0)};
  rep.unit_variance = {std::abs(mu2 - 1.0) <= tol, mu2 - 1.0, "mu_2 = " + std::to_string(mu2)};

  std::mt19937_64 rng(0x5eed1234ULL);
  const double box = std::isfinite(kernel.support_radius()) ? kernel.support_radius() : 3.0;
  std::uniform_real_distribution<double> unif(-box, box);
  double worst = 0.0;
  std::vector<int> perm(d);
  for (int t = 0; t < 256; ++t) {
    Vec z(d);
    for (int j = 0; j < d; ++j) z(j) = unif(rng);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Vec w(d);
    for (int j = 0; j < d; ++j) w(j) = ((rng() & 1u) ? -1.0 : 1.0) * z(perm[j]);
    const double a = kernel(z), b = kernel(w);
    const double rel = std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
    worst = std::max(worst, a == b ? 0.0 : rel);
  }
  rep.symmetric = {worst <= 1e-12, worst, "256-point orbit test"};

  rep.differentiable = {kernel.differentiable(), 0.0,
                        kernel.differentiable() ? "analytic derivatives" : "no derivative evaluators"};

  const double eps = kernel.exp_moment_radius();
  if (!(eps > 0.0)) {
    rep.exp_moment = {false, 0.0, "no positive exponential moment radius"};
  } else {
    const double e = std::isfinite(eps) ? 0.5 * eps : 1.0;
    double val = kInf;
    try {
      if (kernel.family() == KernelFamily::gaussian) {
        val = std::pow(1.0 - e, -0.5 * d);
      } else {
        val = kernel.integrate(
            [&](const Vec& z, double, Eigen::Ref<Vec> out) { out(0) = std::exp(0.5 * e * z.squaredNorm()); },
            1, 1e-9)(0);
      }
    } catch (const NumericError&) {
      val = kInf;
    }
    rep.exp_moment = {std::isfinite(val), val,
                      "epsilon(K) = " + (std::isfinite(eps) ? std::to_string(eps) : std::string("inf"))};
  }
  return rep;
}

}  // namespace locdens

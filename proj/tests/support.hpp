#pragma once

#include <cmath>
#include <cstdint>

#include "locdens/kernel.hpp"
#include "locdens/stats.hpp"
#include "locdens/test_density.hpp"
#include "locdens/types.hpp"

namespace locdens::testing {

inline Dataset normal_data(std::int64_t n, int d, std::uint64_t seed) {
  Rng rng(seed);
  return Dataset(TestDensity::standard_normal(d).sample(n, rng));
}

inline Dataset sample_data(const TestDensity& f, std::int64_t n, std::uint64_t seed) {
  Rng rng(seed);
  return Dataset(f.sample(n, rng));
}

inline Vec point(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

inline double uniform(Rng& rng, double lo = -1.0, double hi = 1.0) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline Vec random_vec(int d, Rng& rng, double scale = 1.0) {
  Vec v(d);
  for (int j = 0; j < d; ++j) v(j) = scale * uniform(rng);
  return v;
}

inline Mat random_sym(int d, Rng& rng, double scale = 1.0) {
  Mat a(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k <= j; ++k) a(j, k) = a(k, j) = scale * uniform(rng);
  return a;
}

inline Mat random_spd(int d, Rng& rng) {
  Mat g(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) g(j, k) = uniform(rng);
  return g * g.transpose() + 0.5 * Mat::Identity(d, d);
}

inline HdsElement random_element(int d, Rng& rng, double scale = 1.0) {
  return HdsElement(scale * uniform(rng), random_vec(d, rng, scale), random_sym(d, rng, scale));
}

// Plain double loop, no compensation: n^{-1} sum K_h(X_i - x) z_i^alpha.
inline double naive_local_moment(const Dataset& data, const KernelSpec& kernel, const Vec& x, double h,
                                 const MultiIndex& alpha) {
  double acc = 0.0;
  for (std::int64_t i = 0; i < data.n(); ++i) {
    Vec z(data.d());
    for (int j = 0; j < data.d(); ++j) z(j) = (data.row(i)[j] - x(j)) / h;
    double mono = 1.0;
    for (int j = 0; j < data.d(); ++j) mono *= std::pow(z(j), alpha[j]);
    acc += kernel(z) * mono;
  }
  return acc / (static_cast<double>(data.n()) * std::pow(h, data.d()));
}

inline double max_abs_diff(const HdsElement& a, const HdsElement& b) { return (a - b).max_abs(); }

}  // namespace locdens::testing

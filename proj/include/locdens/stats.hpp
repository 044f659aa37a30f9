#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace locdens {

std::uint64_t splitmix64(std::uint64_t x);

//! Independent stream seed for replication (a, b) of a run seeded with seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

//! Ordinary least squares y = intercept + slope * x.
LineFit ols(const std::vector<double>& x, const std::vector<double>& y);

double mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);
double correlation(const std::vector<double>& a, const std::vector<double>& b);

struct NormalityTest {
  double a2 = 0.0;       // Anderson-Darling statistic
  double a2_star = 0.0;  // small-sample adjusted statistic
  double p_value = 0.0;
};

//! Anderson-Darling test for normality with estimated mean and variance.
NormalityTest anderson_darling_normal(std::vector<double> sample);

//! Runs fn(i) for i in [0, n) on up to threads workers. fn must only write
//! to slots owned by i, which makes results independent of the worker count.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn);

}  // namespace locdens

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "locdens/asymptotics.hpp"
#include "locdens/estimators.hpp"
#include "locdens/stats.hpp"

namespace locdens {

struct SeriesSpec {
  Paradigm paradigm = Paradigm::M;
  Target target = Target::value;
  Scale scale = Scale::density;

  std::string label() const;
};

struct RateRecord {
  SeriesSpec series;
  std::int64_t n = 0;
  double h = 0.0;
  double bias = 0.0;     // norm of mean error
  double stderr_ = 0.0;  // standard error of the mean estimate
  double rmse = 0.0;
  int failures = 0;
};

struct SlopeFit {
  SeriesSpec series;
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int points = 0;
};

struct RateReport {
  std::vector<RateRecord> records;
  std::vector<SlopeFit> fits;
  std::uint64_t seed = 0;
  int reps = 0;
  std::string density;
  std::string kernel;
  std::string plan;

  const SlopeFit& fit(const SeriesSpec& s) const;
  //! Columns paradigm, target, n, h, bias, stderr, rmse.
  std::string to_csv() const;
  std::string to_json() const;
  //! One block per series of (log n, log rmse) pairs.
  std::string plot_data() const;
};

struct RateConfig {
  RateConfig(TestDensity f, Vec x0, KernelSpec kernel, BandwidthPlan plan)
      : f(std::move(f)), x0(std::move(x0)), kernel(std::move(kernel)), plan(plan) {}

  TestDensity f;
  Vec x0;
  KernelSpec kernel;
  BandwidthPlan plan;
  std::vector<std::int64_t> ns;
  int reps = 500;
  std::uint64_t seed = 1;
  int threads = 1;
  double failure_budget = 0.01;
  int bootstrap = 1000;
};

//! Simulates reps datasets per n, shared by all series, and fits log rmse
//! against log n. Throws ExperimentError when a series exceeds the failure budget.
RateReport rate_experiment(const std::vector<SeriesSpec>& series, const RateConfig& cfg);
RateReport rate_experiment(Paradigm p, Target t, const RateConfig& cfg);

struct BiasCurve {
  SeriesSpec series;
  std::vector<double> hs;
  std::vector<double> abs_bias;
  LineFit fit;  // log |bias| against log h
};

//! |E estimate - truth| by cubature for each h, no sampling.
BiasCurve deterministic_bias_curve(const SeriesSpec& s, const TestDensity& f, const Vec& x0,
                                   const KernelSpec& kernel, const std::vector<double>& hs);

struct NormalityConfig {
  NormalityConfig(TestDensity f, Vec x0, KernelSpec kernel) : f(std::move(f)), x0(std::move(x0)), kernel(std::move(kernel)) {}

  TestDensity f;
  Vec x0;
  KernelSpec kernel;
  Paradigm paradigm = Paradigm::K;
  double h = 0.1;
  std::int64_t n = 100000;
  int reps = 2000;
  std::uint64_t seed = 1;
  int threads = 1;
  double failure_budget = 0.01;
  std::vector<HdsElement> directions;
};

struct DirectionResult {
  HdsElement direction;
  double empirical_variance = 0.0;
  double predicted_variance = 0.0;
  double relative_error = 0.0;
  NormalityTest test;
};

struct NormalityReport {
  std::vector<DirectionResult> directions;
  int failures = 0;
};

//! Replicates (n h^d)^{1/2} <Y, H> with Y = scaled estimate minus its cubature
//! expectation, and compares with f(x0) Sigma(H).
NormalityReport normality_experiment(const NormalityConfig& cfg);

struct TripleConfig {
  TripleConfig(TestDensity f, Vec x0, KernelSpec kernel, BandwidthPlan plan)
      : f(std::move(f)), x0(std::move(x0)), kernel(std::move(kernel)), plan(plan) {}

  TestDensity f;
  Vec x0;
  KernelSpec kernel;
  BandwidthPlan plan;
  std::int64_t n = 100000;
  int reps = 500;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct TripleReport {
  std::array<double, 3> h{};
  //! Correlations of (value, first gradient, first Hessian diagonal) components.
  Mat correlation;
};

//! Kernel density value, gradient and Hessian, each at its own bandwidth.
TripleReport triple_bandwidth_experiment(const TripleConfig& cfg);

}  // namespace locdens

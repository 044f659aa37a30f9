#include "locdens/experiments.hpp"

#include <algorithm>
#include <boost/random/uniform_int_distribution.hpp>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "locdens/errors.hpp"
#include "locdens/kde.hpp"

namespace locdens {

std::string SeriesSpec::label() const {
  return std::string(to_string(paradigm)) + "/" + to_string(target) + "/" + to_string(scale);
}

namespace {

bool same_series(const SeriesSpec& a, const SeriesSpec& b) {
  return a.paradigm == b.paradigm && a.target == b.target && a.scale == b.scale;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Target components of an estimate, the Hessian as all d*d entries.
Vec target_vector(Target t, const EstimateTriple& e) {
  switch (t) {
    case Target::value: return Vec::Constant(1, e.value);
    case Target::gradient: return e.gradient;
    case Target::hessian: return Eigen::Map<const Vec>(e.hessian.data(), e.hessian.size());
  }
  return {};
}

struct Cell {
  std::vector<Vec> errors;  // one per successful replication
  int failures = 0;
};

double rmse_of(const std::vector<Vec>& errs, const std::vector<std::size_t>& idx) {
  double s = 0.0;
  for (std::size_t i : idx) s += errs[i].squaredNorm();
  return std::sqrt(s / static_cast<double>(idx.size()));
}

}  // namespace

const SlopeFit& RateReport::fit(const SeriesSpec& s) const {
  for (const auto& f : fits)
    if (same_series(f.series, s)) return f;
  throw DomainError("no slope fit for series " + s.label());
}

std::string RateReport::to_csv() const {
  std::ostringstream os;
  os << "paradigm,target,scale,n,h,bias,stderr,rmse,failures\n";
  for (const auto& r : records)
    os << to_string(r.series.paradigm) << ',' << to_string(r.series.target) << ',' << to_string(r.series.scale)
       << ',' << r.n << ',' << fmt(r.h) << ',' << fmt(r.bias) << ',' << fmt(r.stderr_) << ',' << fmt(r.rmse)
       << ',' << r.failures << '\n';
  return os.str();
}

std::string RateReport::to_json() const {
  nlohmann::ordered_json j;
  j["library_version"] = LOCDENS_VERSION;
  j["seed"] = seed;
  j["reps"] = reps;
  j["density"] = density;
  j["kernel"] = kernel;
  j["plan"] = plan;
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : records)
    j["records"].push_back({{"paradigm", to_string(r.series.paradigm)},
                            {"target", to_string(r.series.target)},
                            {"scale", to_string(r.series.scale)},
                            {"n", r.n},
                            {"h", r.h},
                            {"bias", r.bias},
                            {"stderr", r.stderr_},
                            {"rmse", r.rmse},
                            {"failures", r.failures}});
  j["fits"] = nlohmann::ordered_json::array();
  for (const auto& f : fits)
    j["fits"].push_back({{"paradigm", to_string(f.series.paradigm)},
                         {"target", to_string(f.series.target)},
                         {"scale", to_string(f.series.scale)},
                         {"slope", f.slope},
                         {"intercept", f.intercept},
                         {"ci_low", f.ci_low},
                         {"ci_high", f.ci_high},
                         {"points", f.points}});
  return j.dump(2) + "\n";
}

std::string RateReport::plot_data() const {
  std::ostringstream os;
  for (const auto& f : fits) {
    os << "# " << f.series.label() << " slope=" << fmt(f.slope) << "\n";
    os << "# log_n log_rmse\n";
    for (const auto& r : records)
      if (same_series(r.series, f.series))
        os << fmt(std::log(static_cast<double>(r.n))) << ' ' << fmt(std::log(r.rmse)) << '\n';
    os << "\n\n";
  }
  return os.str();
}

RateReport rate_experiment(const std::vector<SeriesSpec>& series, const RateConfig& cfg) {
  if (series.empty()) throw DomainError("no series requested");
  if (cfg.reps < 100) throw DomainError("rate experiments need at least 100 replications");
  if (cfg.ns.size() < 4) throw DomainError("slope fits need at least 4 sample sizes");
  const int d = cfg.f.dimension();
  if (cfg.kernel.dimension() != d || cfg.x0.size() != d) throw DomainError("dimension mismatch");
  const std::size_t S = series.size(), N = cfg.ns.size();
  const auto reps = static_cast<std::size_t>(cfg.reps);

  std::vector<double> hs(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (cfg.ns[i] < 1) throw DomainError("sample sizes must be positive");
    hs[i] = cfg.plan.bandwidth(cfg.ns[i], d);
  }
  std::vector<Vec> truth(S);
  for (std::size_t s = 0; s < S; ++s) truth[s] = target_vector(series[s].target, cfg.f.truth(cfg.x0, series[s].scale));

  // Slot (s, i, r) holds the error vector, empty on failure.
  std::vector<Vec> slots(S * N * reps);
  parallel_for(static_cast<std::int64_t>(N * reps), cfg.threads, [&](std::int64_t job) {
    const std::size_t i = static_cast<std::size_t>(job) / reps, r = static_cast<std::size_t>(job) % reps;
    Rng rng(stream_seed(cfg.seed, i, r));
    const Dataset data(cfg.f.sample(cfg.ns[i], rng));
    PointEvaluator ev(data, cfg.kernel, cfg.x0, hs[i]);
    for (std::size_t s = 0; s < S; ++s) {
      try {
        const EstimateTriple e = ev.estimate(series[s].paradigm, series[s].scale);
        Vec err = target_vector(series[s].target, e) - truth[s];
        if (err.allFinite()) slots[(s * N + i) * reps + r] = std::move(err);
      } catch (const Error&) {
      }
    }
  });

  RateReport rep;
  rep.seed = cfg.seed;
  rep.reps = cfg.reps;
  rep.density = cfg.f.describe();
  rep.kernel = cfg.kernel.name();
  rep.plan = cfg.plan.describe();
  for (std::size_t s = 0; s < S; ++s) {
    std::vector<Cell> cells(N);
    std::vector<double> logn, logr;
    for (std::size_t i = 0; i < N; ++i) {
      Cell& c = cells[i];
      for (std::size_t r = 0; r < reps; ++r) {
        Vec& v = slots[(s * N + i) * reps + r];
        if (v.size() == 0)
          ++c.failures;
        else
          c.errors.push_back(std::move(v));
      }
      if (c.failures > cfg.failure_budget * cfg.reps)
        throw ExperimentError(series[s].label() + ": " + std::to_string(c.failures) + " of " +
                              std::to_string(cfg.reps) + " replications failed at n=" + std::to_string(cfg.ns[i]));
      const double m = static_cast<double>(c.errors.size());
      Vec sum = Vec::Zero(c.errors.front().size());
      double sq = 0.0;
      for (const Vec& e : c.errors) {
        sum += e;
        sq += e.squaredNorm();
      }
      const Vec mean_err = sum / m;
      double var = 0.0;
      for (const Vec& e : c.errors) var += (e - mean_err).squaredNorm();
      var /= std::max(m - 1.0, 1.0);
      RateRecord rec;
      rec.series = series[s];
      rec.n = cfg.ns[i];
      rec.h = hs[i];
      rec.bias = mean_err.norm();
      rec.stderr_ = std::sqrt(var / m);
      rec.rmse = std::sqrt(sq / m);
      rec.failures = c.failures;
      rep.records.push_back(rec);
      logn.push_back(std::log(static_cast<double>(cfg.ns[i])));
      logr.push_back(std::log(rec.rmse));
    }
    SlopeFit fit;
    fit.series = series[s];
    const LineFit lf = ols(logn, logr);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.points = static_cast<int>(N);

    std::vector<double> boot(static_cast<std::size_t>(std::max(cfg.bootstrap, 0)));
    parallel_for(static_cast<std::int64_t>(boot.size()), cfg.threads, [&](std::int64_t b) {
      Rng rng(stream_seed(cfg.seed ^ 0xb0075742ULL, s, static_cast<std::uint64_t>(b)));
      std::vector<double> y(N);
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < N; ++i) {
        const std::size_t m = cells[i].errors.size();
        boost::random::uniform_int_distribution<std::size_t> pick(0, m - 1);
        idx.resize(m);
        for (auto& k : idx) k = pick(rng);
        y[i] = std::log(rmse_of(cells[i].errors, idx));
      }
      boot[static_cast<std::size_t>(b)] = ols(logn, y).slope;
    });
    if (!boot.empty()) {
      std::sort(boot.begin(), boot.end());
      const auto at = [&](double q) {
        return boot[std::min(boot.size() - 1, static_cast<std::size_t>(q * static_cast<double>(boot.size())))];
      };
      fit.ci_low = at(0.025);
      fit.ci_high = at(0.975);
    } else {
      fit.ci_low = fit.ci_high = fit.slope;
    }
    rep.fits.push_back(fit);
  }
  return rep;
}

RateReport rate_experiment(Paradigm p, Target t, const RateConfig& cfg) {
  const Scale scale = p == Paradigm::L || p == Paradigm::H ? Scale::log : Scale::density;
  return rate_experiment({SeriesSpec{p, t, scale}}, cfg);
}

BiasCurve deterministic_bias_curve(const SeriesSpec& s, const TestDensity& f, const Vec& x0,
                                   const KernelSpec& kernel, const std::vector<double>& hs) {
  if (hs.size() < 4) throw DomainError("slope fits need at least 4 bandwidths");
  BiasCurve c;
  c.series = s;
  c.hs = hs;
  const EstimateTriple truth = f.truth(x0, s.scale);
  std::vector<double> lh, lb;
  for (double h : hs) {
    const EstimateTriple e = expected_estimate(s.paradigm, f, x0, kernel, h, s.scale);
    const double b = target_error(s.target, e, truth);
    c.abs_bias.push_back(b);
    lh.push_back(std::log(h));
    lb.push_back(std::log(b));
  }
  c.fit = ols(lh, lb);
  return c;
}

NormalityReport normality_experiment(const NormalityConfig& cfg) {
  if (cfg.directions.empty()) throw DomainError("no directions given");
  if (cfg.reps < 100) throw DomainError("normality experiments need at least 100 replications");
  const int d = cfg.f.dimension();
  const Scale scale = cfg.paradigm == Paradigm::L ? Scale::log : Scale::density;
  const BiasProfile profile = bias_constants(cfg.paradigm, cfg.f, cfg.x0, cfg.kernel);
  const HdsElement center = expected_estimate(cfg.paradigm, cfg.f, cfg.x0, cfg.kernel, cfg.h, scale).scaled(cfg.h);
  const double root = std::sqrt(static_cast<double>(cfg.n) * std::pow(cfg.h, d));
  const std::size_t D = cfg.directions.size(), reps = static_cast<std::size_t>(cfg.reps);

  std::vector<double> values(D * reps, std::numeric_limits<double>::quiet_NaN());
  parallel_for(cfg.reps, cfg.threads, [&](std::int64_t r) {
    Rng rng(stream_seed(cfg.seed, 0, static_cast<std::uint64_t>(r)));
    const Dataset data(cfg.f.sample(cfg.n, rng));
    try {
      const HdsElement y = estimate(cfg.paradigm, data, cfg.kernel, cfg.x0, cfg.h, scale).scaled(cfg.h) - center;
      for (std::size_t k = 0; k < D; ++k) values[k * reps + static_cast<std::size_t>(r)] = root * y.inner(cfg.directions[k]);
    } catch (const Error&) {
    }
  });

  NormalityReport rep;
  for (std::size_t r = 0; r < reps; ++r)
    if (!std::isfinite(values[r])) ++rep.failures;
  if (rep.failures > cfg.failure_budget * cfg.reps)
    throw ExperimentError(std::to_string(rep.failures) + " of " + std::to_string(cfg.reps) + " replications failed");
  const double fx = cfg.f.pdf(cfg.x0);
  for (std::size_t k = 0; k < D; ++k) {
    std::vector<double> v;
    for (std::size_t r = 0; r < reps; ++r)
      if (std::isfinite(values[k * reps + r])) v.push_back(values[k * reps + r]);
    DirectionResult res;
    res.direction = cfg.directions[k];
    res.empirical_variance = sample_variance(v);
    res.predicted_variance = variance_functional(profile, cfg.directions[k], fx);
    res.relative_error = std::abs(res.empirical_variance / res.predicted_variance - 1.0);
    res.test = anderson_darling_normal(v);
    rep.directions.push_back(res);
  }
  return rep;
}

TripleReport triple_bandwidth_experiment(const TripleConfig& cfg) {
  if (cfg.plan.mode() != BandwidthPlan::Mode::triple) throw DomainError("triple experiments need a triple plan");
  if (cfg.reps < 100) throw DomainError("triple experiments need at least 100 replications");
  const int d = cfg.f.dimension();
  TripleReport rep;
  for (int j = 0; j < 3; ++j) rep.h[j] = cfg.plan.bandwidth(cfg.n, d, j);
  const auto reps = static_cast<std::size_t>(cfg.reps);
  std::vector<double> comp(3 * reps);
  parallel_for(cfg.reps, cfg.threads, [&](std::int64_t r) {
    Rng rng(stream_seed(cfg.seed, 1, static_cast<std::uint64_t>(r)));
    const Dataset data(cfg.f.sample(cfg.n, rng));
    EstimateTriple e[3];
    for (int j = 0; j < 3; ++j)
      e[j] = (j > 0 && rep.h[j] == rep.h[j - 1]) ? e[j - 1] : estimate_k(data, cfg.kernel, cfg.x0, rep.h[j]);
    const auto i = static_cast<std::size_t>(r);
    auto root = [&](int j) { return std::sqrt(static_cast<double>(cfg.n) * std::pow(rep.h[j], d)); };
    comp[i] = root(0) * e[0].value;
    comp[reps + i] = root(1) * rep.h[1] * e[1].gradient(0);
    comp[2 * reps + i] = root(2) * rep.h[2] * rep.h[2] * e[2].hessian(0, 0);
  });
  rep.correlation = Mat::Identity(3, 3);
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      const std::vector<double> va(comp.begin() + a * reps, comp.begin() + (a + 1) * reps);
      const std::vector<double> vb(comp.begin() + b * reps, comp.begin() + (b + 1) * reps);
      rep.correlation(a, b) = rep.correlation(b, a) = correlation(va, vb);
    }
  return rep;
}

}  // namespace locdens

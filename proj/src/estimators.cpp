#include "locdens/estimators.hpp"

#include "locdens/errors.hpp"
#include "locdens/kde.hpp"
#include "locdens/loglik.hpp"

namespace locdens {

const char* to_string(Paradigm p) {
  switch (p) {
    case Paradigm::M: return "M";
    case Paradigm::M3: return "M3";
    case Paradigm::K: return "K";
    case Paradigm::L: return "L";
    case Paradigm::H: return "H";
  }
  return "?";
}

Paradigm parse_paradigm(const std::string& s) {
  if (s == "M") return Paradigm::M;
  if (s == "M3") return Paradigm::M3;
  if (s == "K") return Paradigm::K;
  if (s == "L") return Paradigm::L;
  if (s == "H") return Paradigm::H;
  throw DomainError("unknown paradigm '" + s + "'");
}

const char* to_string(Scale s) { return s == Scale::density ? "density" : "log"; }

Scale parse_scale(const std::string& s) {
  if (s == "density") return Scale::density;
  if (s == "log") return Scale::log;
  throw DomainError("unknown scale '" + s + "'");
}

PointEvaluator::PointEvaluator(const Dataset& data, const KernelSpec& kernel, Vec x, double h)
    : data_(data), kernel_(kernel), x_(std::move(x)), h_(h) {}

const LocalMomentData& PointEvaluator::moments() {
  if (!moments_) moments_ = local_moment_data(data_, kernel_, x_, h_);
  return *moments_;
}

const EstimateTriple& PointEvaluator::kde() {
  if (!kde_) kde_ = estimate_k(data_, kernel_, x_, h_);
  return *kde_;
}

const HyvarinenStats& PointEvaluator::hstats() {
  if (!hstats_) hstats_ = hyvarinen_stats(data_, kernel_, x_, h_);
  return *hstats_;
}

EstimateTriple PointEvaluator::estimate(Paradigm p, Scale scale) {
  EstimateTriple e;
  switch (p) {
    case Paradigm::M:
    case Paradigm::M3: {
      const LocalMomentData& m = moments();
      if (!(m.max_weight > kDegenerateWeight))
        throw DegenerateNeighborhoodError("no observations carry kernel weight at the query point");
      e = estimate_m_from_moments(MatchingPolynomials(kernel_, p == Paradigm::M3), m, h_);
      return scale == Scale::log ? density_to_logdensity(e) : e;
    }
    case Paradigm::K:
      e = kde();
      return scale == Scale::log ? density_to_logdensity(e) : e;
    case Paradigm::L: {
      const LocalMomentData& m = moments();
      if (!(m.max_weight > kDegenerateWeight))
        throw DegenerateNeighborhoodError("no observations carry kernel weight at the query point");
      e = solve_l_from_triple(m.triple, kernel_, h_);
      return scale == Scale::density ? logdensity_to_density(e) : e;
    }
    case Paradigm::H: {
      if (scale == Scale::density) throw UnsupportedError("the Hyvarinen estimator has no density scale");
      const HyvarinenStats& st = hstats();
      return estimate_h_from_stats(st, local_mean_cov(moments().triple), h_);
    }
  }
  throw DomainError("unknown paradigm");
}

EstimateTriple estimate(Paradigm p, const Dataset& data, const KernelSpec& kernel, const Vec& x, double h,
                        Scale scale) {
  PointEvaluator ev(data, kernel, x, h);
  return ev.estimate(p, scale);
}

}  // namespace locdens

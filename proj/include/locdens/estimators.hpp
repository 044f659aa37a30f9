#pragma once

#include <optional>
#include <string>

#include "locdens/hyvarinen.hpp"
#include "locdens/kernel.hpp"
#include "locdens/local_moments.hpp"
#include "locdens/moment_matching.hpp"
#include "locdens/types.hpp"

namespace locdens {

//! M = moment matching, M3 = moment matching with refined gradient weights,
//! K = kernel derivatives, L = local log-likelihood, H = local Hyvarinen score.
enum class Paradigm { M, M3, K, L, H };

const char* to_string(Paradigm p);
Paradigm parse_paradigm(const std::string& s);
const char* to_string(Scale s);
Scale parse_scale(const std::string& s);

//! Evaluates several paradigms at one point, sharing the passes over the data.
class PointEvaluator {
 public:
  PointEvaluator(const Dataset& data, const KernelSpec& kernel, Vec x, double h);

  EstimateTriple estimate(Paradigm p, Scale scale);
  const LocalMomentData& moments();
  const EstimateTriple& kde();
  const HyvarinenStats& hstats();

 private:
  const Dataset& data_;
  const KernelSpec& kernel_;
  Vec x_;
  double h_;
  std::optional<LocalMomentData> moments_;
  std::optional<EstimateTriple> kde_;
  std::optional<HyvarinenStats> hstats_;
};

EstimateTriple estimate(Paradigm p, const Dataset& data, const KernelSpec& kernel, const Vec& x, double h,
                        Scale scale);

}  // namespace locdens

#pragma once

#include <string>
#include <vector>

#include "locdens/errors.hpp"
#include "locdens/estimators.hpp"
#include "locdens/test_density.hpp"

namespace locdens::cli {

//! gaussian, triweight, uniform_ball or rectangular in dimension d.
KernelSpec make_kernel(const std::string& name, int d);

//! normal1d, normal2d, ... or mixture2d.
TestDensity make_density(const std::string& name);

struct EstimateRow {
  Vec x;
  EstimateTriple estimate;
  ErrorCode code = ErrorCode::ok;
  std::string message;
};

//! One row per query point; estimator errors are recorded, not thrown.
std::vector<EstimateRow> estimate_rows(const Dataset& data, const KernelSpec& kernel, Paradigm p, Scale scale,
                                       double h, const RowMat& queries, int threads);

std::string rows_to_csv(const std::vector<EstimateRow>& rows, int d);

struct ModeOptions {
  double tol = 1e-6;
  int max_iter = 500;
};

struct StartTrace {
  Vec start;
  Vec end;
  int iterations = 0;
  bool converged = false;
  int mode = -1;
  ErrorCode code = ErrorCode::ok;
};

struct ModeSummary {
  Vec x;
  double logdensity = 0.0;
  bool negative_definite = false;
  int members = 0;
};

struct ModeReport {
  std::vector<StartTrace> starts;
  std::vector<ModeSummary> modes;
};

//! Backtracking ascent on the log-density estimate from each start, then
//! greedy clustering of converged endpoints within radius h.
ModeReport find_modes(const Dataset& data, const KernelSpec& kernel, Paradigm p, double h, const RowMat& starts,
                      const ModeOptions& opts, int threads);

std::string modes_to_csv(const ModeReport& rep, int d);
std::string starts_to_csv(const ModeReport& rep, int d);

//! Entry point of the locdens tool; returns the process exit code.
int run(int argc, char** argv);

}  // namespace locdens::cli

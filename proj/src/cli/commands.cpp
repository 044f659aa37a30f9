#include "commands.hpp"

#include <CLI11.hpp>
#include <iostream>
#include <thread>

#include "io.hpp"
#include "json.hpp"
#include "locdens/experiments.hpp"
#include "locdens/stats.hpp"

namespace locdens::cli {

KernelSpec make_kernel(const std::string& name, int d) {
  if (name == "gaussian") return KernelSpec::gaussian(d);
  if (name == "triweight") return KernelSpec::triweight(d);
  if (name == "uniform_ball") return KernelSpec::uniform_ball(d);
  if (name == "rectangular") return KernelSpec::rectangular(d);
  throw DomainError("unknown kernel '" + name + "'");
}

TestDensity make_density(const std::string& name) { return TestDensity::named(name); }

std::vector<EstimateRow> estimate_rows(const Dataset& data, const KernelSpec& kernel, Paradigm p, Scale scale,
                                       double h, const RowMat& queries, int threads) {
  std::vector<EstimateRow> rows(static_cast<std::size_t>(queries.rows()));
  parallel_for(queries.rows(), threads, [&](std::int64_t i) {
    EstimateRow& r = rows[static_cast<std::size_t>(i)];
    r.x = queries.row(i).transpose();
    try {
      r.estimate = estimate(p, data, kernel, r.x, h, scale);
    } catch (const Error& e) {
      r.code = e.code();
      r.message = e.what();
    }
  });
  return rows;
}

namespace {

std::string header_coords(int d, const std::string& prefix) {
  std::string s;
  for (int j = 0; j < d; ++j) s += (j ? "," : "") + prefix + std::to_string(j + 1);
  return s;
}

std::string coords(const Vec& x) {
  std::string s;
  for (Eigen::Index j = 0; j < x.size(); ++j) s += (j ? "," : "") + format_double(x(j));
  return s;
}

const double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string rows_to_csv(const std::vector<EstimateRow>& rows, int d) {
  std::string s = header_coords(d, "x") + ",value";
  for (int j = 0; j < d; ++j) s += ",g" + std::to_string(j + 1);
  for (int j = 0; j < d; ++j)
    for (int k = j; k < d; ++k) s += ",h" + std::to_string(j + 1) + "_" + std::to_string(k + 1);
  s += ",warnings,error_code\n";
  for (const auto& r : rows) {
    const bool ok = r.code == ErrorCode::ok;
    const EstimateTriple& e = r.estimate;
    s += coords(r.x) + "," + format_double(ok && e.has_value ? e.value : kNaN);
    for (int j = 0; j < d; ++j) s += "," + format_double(ok ? e.gradient(j) : kNaN);
    for (int j = 0; j < d; ++j)
      for (int k = j; k < d; ++k) s += "," + format_double(ok ? e.hessian(j, k) : kNaN);
    s += "," + std::to_string(ok ? e.warnings : 0u) + "," + to_string(r.code) + "\n";
  }
  return s;
}

ModeReport find_modes(const Dataset& data, const KernelSpec& kernel, Paradigm p, double h, const RowMat& starts,
                      const ModeOptions& opts, int threads) {
  if (p == Paradigm::H) throw UnsupportedError("mode seeking needs a log-density value");
  ModeReport rep;
  rep.starts.resize(static_cast<std::size_t>(starts.rows()));
  std::vector<double> end_value(rep.starts.size(), kNaN);
  const double base_step = h * h;
  parallel_for(starts.rows(), threads, [&](std::int64_t i) {
    StartTrace& t = rep.starts[static_cast<std::size_t>(i)];
    t.start = starts.row(i).transpose();
    Vec x = t.start;
    try {
      EstimateTriple cur = estimate(p, data, kernel, x, h, Scale::log);
      double step = base_step;
      while (true) {
        if (cur.gradient.norm() < opts.tol) {
          t.converged = true;
          break;
        }
        if (t.iterations >= opts.max_iter) break;
        bool moved = false;
        for (int k = 0; k < 60 && !moved; ++k, step *= 0.5) {
          const Vec xn = x + step * cur.gradient;
          try {
            EstimateTriple next = estimate(p, data, kernel, xn, h, Scale::log);
            // The value and gradient estimates need not be exactly consistent, so
            // a shorter gradient also counts as progress.
            if (next.value > cur.value || next.gradient.norm() < cur.gradient.norm()) {
              x = xn;
              cur = std::move(next);
              moved = true;
            }
          } catch (const Error&) {
          }
        }
        if (!moved) break;
        ++t.iterations;
        step = std::min(4.0 * step, 16.0 * base_step);
      }
      end_value[static_cast<std::size_t>(i)] = cur.value;
    } catch (const Error& e) {
      t.code = e.code();
    }
    t.end = x;
  });

  std::vector<std::size_t> rep_start;  // member with the largest estimate per cluster
  for (std::size_t i = 0; i < rep.starts.size(); ++i) {
    StartTrace& t = rep.starts[i];
    if (!t.converged) continue;
    for (std::size_t m = 0; m < rep.modes.size(); ++m)
      if ((rep.starts[rep_start[m]].end - t.end).norm() <= h) {
        t.mode = static_cast<int>(m);
        break;
      }
    if (t.mode < 0) {
      t.mode = static_cast<int>(rep.modes.size());
      rep.modes.push_back(ModeSummary{});
      rep_start.push_back(i);
    }
    ModeSummary& ms = rep.modes[static_cast<std::size_t>(t.mode)];
    ++ms.members;
    if (end_value[i] > end_value[rep_start[static_cast<std::size_t>(t.mode)]]) rep_start[static_cast<std::size_t>(t.mode)] = i;
  }
  for (std::size_t m = 0; m < rep.modes.size(); ++m) {
    ModeSummary& ms = rep.modes[m];
    ms.x = rep.starts[rep_start[m]].end;
    ms.logdensity = end_value[rep_start[m]];
    try {
      const EstimateTriple e = estimate(p, data, kernel, ms.x, h, Scale::log);
      ms.negative_definite = Eigen::SelfAdjointEigenSolver<Mat>(e.hessian).eigenvalues().maxCoeff() < 0.0;
    } catch (const Error&) {
      ms.negative_definite = false;
    }
  }
  return rep;
}

std::string modes_to_csv(const ModeReport& rep, int d) {
  std::string s = "mode," + header_coords(d, "x") + ",logdensity,negative_definite,members\n";
  for (std::size_t m = 0; m < rep.modes.size(); ++m) {
    const ModeSummary& ms = rep.modes[m];
    s += std::to_string(m) + "," + coords(ms.x) + "," + format_double(ms.logdensity) + "," +
         (ms.negative_definite ? "1" : "0") + "," + std::to_string(ms.members) + "\n";
  }
  return s;
}

std::string starts_to_csv(const ModeReport& rep, int d) {
  std::string s = "start," + header_coords(d, "s") + "," + header_coords(d, "x") +
                  ",iterations,converged,mode,error_code\n";
  for (std::size_t i = 0; i < rep.starts.size(); ++i) {
    const StartTrace& t = rep.starts[i];
    s += std::to_string(i) + "," + coords(t.start) + "," + coords(t.end) + "," + std::to_string(t.iterations) + "," +
         (t.converged ? "1" : "0") + "," + std::to_string(t.mode) + "," + to_string(t.code) + "\n";
  }
  return s;
}

namespace {

bool wants_json(const std::string& path, const std::string& format) {
  if (!format.empty()) return format == "json";
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

int resolve_threads(int t) {
  if (t > 0) return t;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

nlohmann::ordered_json meta(const std::string& command) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["library_version"] = LOCDENS_VERSION;
  return j;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Local estimation of densities, log-densities and their derivatives"};
  app.set_config("--config", "", "INI file with [estimate], [rates], [modes] or [check-kernel] sections");
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  // estimate
  std::string input, kernel_name = "gaussian", paradigm_name = "K", scale_name = "density", queries, out, format;
  double h = 0.0;
  int threads = 1;
  std::uint64_t seed = 0;
  auto* est = app.add_subcommand("estimate", "Evaluate an estimator at query points");
  est->add_option("--input", input, "CSV data file")->required()->check(CLI::ExistingFile);
  est->add_option("--kernel", kernel_name, "gaussian|triweight|uniform_ball|rectangular");
  est->add_option("--paradigm", paradigm_name, "M|M3|K|L|H");
  est->add_option("--scale", scale_name, "density|log");
  est->add_option("--h", h, "Bandwidth")->required()->check(CLI::PositiveNumber);
  est->add_option("--queries", queries, "grid:lo:hi:m,... | file:path | point:x,y;...")->required();
  est->add_option("--out", out, "Output file")->required();
  est->add_option("--format", format, "csv|json (default from extension)");
  est->add_option("--threads", threads, "Worker threads (0 = all cores)");
  est->add_option("--seed", seed, "Recorded in the output metadata");

  // modes
  std::string starts_spec, trace;
  auto* modes = app.add_subcommand("modes", "Mode seeking by ascent on the log-density estimate");
  modes->add_option("--input", input, "CSV data file")->required()->check(CLI::ExistingFile);
  modes->add_option("--kernel", kernel_name, "Kernel name");
  modes->add_option("--paradigm", paradigm_name, "M|M3|K|L");
  modes->add_option("--h", h, "Bandwidth")->required()->check(CLI::PositiveNumber);
  modes->add_option("--starts", starts_spec, "Start points (query syntax); default: 200 evenly spaced observations");
  modes->add_option("--out", out, "Mode table")->required();
  modes->add_option("--trace", trace, "Optional per-start table");
  modes->add_option("--threads", threads, "Worker threads (0 = all cores)");

  // rates
  std::string density = "normal2d", x0_text, targets = "value", rule = "n^{-1/10}", ns_text = "1e3:1e6", hs_text;
  std::string rate_scale;
  double C = 0.5;
  int reps = 500, bootstrap = 1000;
  bool bias_only = false;
  std::uint64_t rate_seed = 7;
  auto* rates = app.add_subcommand("rates", "Convergence-rate experiment");
  rates->add_option("--density", density, "normal1d, normal2d, ... or mixture2d");
  rates->add_option("--x0", x0_text, "Evaluation point, e.g. 0.5,0.3");
  rates->add_option("--kernel", kernel_name, "Kernel name");
  rates->add_option("--paradigm", paradigm_name, "Comma separated paradigms");
  rates->add_option("--target", targets, "Comma separated: value,gradient,hessian");
  rates->add_option("--scale", rate_scale, "density|log (default: the paradigm's own scale)");
  rates->add_option("--rule", rule, "Bandwidth rule n^{-1/(d+4|6|8)}");
  rates->add_option("--C", C, "Bandwidth constant")->check(CLI::PositiveNumber);
  rates->add_option("--ns", ns_text, "Sample sizes: lo:hi decades or a comma list");
  rates->add_option("--reps", reps, "Replications per sample size");
  rates->add_option("--seed", rate_seed, "Random seed");
  rates->add_option("--bootstrap", bootstrap, "Bootstrap resamples for slope intervals");
  rates->add_option("--threads", threads, "Worker threads (0 = all cores)");
  rates->add_flag("--bias-only", bias_only, "Deterministic bias curve by cubature");
  rates->add_option("--hs", hs_text, "Bandwidths for --bias-only");
  rates->add_option("--out", out, "Output prefix")->required();

  // check-kernel
  int dim = 1;
  auto* ck = app.add_subcommand("check-kernel", "Verify kernel conditions and print its moments");
  ck->add_option("--kernel", kernel_name, "Kernel name");
  ck->add_option("--dim", dim, "Dimension")->check(CLI::Range(1, 10));
  ck->add_option("--out", out, "Optional JSON output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    threads = resolve_threads(threads);
    if (est->parsed()) {
      const Dataset data = ingest_csv(input);
      const int d = data.d();
      const KernelSpec kernel = make_kernel(kernel_name, d);
      const Paradigm p = parse_paradigm(paradigm_name);
      const Scale scale = parse_scale(scale_name);
      const RowMat q = parse_queries(queries, d);
      const auto rows = estimate_rows(data, kernel, p, scale, h, q, threads);
      if (wants_json(out, format)) {
        auto j = meta("estimate");
        j["config"] = {{"input", input},  {"kernel", kernel_name}, {"paradigm", paradigm_name},
                       {"scale", scale_name}, {"h", h},           {"queries", queries},
                       {"seed", seed}};
        j["rows"] = nlohmann::ordered_json::array();
        for (const auto& r : rows) {
          nlohmann::ordered_json row;
          row["x"] = std::vector<double>(r.x.data(), r.x.data() + r.x.size());
          row["error_code"] = to_string(r.code);
          if (r.code == ErrorCode::ok) {
            const auto& e = r.estimate;
            row["value"] = e.has_value ? nlohmann::ordered_json(e.value) : nlohmann::ordered_json(nullptr);
            row["gradient"] = std::vector<double>(e.gradient.data(), e.gradient.data() + d);
            std::vector<double> hu;
            for (int a = 0; a < d; ++a)
              for (int b = a; b < d; ++b) hu.push_back(e.hessian(a, b));
            row["hessian_upper"] = hu;
            row["warnings"] = e.warnings;
          } else {
            row["message"] = r.message;
          }
          j["rows"].push_back(row);
        }
        write_text(out, j.dump(2) + "\n");
      } else {
        write_text(out, rows_to_csv(rows, d));
      }
    } else if (modes->parsed()) {
      const Dataset data = ingest_csv(input);
      const int d = data.d();
      const KernelSpec kernel = make_kernel(kernel_name, d);
      RowMat starts;
      if (starts_spec.empty()) {
        const std::int64_t m = std::min<std::int64_t>(data.n(), 200);
        starts.resize(m, d);
        for (std::int64_t i = 0; i < m; ++i) starts.row(i) = data.points().row(i * data.n() / m);
      } else
        starts = parse_queries(starts_spec, d);
      const ModeReport rep = find_modes(data, kernel, parse_paradigm(paradigm_name), h, starts, {}, threads);
      write_text(out, modes_to_csv(rep, d));
      if (!trace.empty()) write_text(trace, starts_to_csv(rep, d));
    } else if (rates->parsed()) {
      const TestDensity f = make_density(density);
      const int d = f.dimension();
      Vec x0;
      if (x0_text.empty()) {
        x0 = Vec::Constant(d, 0.3);
        x0(0) = 0.5;
      } else {
        x0 = parse_vector(x0_text);
      }
      const KernelSpec kernel = make_kernel(kernel_name, d);
      std::vector<SeriesSpec> series;
      for (const auto& ps : split_list(paradigm_name))
        for (const auto& ts : split_list(targets)) {
          const Paradigm p = parse_paradigm(ps);
          const Scale natural = p == Paradigm::L || p == Paradigm::H ? Scale::log : Scale::density;
          series.push_back({p, parse_target(ts), rate_scale.empty() ? natural : parse_scale(rate_scale)});
        }
      if (bias_only) {
        std::vector<double> hs;
        for (const auto& s : split_list(hs_text.empty() ? "0.4,0.3,0.2,0.15,0.1" : hs_text)) hs.push_back(parse_vector(s)(0));
        std::string csv = "paradigm,target,scale,h,abs_bias\n";
        auto j = meta("rates");
        j["density"] = f.describe();
        j["kernel"] = kernel.name();
        j["curves"] = nlohmann::ordered_json::array();
        for (const auto& s : series) {
          const BiasCurve c = deterministic_bias_curve(s, f, x0, kernel, hs);
          for (std::size_t i = 0; i < hs.size(); ++i)
            csv += std::string(to_string(s.paradigm)) + "," + to_string(s.target) + "," + to_string(s.scale) + "," +
                   format_double(hs[i]) + "," + format_double(c.abs_bias[i]) + "\n";
          j["curves"].push_back({{"series", s.label()}, {"slope", c.fit.slope}, {"intercept", c.fit.intercept}});
        }
        write_text(out + ".csv", csv);
        write_text(out + ".json", j.dump(2) + "\n");
      } else {
        const int denom = parse_rate_denominator(rule);
        RateConfig cfg(f, x0, kernel, BandwidthPlan::rate(C, denom - d));
        cfg.ns = parse_sizes(ns_text);
        cfg.reps = reps;
        cfg.seed = rate_seed;
        cfg.threads = threads;
        cfg.bootstrap = bootstrap;
        const RateReport rep = rate_experiment(series, cfg);
        write_text(out + ".csv", rep.to_csv());
        write_text(out + ".json", rep.to_json());
        write_text(out + ".plot.dat", rep.plot_data());
      }
    } else if (ck->parsed()) {
      const KernelSpec kernel = make_kernel(kernel_name, dim);
      const ConditionReport r = check_conditions(kernel);
      auto j = meta("check-kernel");
      j["kernel"] = kernel.name();
      j["dimension"] = dim;
      auto check = [](const ConditionCheck& c) {
        return nlohmann::ordered_json{{"pass", c.pass}, {"residual", c.residual}, {"note", c.note}};
      };
      j["normalized"] = check(r.normalized);
      j["symmetric"] = check(r.symmetric);
      j["unit_variance"] = check(r.unit_variance);
      j["differentiable"] = check(r.differentiable);
      j["exp_moment"] = check(r.exp_moment);
      j["all_pass"] = r.all_pass();
      j["mu4"] = kernel.special_moment({4});
      if (dim > 1) j["mu22"] = kernel.special_moment({2, 2});
      j["exp_moment_radius"] = kernel.exp_moment_radius();
      const std::string text = j.dump(2) + "\n";
      if (out.empty())
        std::cout << text;
      else
        write_text(out, text);
      return r.all_pass() ? 0 : 3;
    }
  } catch (const Error& e) {
    std::cerr << "locdens: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace locdens::cli

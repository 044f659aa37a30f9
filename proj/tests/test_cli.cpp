#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "io.hpp"
#include "locdens/errors.hpp"
#include "locdens/kde.hpp"
#include "support.hpp"

using namespace locdens;
using namespace locdens::cli;
using namespace locdens::testing;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("locdens_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "locdens");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

long parse_error_line(const std::string& text) {
  try {
    parse_csv(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("CSV ingestion") {
  const Dataset d = parse_csv("0,0\n1,0\n0,1\n");
  CHECK(d.n() == 3);
  CHECK(d.d() == 2);
  CHECK(d.points()(2, 1) == 1.0);

  const Dataset hdr = parse_csv("x,y\n1.5,-2\n3,4e-3\n");
  CHECK(hdr.n() == 2);
  CHECK(hdr.points()(1, 1) == 4e-3);

  CHECK(parse_error_line("0,0\n1,NaN\n") == 2);
  CHECK(parse_error_line("0,0\n1,inf\n") == 2);
  CHECK(parse_error_line("0,0\n1,0\n2\n") == 3);
  CHECK(parse_error_line("0,0\n1,abc\n") == 2);
  CHECK(parse_error_line("") == 1);
  CHECK(parse_error_line("x,1\n") == 1);
}

TEST_CASE("CSV round trip is bit-identical") {
  TempDir tmp;
  const Dataset d = normal_data(100'000, 3, 2024);
  write_csv(tmp.file("pts.csv"), d);
  const Dataset back = ingest_csv(tmp.file("pts.csv"));
  CHECK(back.points() == d.points());
  CHECK_THROWS_AS(ingest_csv(tmp.file("missing.csv")), ParseError);
}

TEST_CASE("query, size and rule parsing") {
  const RowMat g = parse_queries("grid:0:1:3,-1:1:2", 2);
  REQUIRE(g.rows() == 6);
  CHECK(g(0, 0) == 0.0);
  CHECK(g(0, 1) == -1.0);
  CHECK(g(1, 1) == 1.0);
  CHECK(g(5, 0) == 1.0);
  const RowMat p = parse_queries("point:0.5,0.3;1,2", 2);
  CHECK(p.rows() == 2);
  CHECK(p(1, 1) == 2.0);
  CHECK_THROWS_AS(parse_queries("grid:0:1:10000,0:1:10000", 2), DomainError);
  CHECK_THROWS_AS(parse_queries("point:1,2,3", 2), DomainError);
  CHECK(parse_sizes("1e3:1e6") == std::vector<std::int64_t>{1000, 10000, 100000, 1000000});
  CHECK(parse_sizes("100,250") == std::vector<std::int64_t>{100, 250});
  CHECK(parse_rate_denominator("n^{-1/10}") == 10);
  CHECK(parse_rate_denominator("n^-1/8") == 8);
  CHECK_THROWS_AS(parse_rate_denominator("n^{1/10}"), DomainError);
}

TEST_CASE("estimate rows equal library calls") {
  const Dataset data = normal_data(2000, 2, 8);
  const KernelSpec k = KernelSpec::gaussian(2);
  const RowMat q = parse_queries("grid:-2:2:5,-2:2:5", 2);
  const auto rows = estimate_rows(data, k, Paradigm::K, Scale::density, 0.4, q, 2);
  REQUIRE(rows.size() == 25);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const EstimateTriple e = estimate_k(data, k, q.row(static_cast<Eigen::Index>(i)).transpose(), 0.4);
    CHECK(rows[i].estimate.value == e.value);
    CHECK(rows[i].estimate.gradient == e.gradient);
    CHECK(rows[i].estimate.hessian == e.hessian);
  }
}

TEST_CASE("tail queries record an error code and the run continues") {
  const Dataset data = normal_data(2000, 1, 9);
  const RowMat q = parse_queries("point:0;4.5", 1);
  const auto rows = estimate_rows(data, KernelSpec::gaussian(1), Paradigm::M, Scale::log, 0.3, q, 1);
  CHECK(rows[0].code == ErrorCode::ok);
  CHECK(rows[1].code == ErrorCode::nonpositive_density);
  const std::string csv = rows_to_csv(rows, 1);
  CHECK(csv.find("nonpositive_density") != std::string::npos);
}

TEST_CASE("L and H columns coincide for the Gaussian kernel") {
  const Dataset data = normal_data(3000, 2, 10);
  const KernelSpec k = KernelSpec::gaussian(2);
  const RowMat q = parse_queries("grid:-1:1:4,-1:1:4", 2);
  const auto l = estimate_rows(data, k, Paradigm::L, Scale::log, 0.5, q, 1);
  const auto h = estimate_rows(data, k, Paradigm::H, Scale::log, 0.5, q, 1);
  for (std::size_t i = 0; i < l.size(); ++i) {
    CHECK((l[i].estimate.gradient - h[i].estimate.gradient).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((l[i].estimate.hessian - h[i].estimate.hessian).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("mode seeking on a normal sample") {
  const Dataset data = normal_data(100'000, 2, 11);
  const KernelSpec k = KernelSpec::gaussian(2);
  RowMat starts(20, 2);
  for (int i = 0; i < 20; ++i) starts.row(i) = data.points().row(i * 5000);
  const ModeReport rep = find_modes(data, k, Paradigm::L, 0.3, starts, {}, 1);
  REQUIRE(rep.modes.size() == 1);
  CHECK(rep.modes[0].x.norm() < 0.1);
  CHECK(rep.modes[0].negative_definite);

  RowMat again(1, 2);
  again.row(0) = rep.modes[0].x.transpose();
  const ModeReport fixed = find_modes(data, k, Paradigm::L, 0.3, again, {}, 1);
  CHECK(fixed.starts[0].converged);
  CHECK(fixed.starts[0].iterations <= 2);
}

TEST_CASE("mode seeking separates mixture components") {
  const TestDensity f = TestDensity::mixture({0.5, 0.5}, {point(-2.0, 0.0), point(2.0, 0.0)},
                                             {Mat::Identity(2, 2), Mat::Identity(2, 2)});
  const Dataset data = sample_data(f, 10'000, 12);
  RowMat starts(40, 2);
  for (int i = 0; i < 40; ++i) starts.row(i) = data.points().row(i * 250);
  const ModeReport rep = find_modes(data, KernelSpec::gaussian(2), Paradigm::K, 0.6, starts, {}, 2);
  REQUIRE(rep.modes.size() == 2);
  for (const auto& c : f.components()) {
    double best = 1e300;
    for (const auto& m : rep.modes) best = std::min(best, (m.x - c.mean).norm());
    CHECK(best < 0.5);
  }
}

TEST_CASE("rates command output is identical across thread counts") {
  TempDir tmp;
  const std::vector<std::string> base{"rates", "--density", "normal2d", "--paradigm", "M,K", "--target",
                                      "value,hessian", "--rule", "n^{-1/10}", "--C", "0.5", "--ns", "200,400,800,1600",
                                      "--reps", "100", "--seed", "7", "--bootstrap", "100"};
  auto a = base, b = base;
  a.insert(a.end(), {"--threads", "1", "--out", tmp.file("a")});
  b.insert(b.end(), {"--threads", "3", "--out", tmp.file("b")});
  REQUIRE(run_cli(a) == 0);
  REQUIRE(run_cli(b) == 0);
  CHECK(slurp(tmp.file("a.csv")) == slurp(tmp.file("b.csv")));
  CHECK(slurp(tmp.file("a.plot.dat")) == slurp(tmp.file("b.plot.dat")));
  CHECK_FALSE(slurp(tmp.file("a.csv")).empty());
}

TEST_CASE("estimate command matches the library") {
  TempDir tmp;
  const Dataset data = normal_data(500, 2, 13);
  write_csv(tmp.file("pts.csv"), data);
  REQUIRE(run_cli({"estimate", "--input", tmp.file("pts.csv"), "--paradigm", "K", "--h", "0.5", "--queries",
                   "point:0.25,-0.5", "--out", tmp.file("out.csv")}) == 0);
  const std::string csv = slurp(tmp.file("out.csv"));
  const EstimateTriple e = estimate_k(data, KernelSpec::gaussian(2), parse_vector("0.25,-0.5"), 0.5);
  CHECK(csv.find(format_double(e.value)) != std::string::npos);
  CHECK(csv.find(format_double(e.hessian(0, 1))) != std::string::npos);
  CHECK(run_cli({"estimate", "--input", tmp.file("pts.csv"), "--h", "0.5", "--queries", "bogus", "--out",
                 tmp.file("x.csv")}) == 2);
}

TEST_CASE("check-kernel exit status") {
  TempDir tmp;
  CHECK(run_cli({"check-kernel", "--kernel", "gaussian", "--dim", "2", "--out", tmp.file("g.json")}) == 0);
  CHECK(slurp(tmp.file("g.json")).find("\"all_pass\": true") != std::string::npos);
  CHECK(run_cli({"check-kernel", "--kernel", "rectangular", "--dim", "2", "--out", tmp.file("r.json")}) == 3);
}

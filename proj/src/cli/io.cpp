#include "io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "locdens/errors.hpp"

namespace locdens::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(s);
  while (std::getline(is, cell, sep)) out.push_back(trim(cell));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

bool parse_number(const std::string& cell, double& v) {
  if (cell.empty()) return false;
  const char* b = cell.data();
  const char* e = b + cell.size();
  if (*b == '+') ++b;
  const auto r = std::from_chars(b, e, v);
  return r.ec == std::errc() && r.ptr == e;
}

double number_or_throw(const std::string& cell, std::size_t line, const std::string& what) {
  double v = 0.0;
  if (!parse_number(cell, v)) throw ParseError("non-numeric " + what + " '" + cell + "'", line);
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

Dataset parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  int d = 0;
  std::vector<double> values;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (first) {
      first = false;
      double v;
      bool numeric = true;
      for (const auto& c : cells) numeric = numeric && parse_number(c, v);
      d = static_cast<int>(cells.size());
      if (!numeric) {
        bool any = false;
        for (const auto& c : cells) any = any || parse_number(c, v);
        if (any) throw ParseError("non-numeric cell in first row", lineno);
        continue;  // header
      }
    }
    if (static_cast<int>(cells.size()) != d)
      throw ParseError("expected " + std::to_string(d) + " columns, found " + std::to_string(cells.size()), lineno);
    for (const auto& c : cells) {
      const double v = number_or_throw(c, lineno, "cell");
      if (!std::isfinite(v)) throw ParseError("non-finite value '" + c + "'", lineno);
      values.push_back(v);
    }
  }
  if (values.empty()) throw ParseError("no data rows", lineno == 0 ? 1 : lineno);
  const auto n = static_cast<Eigen::Index>(values.size() / d);
  return Dataset(Eigen::Map<const RowMat>(values.data(), n, d));
}

Dataset ingest_csv(const std::string& path) { return parse_csv(read_file(path)); }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DomainError("write to '" + path + "' failed");
}

void write_csv(const std::string& path, const Dataset& data) {
  std::string s;
  for (std::int64_t i = 0; i < data.n(); ++i) {
    const double* r = data.row(i);
    for (int j = 0; j < data.d(); ++j) {
      if (j) s += ',';
      s += format_double(r[j]);
    }
    s += '\n';
  }
  write_text(path, s);
}

Vec parse_vector(const std::string& text) {
  const auto cells = split(text, ',');
  Vec v(static_cast<Eigen::Index>(cells.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) v(static_cast<Eigen::Index>(i)) = number_or_throw(cells[i], 0, "coordinate");
  if (v.size() == 0 || !v.allFinite()) throw DomainError("invalid vector '" + text + "'");
  return v;
}

RowMat parse_queries(const std::string& spec, int d) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw DomainError("query spec needs a grid:, file: or point: prefix");
  const std::string kind = spec.substr(0, colon), body = spec.substr(colon + 1);
  RowMat q;
  if (kind == "file") {
    q = ingest_csv(body).points();
  } else if (kind == "point") {
    const auto pts = split(body, ';');
    q.resize(static_cast<Eigen::Index>(pts.size()), d);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec v = parse_vector(pts[i]);
      if (v.size() != d) throw DomainError("query point '" + pts[i] + "' has wrong dimension");
      q.row(static_cast<Eigen::Index>(i)) = v.transpose();
    }
  } else if (kind == "grid") {
    const auto axes = split(body, ',');
    if (static_cast<int>(axes.size()) != d) throw DomainError("grid needs one lo:hi:m triple per dimension");
    std::vector<Vec> ticks;
    double cells = 1.0;
    for (const auto& a : axes) {
      const auto parts = split(a, ':');
      if (parts.size() != 3) throw DomainError("grid axis '" + a + "' is not lo:hi:m");
      const double lo = number_or_throw(parts[0], 0, "grid bound"), hi = number_or_throw(parts[1], 0, "grid bound");
      const double m = number_or_throw(parts[2], 0, "grid size");
      if (!(m >= 1.0) || m != std::floor(m) || !(hi >= lo)) throw DomainError("invalid grid axis '" + a + "'");
      cells *= m;
      if (cells > 1e7) throw DomainError("grid exceeds 1e7 cells");
      ticks.push_back(m == 1.0 ? Vec(Vec::Constant(1, lo)) : Vec(Vec::LinSpaced(static_cast<Eigen::Index>(m), lo, hi)));
    }
    const auto total = static_cast<Eigen::Index>(cells);
    q.resize(total, d);
    for (Eigen::Index i = 0; i < total; ++i) {
      Eigen::Index rem = i;
      for (int j = d - 1; j >= 0; --j) {
        const auto m = ticks[j].size();
        q(i, j) = ticks[j](rem % m);
        rem /= m;
      }
    }
  } else {
    throw DomainError("unknown query kind '" + kind + "'");
  }
  if (q.cols() != d) throw DomainError("query dimension does not match the data");
  return q;
}

std::vector<std::int64_t> parse_sizes(const std::string& text) {
  std::vector<std::int64_t> out;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const double lo = number_or_throw(trim(text.substr(0, colon)), 0, "size");
    const double hi = number_or_throw(trim(text.substr(colon + 1)), 0, "size");
    if (!(lo >= 1.0) || !(hi >= lo)) throw DomainError("invalid size range '" + text + "'");
    for (double n = lo; n <= hi * (1 + 1e-12); n *= 10.0) out.push_back(static_cast<std::int64_t>(std::llround(n)));
  } else {
    for (const auto& c : split(text, ',')) {
      const double n = number_or_throw(c, 0, "size");
      if (!(n >= 1.0) || n != std::floor(n)) throw DomainError("invalid sample size '" + c + "'");
      out.push_back(static_cast<std::int64_t>(n));
    }
  }
  return out;
}

int parse_rate_denominator(const std::string& rule) {
  static const std::regex re(R"(^\s*n\^\{?\s*-\s*1\s*/\s*\(?\s*(\d+)\s*\)?\s*\}?\s*$)");
  std::smatch m;
  if (!std::regex_match(rule, m, re)) throw DomainError("rate rule must look like n^{-1/10}");
  return std::stoi(m[1]);
}

}  // namespace locdens::cli

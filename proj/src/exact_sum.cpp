#include "locdens/exact_sum.hpp"

#include <cmath>
#include <vector>

#include "locdens/errors.hpp"

namespace locdens {

namespace {

constexpr int kBias = 1074;  // exponent of the smallest subnormal
constexpr std::int64_t kChunk = std::int64_t{1} << 32;
constexpr std::uint32_t kNormalizeEvery = 1u << 28;

// Correctly rounded sum of a few doubles (Shewchuk partials).
double rounded_sum(const std::vector<double>& terms) {
  std::vector<double> partials;
  for (double x : terms) {
    std::size_t i = 0;
    for (double y : partials) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[i++] = lo;
      x = hi;
    }
    partials.resize(i);
    partials.push_back(x);
  }
  if (partials.empty()) return 0.0;
  std::size_t n = partials.size();
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    lo = y - (hi - x);
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

}  // namespace

void ExactSum::add(double x) {
  if (x == 0.0) return;
  if (!std::isfinite(x)) throw NumericError("non-finite summand", x);
  int e = 0;
  const double f = std::frexp(x, &e);  // x = f 2^e, 0.5 <= |f| < 1
  // x = m 2^(e - 53) with |m| < 2^53; shift so the exponent is >= -1074.
  auto m = static_cast<std::int64_t>(std::ldexp(f, 53));
  int pos = e - 53 + kBias;
  if (pos < 0) {
    m >>= -pos;  // exact: subnormal mantissas carry trailing zeros
    pos = 0;
  }
  const int bin = pos / 32, shift = pos % 32;
  const bool neg = m < 0;
  const auto u = static_cast<unsigned __int128>(neg ? -m : m) << shift;
  const auto p0 = static_cast<std::int64_t>(static_cast<std::uint64_t>(u) & 0xffffffffu);
  const auto p1 = static_cast<std::int64_t>(static_cast<std::uint64_t>(u >> 32) & 0xffffffffu);
  const auto p2 = static_cast<std::int64_t>(static_cast<std::uint64_t>(u >> 64));
  if (neg) {
    bins_[bin] -= p0;
    bins_[bin + 1] -= p1;
    bins_[bin + 2] -= p2;
  } else {
    bins_[bin] += p0;
    bins_[bin + 1] += p1;
    bins_[bin + 2] += p2;
  }
  if (++pending_ >= kNormalizeEvery) normalize();
}

void ExactSum::normalize() {
  for (int i = 0; i + 1 < kBins; ++i) {
    const std::int64_t carry = bins_[i] >> 32;  // floor division
    bins_[i] -= carry * kChunk;
    bins_[i + 1] += carry;
  }
  pending_ = 0;
}

void ExactSum::reset() {
  bins_.fill(0);
  pending_ = 0;
}

double ExactSum::value() const {
  ExactSum c = *this;
  c.normalize();
  // Two's complement tail: work with the magnitude of a negative sum.
  const bool neg = c.bins_[kBins - 1] < 0;
  if (neg) {
    for (auto& b : c.bins_) b = -b;
    c.normalize();
  }
  std::vector<double> terms;
  for (int i = 0; i < kBins; ++i) {
    const std::int64_t v = c.bins_[i];
    if (v == 0) continue;
    const std::int64_t hi = v >> 32;
    const std::int64_t lo = v - hi * kChunk;
    if (lo != 0) terms.push_back(std::ldexp(static_cast<double>(lo), 32 * i - kBias));
    if (hi != 0) terms.push_back(std::ldexp(static_cast<double>(hi), 32 * (i + 1) - kBias));
  }
  const double s = neg ? -rounded_sum(terms) : rounded_sum(terms);
  if (!std::isfinite(s)) throw NumericError("sum overflows", s);
  return s;
}

}  // namespace locdens

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace locdens {

//! Exactly rounded floating point summation.
//!
//! Terms are accumulated exactly in 32-bit fixed-point bins spanning the
//! whole double range, so the result is the correctly rounded exact sum and
//! does not depend on the order in which terms are added.
class ExactSum {
 public:
  void add(double x);
  double value() const;
  void reset();

  static constexpr int kBins = 70;

 private:
  void normalize();

  std::array<std::int64_t, kBins> bins_{};
  std::uint32_t pending_ = 0;
};

}  // namespace locdens

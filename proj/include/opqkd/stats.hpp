#pragma once

#include <cstdint>
#include <string>

namespace opqkd {

struct Interval {
  double low;
  double high;
};

/// 95% z quantile.
inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for `successes` out of `trials` (> 0).
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ95);

/// Closest fraction p/q with q <= max_denominator, printed as "p/q" (or "p"),
/// when it matches `x` within `tolerance`; otherwise an empty string.
std::string as_fraction(double x, long max_denominator = 10000, double tolerance = 1e-12);

}  // namespace opqkd

#include "opqkd/stats.hpp"

#include <cmath>

#include "opqkd/errors.hpp"

namespace opqkd {

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) throw InsufficientData("wilson_interval: zero trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // Clamp so the interval always contains the point estimate despite rounding.
  return {std::fmin(p, std::fmax(0.0, centre - half)), std::fmax(p, std::fmin(1.0, centre + half))};
}

std::string as_fraction(double x, long max_denominator, double tolerance) {
  if (!std::isfinite(x)) return {};
  // Continued-fraction convergents.
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(r);
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0;
    const long q2 = ai * q1 + q0;
    if (q2 > max_denominator) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - x) <= tolerance) {
      return q1 == 1 ? std::to_string(p1) : std::to_string(p1) + "/" + std::to_string(q1);
    }
    const double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return {};
}

}  // namespace opqkd

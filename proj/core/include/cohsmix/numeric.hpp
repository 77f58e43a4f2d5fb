#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace cohsmix {

/// log(sum_i exp(x_i)), shifted by the maximum. Returns -inf for an empty
/// input or when every term is -inf.
inline double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

/// x * log(y) with the convention 0 * log(0) = 0.
inline double xlogy(double x, double y) {
  if (x == 0.0) return 0.0;
  return x * std::log(y);
}

}  // namespace cohsmix

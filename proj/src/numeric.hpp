#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace hdtta::detail {

// p = sigmoid(z), q = 1 - p, both computed without cancellation.
inline void sigmoid_pair(double z, double& p, double& q) {
  const double e = std::exp(-std::abs(z));
  const double inv = 1.0 / (1.0 + e);
  if (z >= 0.0) {
    p = inv;
    q = e * inv;
  } else {
    p = e * inv;
    q = inv;
  }
}

// Linear-interpolation percentile (0..100) of an unsorted sample; reorders `v`.
inline double percentile_inplace(std::vector<double>& v, double pct) {
  if (v.empty()) return 0.0;
  const double pos = pct / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double a = v[lo];
  if (frac == 0.0 || lo + 1 >= v.size()) return a;
  const double b = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  return a + frac * (b - a);
}

}  // namespace hdtta::detail

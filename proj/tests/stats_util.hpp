#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace testutil {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  const auto n = static_cast<double>(xs.size());
  double s = 0.0;
  for (double x : xs) s += x;
  out.mean = s / n;
  double v = 0.0;
  for (double x : xs) v += (x - out.mean) * (x - out.mean);
  out.se = std::sqrt(v / (n - 1.0) / n);
  return out;
}

// Two-sample Kolmogorov-Smirnov distance (tie groups advanced together).
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    const double fa = static_cast<double>(i) / static_cast<double>(a.size());
    const double fb = static_cast<double>(j) / static_cast<double>(b.size());
    d = std::max(d, std::fabs(fa - fb));
  }
  return d;
}

// One-sample KS distance against a CDF.
inline double ks_vs_cdf(std::vector<double> a, const std::function<double(double)>& cdf) {
  std::sort(a.begin(), a.end());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    const double lo = static_cast<double>(i) / static_cast<double>(a.size());
    const double hi = static_cast<double>(i + 1) / static_cast<double>(a.size());
    d = std::max({d, std::fabs(f - lo), std::fabs(f - hi)});
  }
  return d;
}

}  // namespace testutil

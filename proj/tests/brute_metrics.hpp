#pragma once

// Deliberately naive reference implementations: full sorts, two-pass sums.

#include <algorithm>
#include <cmath>
#include <vector>

namespace pcbench::test::brute {

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

inline double mad(const std::vector<double>& v) {
  const double m = median(v);
  std::vector<double> dev;
  for (double x : v) dev.push_back(std::fabs(x - m));
  return median(dev);
}

inline double sample_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline double gap_none(const std::vector<double>& ref, const std::vector<double>& pol) {
  return median(ref) - median(pol);
}

inline double gap_per_step(const std::vector<double>& ref, const std::vector<double>& pol, double steps) {
  return (median(ref) - median(pol)) / steps;
}

inline double gap_minmax(const std::vector<double>& ref, const std::vector<double>& pol) {
  std::vector<double> all = ref;
  all.insert(all.end(), pol.begin(), pol.end());
  const double lo = *std::min_element(all.begin(), all.end());
  const double hi = *std::max_element(all.begin(), all.end());
  if (hi == lo) return 0.0;
  std::vector<double> r, p;
  for (double x : ref) r.push_back((x - lo) / (hi - lo));
  for (double x : pol) p.push_back((x - lo) / (hi - lo));
  return median(r) - median(p);
}

inline double violation_probability(const std::vector<bool>& flags) {
  double hits = 0.0;
  for (bool f : flags) hits += f ? 1.0 : 0.0;
  return hits / static_cast<double>(flags.size());
}

}  // namespace pcbench::test::brute

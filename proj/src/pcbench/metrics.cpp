#include "pcbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcbench/error.hpp"

namespace pcbench {

double median(std::vector<double> values) {
  if (values.empty()) fail(ErrorCode::argument, "median of an empty sample");
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double mad(const std::vector<double>& values) {
  const double m = median(values);
  std::vector<double> dev(values.size());
  std::transform(values.begin(), values.end(), dev.begin(), [m](double v) { return std::abs(v - m); });
  return median(std::move(dev));
}

std::optional<double> sample_std(const std::vector<double>& values) {
  if (values.size() < 2) return std::nullopt;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::string_view to_string(Normalization n) {
  switch (n) {
    case Normalization::none: return "none";
    case Normalization::per_step: return "per_step";
    case Normalization::minmax: return "minmax";
  }
  return "?";
}

Normalization normalization_from_string(std::string_view name) {
  if (name == "none") return Normalization::none;
  if (name == "per_step" || name == "per-step") return Normalization::per_step;
  if (name == "minmax" || name == "min-max") return Normalization::minmax;
  fail(ErrorCode::config, "unknown normalization '" + std::string(name) + "' (none, per_step, minmax)");
}

double optimality_gap(const std::vector<double>& reference, const std::vector<double>& policy,
                      Normalization normalization, double steps) {
  if (reference.empty() || policy.empty()) fail(ErrorCode::argument, "optimality gap needs two nonempty samples");
  switch (normalization) {
    case Normalization::none: return median(reference) - median(policy);
    case Normalization::per_step: {
      if (!(steps > 0.0)) fail(ErrorCode::argument, "per-step normalization needs a positive step count");
      return (median(reference) - median(policy)) / steps;
    }
    case Normalization::minmax: {
      double lo = reference.front(), hi = reference.front();
      for (const auto* s : {&reference, &policy}) {
        for (double v : *s) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      if (!(hi > lo)) return 0.0;
      auto scaled = [lo, hi](const std::vector<double>& s) {
        std::vector<double> out(s.size());
        std::transform(s.begin(), s.end(), out.begin(), [lo, hi](double v) { return (v - lo) / (hi - lo); });
        return out;
      };
      return median(scaled(reference)) - median(scaled(policy));
    }
  }
  fail(ErrorCode::internal, "unhandled normalization");
}

double violation_probability(const std::vector<bool>& flags) {
  if (flags.empty()) fail(ErrorCode::argument, "violation probability of an empty sample");
  const auto hits = std::count(flags.begin(), flags.end(), true);
  return static_cast<double>(hits) / static_cast<double>(flags.size());
}

Histogram histogram(const std::vector<double>& values, std::size_t bins) {
  Histogram h;
  if (values.empty() || bins == 0) return h;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  h.edges[bins] = hi;
  h.counts.assign(bins, 0);
  for (double v : values) {
    auto idx = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    h.counts[std::min(idx, bins - 1)]++;
  }
  return h;
}

}  // namespace pcbench

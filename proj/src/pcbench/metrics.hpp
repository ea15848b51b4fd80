#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace pcbench {

/// Mean of the two central order statistics for even sample counts.
double median(std::vector<double> values);

/// Median of |x - median(x)|.
double mad(const std::vector<double>& values);

/// Sample standard deviation (N - 1); absent for fewer than two samples.
std::optional<double> sample_std(const std::vector<double>& values);

enum class Normalization { none, per_step, minmax };

std::string_view to_string(Normalization n);
Normalization normalization_from_string(std::string_view name);

/// median(reference) - median(policy) after normalization. `steps` divides the
/// returns for per_step; minmax rescales both samples by the pooled min and max
/// (a degenerate pooled range maps everything to 0).
double optimality_gap(const std::vector<double>& reference, const std::vector<double>& policy,
                      Normalization normalization, double steps = 1.0);

/// Fraction of episodes whose trajectory violated a constraint at least once.
double violation_probability(const std::vector<bool>& flags);

struct Histogram {
  std::vector<double> edges;   // bins + 1 entries
  std::vector<std::size_t> counts;
};

Histogram histogram(const std::vector<double>& values, std::size_t bins);

}  // namespace pcbench

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pcbench/models.hpp"
#include "pcbench/types.hpp"

namespace pcbench {

/// Time-indexed targets, one array of `steps` values per controlled variable.
class SetpointSchedule {
 public:
  SetpointSchedule() = default;
  SetpointSchedule(Names names, std::vector<std::vector<double>> values);

  const Names& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  std::size_t steps() const { return steps_; }
  const std::vector<double>& values(std::size_t entry) const { return values_.at(entry); }

  /// Targets at step t (schedule order). Throws ErrorCode::out_of_range when t >= steps().
  Vector at(std::size_t t) const;
  /// Like at() but holds the last value past the end; used for observations and forecasts.
  Vector at_clamped(std::size_t t) const;

 private:
  Names names_;
  std::vector<std::vector<double>> values_;
  std::size_t steps_ = 0;
};

Vector setpoint_at(const SetpointSchedule& schedule, std::size_t t);

/// Scheduled disturbances with optional per-name bounds. Bounded names extend the
/// observation space in declaration order.
class DisturbanceSchedule {
 public:
  struct Entry {
    std::string name;
    std::vector<double> values;  // may be empty when only bounds are declared
    std::optional<std::pair<double, double>> bounds;
  };

  DisturbanceSchedule() = default;
  explicit DisturbanceSchedule(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  /// Checks names against the model, lengths against the episode and values against bounds.
  /// Resolves model indices; must be called before at().
  void bind(const ModelDescriptor& model, std::size_t steps);

  /// Full disturbance vector for step t: scheduled values override model defaults.
  Vector at(const ModelDescriptor& model, std::size_t t) const;
  Vector at_clamped(const ModelDescriptor& model, std::size_t t) const;

  /// Indices (into the model's disturbance vector) of bounded entries, declaration order.
  const std::vector<Eigen::Index>& bounded_indices() const { return bounded_indices_; }
  Box bounded_box() const;
  Names bounded_names() const;

 private:
  std::vector<Entry> entries_;
  std::vector<Eigen::Index> model_index_;
  std::vector<Eigen::Index> bounded_indices_;
  std::size_t steps_ = 0;
  bool bound_ = false;
};

Vector disturbance_at(const DisturbanceSchedule& schedule, const ModelDescriptor& model, std::size_t t);

enum class Sense { less_equal, greater_equal };

struct Constraint {
  std::string var;
  Sense sense = Sense::less_equal;
  double bound = 0.0;
};

/// Scalar bounds on measured variables, raw units. g > 0 means violated.
class ConstraintSet {
 public:
  ConstraintSet() = default;
  explicit ConstraintSet(std::vector<Constraint> constraints) : constraints_(std::move(constraints)) {}

  void bind(const ModelDescriptor& model);

  const std::vector<Constraint>& constraints() const { return constraints_; }
  std::size_t size() const { return constraints_.size(); }
  bool empty() const { return constraints_.empty(); }

  /// g(x) for a measured vector (states followed by model outputs).
  Vector values(const Vector& measured) const;

 private:
  std::vector<Constraint> constraints_;
  std::vector<Eigen::Index> index_;
  bool bound_ = false;
};

Vector constraint_values(const ConstraintSet& cs, const Vector& measured);

/// True when any entry is strictly positive.
bool any_violation(const Vector& g);

}  // namespace pcbench

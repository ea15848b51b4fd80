#include "pcbench/scenario.hpp"

#include <cmath>

#include "pcbench/error.hpp"

namespace pcbench {

SetpointSchedule::SetpointSchedule(Names names, std::vector<std::vector<double>> values)
    : names_(std::move(names)), values_(std::move(values)) {
  if (names_.size() != values_.size()) config_error("setpoints", "name/value count mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i == 0) steps_ = values_[i].size();
    if (values_[i].size() != steps_) {
      config_error("setpoints." + names_[i], "has " + std::to_string(values_[i].size()) +
                                                 " entries, other setpoints have " + std::to_string(steps_));
    }
    for (double v : values_[i]) {
      if (!std::isfinite(v)) config_error("setpoints." + names_[i], "non-finite target");
    }
  }
}

Vector SetpointSchedule::at(std::size_t t) const {
  if (t >= steps_) {
    fail(ErrorCode::out_of_range,
         "setpoint index " + std::to_string(t) + " outside schedule of " + std::to_string(steps_) + " steps");
  }
  Vector sp(static_cast<Eigen::Index>(names_.size()));
  for (std::size_t i = 0; i < names_.size(); ++i) sp[static_cast<Eigen::Index>(i)] = values_[i][t];
  return sp;
}

Vector SetpointSchedule::at_clamped(std::size_t t) const {
  if (steps_ == 0) return Vector(0);
  return at(std::min(t, steps_ - 1));
}

Vector setpoint_at(const SetpointSchedule& schedule, std::size_t t) { return schedule.at(t); }

DisturbanceSchedule::DisturbanceSchedule(std::vector<Entry> entries) : entries_(std::move(entries)) {}

void DisturbanceSchedule::bind(const ModelDescriptor& model, std::size_t steps) {
  model_index_.clear();
  bounded_indices_.clear();
  steps_ = steps;
  for (const auto& e : entries_) {
    const std::string field = "disturbances." + e.name;
    auto idx = model.disturbance_index(e.name);
    if (!idx) {
      std::string names;
      for (const auto& n : model.disturbance_names) names += (names.empty() ? "" : ", ") + n;
      config_error(field, "model '" + model.name + "' has no disturbance input '" + e.name +
                              "' (declared: " + (names.empty() ? "none" : names) + ")");
    }
    for (const auto& other : model_index_) {
      if (other == *idx) config_error(field, "declared twice");
    }
    if (!e.values.empty() && e.values.size() != steps) {
      config_error(field, "has " + std::to_string(e.values.size()) + " values, episode has " +
                              std::to_string(steps) + " steps");
    }
    if (e.bounds) {
      const auto [lo, hi] = *e.bounds;
      if (!(hi > lo)) config_error("disturbance_bounds." + e.name, "high must exceed low");
      for (double v : e.values) {
        if (!(v >= lo && v <= hi)) {
          config_error(field, "value " + format_double(v) + " outside declared bounds [" + format_double(lo) +
                                  ", " + format_double(hi) + "]");
        }
      }
      const double dflt = model.default_disturbances.at(e.name);
      if (e.values.empty() && !(dflt >= lo && dflt <= hi)) {
        config_error("disturbance_bounds." + e.name, "model default outside declared bounds");
      }
      bounded_indices_.push_back(*idx);
    }
    for (double v : e.values) {
      if (!std::isfinite(v)) config_error(field, "non-finite value");
    }
    model_index_.push_back(*idx);
  }
  bound_ = true;
}

Vector DisturbanceSchedule::at(const ModelDescriptor& model, std::size_t t) const {
  Vector d = model.default_disturbance_vector();
  if (entries_.empty()) return d;
  if (!bound_) fail(ErrorCode::internal, "disturbance schedule used before bind()");
  if (t >= steps_) {
    fail(ErrorCode::out_of_range,
         "disturbance index " + std::to_string(t) + " outside schedule of " + std::to_string(steps_) + " steps");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!entries_[i].values.empty()) d[model_index_[i]] = entries_[i].values[t];
  }
  return d;
}

Vector DisturbanceSchedule::at_clamped(const ModelDescriptor& model, std::size_t t) const {
  if (steps_ == 0) return model.default_disturbance_vector();
  return at(model, std::min(t, steps_ - 1));
}

Box DisturbanceSchedule::bounded_box() const {
  Box b{Vector(0), Vector(0)};
  std::vector<double> lo, hi;
  for (const auto& e : entries_) {
    if (!e.bounds) continue;
    lo.push_back(e.bounds->first);
    hi.push_back(e.bounds->second);
  }
  b.low = Eigen::Map<const Vector>(lo.data(), static_cast<Eigen::Index>(lo.size()));
  b.high = Eigen::Map<const Vector>(hi.data(), static_cast<Eigen::Index>(hi.size()));
  return b;
}

Names DisturbanceSchedule::bounded_names() const {
  Names n;
  for (const auto& e : entries_) {
    if (e.bounds) n.push_back(e.name);
  }
  return n;
}

Vector disturbance_at(const DisturbanceSchedule& schedule, const ModelDescriptor& model, std::size_t t) {
  return schedule.at(model, t);
}

void ConstraintSet::bind(const ModelDescriptor& model) {
  index_.clear();
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const auto& c = constraints_[i];
    auto idx = model.measured_index(c.var);
    if (!idx) {
      config_error("constraints[" + std::to_string(i) + "]",
                   "model '" + model.name + "' has no state or output named '" + c.var + "'");
    }
    if (!std::isfinite(c.bound)) config_error("constraints[" + std::to_string(i) + "]", "non-finite bound");
    index_.push_back(*idx);
  }
  bound_ = true;
}

Vector ConstraintSet::values(const Vector& measured) const {
  Vector g(static_cast<Eigen::Index>(constraints_.size()));
  if (constraints_.empty()) return g;
  if (!bound_) fail(ErrorCode::internal, "constraint set used before bind()");
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const double v = measured[index_[i]];
    const auto& c = constraints_[i];
    g[static_cast<Eigen::Index>(i)] = c.sense == Sense::less_equal ? v - c.bound : c.bound - v;
  }
  return g;
}

Vector constraint_values(const ConstraintSet& cs, const Vector& measured) { return cs.values(measured); }

bool any_violation(const Vector& g) { return (g.array() > 0.0).any(); }

}  // namespace pcbench

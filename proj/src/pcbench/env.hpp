#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "pcbench/models.hpp"
#include "pcbench/rewards.hpp"
#include "pcbench/rng.hpp"
#include "pcbench/scenario.hpp"
#include "pcbench/sim.hpp"
#include "pcbench/types.hpp"

namespace pcbench {

/// Full scenario description.
///
/// Observation layout: measured variables (states, then model outputs), then the
/// current setpoint entries in schedule order, then bounded disturbances in
/// declaration order. `o_space` covers the first two groups; bounds of the
/// disturbance group come from the disturbance schedule (a full-length `o_space`
/// is also accepted).
struct EnvConfig {
  std::string name;
  ModelDescriptor model;
  std::size_t steps = 0;  // T
  double tsim = 0.0;      // model time units
  SetpointSchedule setpoints;
  Box a_space;
  Box o_space;
  Vector x0;
  double noise_percentage = 0.0;
  DisturbanceSchedule disturbances;
  ConstraintSet constraints;
  RewardSelector reward;
  IntegratorConfig integrator;

  double dt() const { return tsim / static_cast<double>(steps); }

  /// Validates every invariant and resolves name lookups. Idempotent.
  void finalize();

  // Valid after finalize().
  const Box& observation_space() const { return observation_space_; }
  Names observation_names() const;
  Box measured_space() const { return o_space.segment(0, model.n_measured()); }
  /// Index into the measured vector for each setpoint entry.
  const std::vector<Eigen::Index>& tracked_indices() const { return tracked_indices_; }
  Box tracked_space() const;
  Vector initial_state() const { return x0.head(model.n_x()); }

 private:
  Box observation_space_;
  std::vector<Eigen::Index> tracked_indices_;
};

struct StepInfo {
  std::size_t step = 0;          // index of the step that produced this info
  Vector raw_state;              // exact integrator output
  Vector raw_measured;           // raw_state followed by model outputs
  Vector constraint_g;           // g(raw_measured); > 0 violated
  bool any_violation = false;
  Vector disturbance_applied;
  Vector action_applied;         // post-clip
};

struct StepResult {
  Vector observation;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  StepInfo info;
};

struct ResetResult {
  Vector observation;
  StepInfo info;
};

/// Additive Gaussian measurement noise, std = pct * (high - low) per component, clipped to bounds.
Vector apply_noise(const Vector& state, Rng& rng, double noise_percentage, const Box& bounds);

class Environment {
 public:
  explicit Environment(EnvConfig config);

  /// A given seed restarts the episode counter; without one the next stream of
  /// the previous seed is used.
  ResetResult reset(std::optional<std::uint64_t> seed = std::nullopt);
  StepResult step(const Vector& action);

  const EnvConfig& config() const { return config_; }
  std::size_t step_index() const { return t_; }
  bool done() const { return t_ >= config_.steps; }
  const Vector& state() const { return x_; }
  Eigen::Index observation_size() const { return config_.observation_space().size(); }
  Eigen::Index action_size() const { return config_.a_space.size(); }

 private:
  Vector observe(const Vector& measured, std::size_t t);
  StepInfo info_for(std::size_t t, const Vector& action, const Vector& d) const;

  EnvConfig config_;
  Vector x_;
  Vector prev_action_;
  bool has_prev_action_ = false;
  bool started_ = false;
  std::size_t t_ = 0;
  std::uint64_t base_seed_ = 0;
  std::uint64_t episode_counter_ = 0;
  Rng rng_;
};

/// Validates the configuration and returns a fresh environment (step counter 0).
Environment make_env(EnvConfig config);

}  // namespace pcbench

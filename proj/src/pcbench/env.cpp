#include "pcbench/env.hpp"

#include <cmath>

#include "pcbench/error.hpp"

namespace pcbench {

namespace {

Vector concat(std::initializer_list<const Vector*> parts) {
  Eigen::Index n = 0;
  for (const auto* p : parts) n += p->size();
  Vector out(n);
  Eigen::Index at = 0;
  for (const auto* p : parts) {
    out.segment(at, p->size()) = *p;
    at += p->size();
  }
  return out;
}

void check_box(const Box& b, const char* field) {
  if (b.low.size() != b.high.size()) config_error(field, "low/high length mismatch");
  if (!b.low.allFinite() || !b.high.allFinite()) config_error(field, "non-finite bound");
  for (Eigen::Index i = 0; i < b.low.size(); ++i) {
    if (!(b.high[i] > b.low[i])) {
      config_error(field, "entry " + std::to_string(i) + ": high must exceed low");
    }
  }
}

}  // namespace

void EnvConfig::finalize() {
  model.validate();
  if (steps < 1) config_error("T", "episode needs at least one step");
  if (!(tsim > 0.0) || !std::isfinite(tsim)) config_error("tsim", "must be positive");
  integrator.validate();

  const Eigen::Index n_meas = model.n_measured();
  const auto n_sp = static_cast<Eigen::Index>(setpoints.size());

  if (setpoints.size() > 0 && setpoints.steps() != steps) {
    config_error("setpoints", "schedule has " + std::to_string(setpoints.steps()) + " entries, T is " +
                                  std::to_string(steps));
  }
  tracked_indices_.clear();
  for (const auto& name : setpoints.names()) {
    auto idx = model.measured_index(name);
    if (!idx) config_error("setpoints." + name, "model '" + model.name + "' has no state or output '" + name + "'");
    tracked_indices_.push_back(*idx);
  }

  check_box(a_space, "a_space");
  if (a_space.size() != model.n_u()) {
    config_error("a_space", "has " + std::to_string(a_space.size()) + " entries, model has " +
                                std::to_string(model.n_u()) + " inputs");
  }

  disturbances.bind(model, steps);
  constraints.bind(model);

  check_box(o_space, "o_space");
  const Box dist_box = disturbances.bounded_box();
  const Eigen::Index n_partial = n_meas + n_sp;
  const Eigen::Index n_full = n_partial + dist_box.size();
  if (o_space.size() == n_partial) {
    observation_space_ = Box{concat({&o_space.low, &dist_box.low}), concat({&o_space.high, &dist_box.high})};
  } else if (o_space.size() == n_full) {
    observation_space_ = o_space;
  } else {
    config_error("o_space", "has " + std::to_string(o_space.size()) + " entries, expected " +
                                std::to_string(n_partial) + " (measured + setpoints) or " + std::to_string(n_full) +
                                " (with bounded disturbances)");
  }

  if (!(noise_percentage >= 0.0) || !std::isfinite(noise_percentage)) {
    config_error("noise_percentage", "must be >= 0");
  }

  const Eigen::Index n_x = model.n_x();
  if (x0.size() != n_x && x0.size() != n_meas && x0.size() != n_partial && x0.size() != n_full) {
    config_error("x0", "has " + std::to_string(x0.size()) + " entries, expected the " + std::to_string(n_x) +
                           " states (optionally followed by the rest of the observation)");
  }
  if (!x0.allFinite()) config_error("x0", "non-finite entry");
  const Vector measured0 = [&] {
    try {
      return model.measured(x0.head(n_x));
    } catch (const Error& e) {
      config_error("x0", e.what());
    }
  }();
  const Box mspace = measured_space();
  for (Eigen::Index i = 0; i < n_meas; ++i) {
    if (!(measured0[i] >= mspace.low[i] && measured0[i] <= mspace.high[i])) {
      config_error("x0", "'" + model.measured_names()[static_cast<std::size_t>(i)] + "' = " +
                             format_double(measured0[i]) + " outside o_space bounds");
    }
  }

  reward.resolve(n_sp, model.n_u());
  if (reward.kind != RewardKind::custom && n_sp == 0) {
    config_error("setpoints", "built-in rewards need at least one setpoint");
  }
}

Names EnvConfig::observation_names() const {
  Names names = model.measured_names();
  for (const auto& n : setpoints.names()) names.push_back(n + "_sp");
  for (const auto& n : disturbances.bounded_names()) names.push_back(n);
  return names;
}

Box EnvConfig::tracked_space() const {
  Box b{Vector(static_cast<Eigen::Index>(tracked_indices_.size())),
        Vector(static_cast<Eigen::Index>(tracked_indices_.size()))};
  for (std::size_t i = 0; i < tracked_indices_.size(); ++i) {
    b.low[static_cast<Eigen::Index>(i)] = o_space.low[tracked_indices_[i]];
    b.high[static_cast<Eigen::Index>(i)] = o_space.high[tracked_indices_[i]];
  }
  return b;
}

Vector apply_noise(const Vector& state, Rng& rng, double noise_percentage, const Box& bounds) {
  if (noise_percentage < 0.0) fail(ErrorCode::argument, "noise_percentage must be >= 0");
  if (noise_percentage == 0.0) return state;
  if (state.size() != bounds.size()) fail(ErrorCode::argument, "apply_noise: dimension mismatch");
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector noisy(state.size());
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    const double sigma = noise_percentage * (bounds.high[i] - bounds.low[i]);
    noisy[i] = state[i] + sigma * normal(rng);
  }
  return bounds.clip(noisy);
}

Environment::Environment(EnvConfig config) : config_(std::move(config)) {
  config_.finalize();
  x_ = config_.initial_state();
  rng_.seed(derive_seed(0, 0));
}

Environment make_env(EnvConfig config) { return Environment(std::move(config)); }

Vector Environment::observe(const Vector& measured, std::size_t t) {
  const Vector noisy = apply_noise(measured, rng_, config_.noise_percentage, config_.measured_space());
  const Vector sp = config_.setpoints.at_clamped(t);
  const Vector d_full = config_.disturbances.at_clamped(config_.model, t);
  const auto& bidx = config_.disturbances.bounded_indices();
  Vector d(static_cast<Eigen::Index>(bidx.size()));
  for (std::size_t i = 0; i < bidx.size(); ++i) d[static_cast<Eigen::Index>(i)] = d_full[bidx[i]];
  return concat({&noisy, &sp, &d});
}

ResetResult Environment::reset(std::optional<std::uint64_t> seed) {
  if (seed) {
    base_seed_ = *seed;
    episode_counter_ = 0;
  }
  rng_.seed(derive_seed(base_seed_, episode_counter_));
  ++episode_counter_;
  started_ = true;
  t_ = 0;
  has_prev_action_ = false;
  x_ = config_.initial_state();

  ResetResult r;
  StepInfo& info = r.info;
  info.step = 0;
  info.raw_state = x_;
  info.raw_measured = config_.model.measured(x_);
  info.constraint_g = config_.constraints.values(info.raw_measured);
  info.any_violation = any_violation(info.constraint_g);
  info.disturbance_applied = config_.disturbances.at_clamped(config_.model, 0);
  r.observation = observe(info.raw_measured, 0);
  return r;
}

StepResult Environment::step(const Vector& action) {
  if (done()) {
    fail(ErrorCode::episode_complete,
         "episode finished after " + std::to_string(config_.steps) + " steps; call reset()");
  }
  if (action.size() != config_.a_space.size()) {
    fail(ErrorCode::argument, "action has " + std::to_string(action.size()) + " entries, expected " +
                                  std::to_string(config_.a_space.size()));
  }
  if (!action.allFinite()) fail(ErrorCode::argument, "non-finite action " + to_string(action));

  const Vector u = config_.a_space.clip(action);
  const Vector u_prev = has_prev_action_ ? prev_action_ : u;
  const Vector d = config_.disturbances.at(config_.model, t_);
  const Vector x_next = integrate(config_.model, x_, u, d, config_.dt(), config_.integrator);

  StepResult r;
  StepInfo& info = r.info;
  info.step = t_;
  info.raw_state = x_next;
  info.raw_measured = config_.model.measured(x_next);
  info.constraint_g = config_.constraints.values(info.raw_measured);
  info.any_violation = any_violation(info.constraint_g);
  info.disturbance_applied = d;
  info.action_applied = u;

  RewardContext ctx;
  ctx.step = t_;
  ctx.raw_measured = info.raw_measured;
  const Box mspace = config_.measured_space();
  ctx.normalized_measured = normalize(info.raw_measured, mspace);
  const auto& tracked = config_.tracked_indices();
  ctx.tracked.resize(static_cast<Eigen::Index>(tracked.size()));
  for (std::size_t i = 0; i < tracked.size(); ++i) {
    ctx.tracked[static_cast<Eigen::Index>(i)] = ctx.normalized_measured[tracked[i]];
  }
  if (!tracked.empty()) ctx.setpoint = normalize(config_.setpoints.at(t_), config_.tracked_space());
  ctx.action = normalize(u, config_.a_space);
  ctx.previous_action = normalize(u_prev, config_.a_space);
  ctx.constraint_g = info.constraint_g;
  r.reward = config_.reward.evaluate(ctx);
  if (!std::isfinite(r.reward)) fail(ErrorCode::internal, "non-finite reward at step " + std::to_string(t_));

  x_ = x_next;
  prev_action_ = u;
  has_prev_action_ = true;
  ++t_;
  r.truncated = t_ >= config_.steps;
  r.terminated = false;
  r.observation = observe(info.raw_measured, t_);
  return r;
}

}  // namespace pcbench

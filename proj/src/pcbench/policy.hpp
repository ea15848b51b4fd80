#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pcbench/env.hpp"
#include "pcbench/oracle.hpp"
#include "pcbench/types.hpp"
#include "pcbench/wire.hpp"

namespace pcbench {

struct PolicyInput {
  std::size_t step = 0;
  const Vector& observation;  // noisy, raw units
  const Vector& raw_state;    // exact state
  double last_reward = 0.0;   // reward of the previous transition (0 at step 0)
};

/// Deployment-time policy. act() must return a vector of the action dimension;
/// the environment clips it to the action space.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void reset(std::uint64_t seed, const Vector& observation, const Vector& raw_state) {
    (void)seed, (void)observation, (void)raw_state;
  }
  virtual Vector act(const PolicyInput& input) = 0;
  /// Called after the last step with the final observation and the episode return.
  virtual void end_episode(const PolicyInput& final, double episode_return) { (void)final, (void)episode_return; }
  virtual std::string label() const = 0;
  /// Per-step solver diagnostics of the current episode, if the policy solves optimization problems.
  virtual const std::vector<SolveDiagnostics>* diagnostics() const { return nullptr; }
};

class ConstantPolicy : public Policy {
 public:
  ConstantPolicy(Vector u, const Box& a_space);
  Vector act(const PolicyInput&) override { return u_; }
  std::string label() const override;

 private:
  Vector u_;
};

/// Uniform samples in the action space, reproducible per episode seed.
class RandomPolicy : public Policy {
 public:
  explicit RandomPolicy(Box a_space);
  void reset(std::uint64_t seed, const Vector&, const Vector&) override;
  Vector act(const PolicyInput&) override;
  std::string label() const override { return "random"; }

 private:
  Box a_space_;
  Rng rng_;
};

/// Receding-horizon oracle acting on the raw state.
class OraclePolicy : public Policy {
 public:
  explicit OraclePolicy(OcpSpec spec);
  void reset(std::uint64_t seed, const Vector&, const Vector&) override;
  Vector act(const PolicyInput& input) override;
  std::string label() const override { return "oracle"; }
  const std::vector<SolveDiagnostics>* diagnostics() const override { return &diagnostics_; }
  const OcpSolution& last_solution() const { return last_; }

 private:
  OcpSolver solver_;
  std::optional<Vector> u_prev_;
  std::vector<SolveDiagnostics> diagnostics_;
  OcpSolution last_;
};

struct ExternalSettings {
  std::string target;  // shell command, or tcp://host:port
  std::chrono::milliseconds timeout{10000};
};

/// Policy living in another process, driven over the line protocol. The agent
/// sees the noisy observation only.
class ExternalPolicy : public Policy {
 public:
  ExternalPolicy(ExternalSettings settings, const EnvConfig& env);
  void reset(std::uint64_t seed, const Vector& observation, const Vector& raw_state) override;
  Vector act(const PolicyInput& input) override;
  void end_episode(const PolicyInput& final, double episode_return) override;
  std::string label() const override { return "external:" + settings_.target; }

 private:
  void connect();
  wire::Json receive(std::string_view type);
  template <class F>
  auto guarded(F&& f) -> decltype(f());

  ExternalSettings settings_;
  std::string env_name_;
  std::size_t steps_;
  Box a_space_;
  Box o_space_;
  std::unique_ptr<LineChannel> channel_;
};

struct PolicyOptions {
  OracleSettings oracle;
  std::chrono::milliseconds timeout{10000};
};

/// "oracle", "random", "constant:v1,v2,...", "external:<command>", "external:tcp://host:port".
std::unique_ptr<Policy> make_policy(const std::string& spec, const EnvConfig& env, const PolicyOptions& options);

/// Checks the spec syntax without constructing anything expensive.
void validate_policy_spec(const std::string& spec, const EnvConfig& env);

}  // namespace pcbench
